#pragma once

#include <string>
#include <vector>

namespace sd::cli::anchors {

struct ScenarioInfo {
    std::string name;
    std::string anchor;
    std::string summary;
};

/// Sorted by name.
const std::vector<ScenarioInfo>& scenarios();
bool is_scenario(const std::string& name);
const std::string& scenario_anchor(const std::string& name);

/// Citation for a report name; empty if none is registered.
std::string check_anchor(const std::string& report_name);

/// Message prefix for an admissibility failure. Keys: dimension, delta, nu, p_range, p_weighted, rpq.
std::string hypothesis(const std::string& key);

}  // namespace sd::cli::anchors
