#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "stabledrift/config.hpp"
#include "stabledrift/report.hpp"

namespace sd::cli {

/// File written next to the reports (CSV text or binary field).
struct Artifact {
    std::string file;
    std::string content;
};

struct ScenarioResult {
    std::vector<VerificationReport> reports;
    std::vector<Artifact> artifacts;
};

using Logger = std::function<void(const std::string&)>;

/// Runs the checks of one scenario; full_suite runs all of them in dependency order.
ScenarioResult run_scenario(const ExperimentConfig& c, const AdmissibilityInfo& adm, const Logger& log = {});

/// Names of the checks a scenario runs, in order.
std::vector<std::string> scenario_checks(const std::string& scenario);

struct RunOutcome {
    int exit_code = 0;
    std::filesystem::path bundle_dir;
    json summary;
};

/// Admissibility, scenario, then reports/<UTC timestamp>/ under out_dir.
/// Throws AdmissibilityError before any check runs.
RunOutcome run_experiment(const ExperimentConfig& c, const std::filesystem::path& out_dir, const Logger& log = {});

}  // namespace sd::cli
