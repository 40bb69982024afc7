#pragma once

#include <json.hpp>
#include <string>
#include <vector>

namespace sd {

using json = nlohmann::ordered_json;

enum class Verdict { pass, fail, trend_only };

std::string to_string(Verdict v);

/// One tolerance comparison inside a report.
struct Check {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    std::string relation;  // "<=", ">=", "<", ">", "holds"
    bool ok = false;
};

/// Structured record of one verification: inputs, metrics, tolerance checks.
class VerificationReport {
public:
    explicit VerificationReport(std::string name = {}) : name_(std::move(name)) {}

    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }
    void set_anchor(std::string a) { anchor_ = std::move(a); }
    const std::string& anchor() const { return anchor_; }

    void input(const std::string& key, json v) { inputs_[key] = std::move(v); }
    void metric(const std::string& key, json v) { metrics_[key] = std::move(v); }
    void provenance(const std::string& key, json v) { provenance_[key] = std::move(v); }
    const json& metrics() const { return metrics_; }
    const json& inputs() const { return inputs_; }

    bool check_le(const std::string& name, double value, double bound);
    bool check_lt(const std::string& name, double value, double bound);
    bool check_ge(const std::string& name, double value, double bound);
    bool check_gt(const std::string& name, double value, double bound);
    bool check(const std::string& name, bool ok, double value = 0.0);

    /// Trend-only reports never fail; checks are still recorded.
    void mark_trend_only() { trend_only_ = true; }

    const std::vector<Check>& checks() const { return checks_; }
    std::vector<Check> failures() const;
    Verdict verdict() const;
    bool passed() const { return verdict() != Verdict::fail; }

    /// Merge another report's checks and metrics under a prefix.
    void absorb(const VerificationReport& other, const std::string& prefix);

    json to_json() const;

private:
    bool add(const std::string& name, double value, double bound, const char* rel, bool ok);

    std::string name_;
    std::string anchor_;
    json inputs_ = json::object();
    json metrics_ = json::object();
    json provenance_ = json::object();
    std::vector<Check> checks_;
    bool trend_only_ = false;
};

}  // namespace sd
