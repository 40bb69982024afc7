#include "stabledrift/report.hpp"

#include <cmath>

namespace sd {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::trend_only: return "trend_only";
    }
    return "fail";
}

bool VerificationReport::add(const std::string& name, double value, double bound, const char* rel, bool ok) {
    // NaN never passes
    if (std::isnan(value) || std::isnan(bound)) ok = false;
    checks_.push_back({name, value, bound, rel, ok});
    return ok;
}

bool VerificationReport::check_le(const std::string& n, double v, double b) { return add(n, v, b, "<=", v <= b); }
bool VerificationReport::check_lt(const std::string& n, double v, double b) { return add(n, v, b, "<", v < b); }
bool VerificationReport::check_ge(const std::string& n, double v, double b) { return add(n, v, b, ">=", v >= b); }
bool VerificationReport::check_gt(const std::string& n, double v, double b) { return add(n, v, b, ">", v > b); }
bool VerificationReport::check(const std::string& n, bool ok, double v) {
    checks_.push_back({n, v, 0.0, "holds", ok});
    return ok;
}

std::vector<Check> VerificationReport::failures() const {
    std::vector<Check> out;
    for (const auto& c : checks_)
        if (!c.ok) out.push_back(c);
    return out;
}

Verdict VerificationReport::verdict() const {
    if (trend_only_) return Verdict::trend_only;
    for (const auto& c : checks_)
        if (!c.ok) return Verdict::fail;
    return Verdict::pass;
}

void VerificationReport::absorb(const VerificationReport& o, const std::string& prefix) {
    for (auto c : o.checks_) {
        c.name = prefix + "." + c.name;
        checks_.push_back(c);
    }
    for (auto it = o.metrics_.begin(); it != o.metrics_.end(); ++it) metrics_[prefix + "." + it.key()] = it.value();
}

namespace {
json num(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}
}  // namespace

json VerificationReport::to_json() const {
    json j;
    j["name"] = name_;
    j["anchor"] = anchor_;
    j["verdict"] = to_string(verdict());
    j["inputs"] = inputs_;
    j["metrics"] = metrics_;
    json checks = json::array();
    json failed = json::array();
    for (const auto& c : checks_) {
        json cj{{"name", c.name}, {"value", num(c.value)}, {"relation", c.relation}, {"bound", num(c.bound)},
                {"ok", c.ok}};
        if (!c.ok) failed.push_back(cj);
        checks.push_back(std::move(cj));
    }
    j["tolerances"] = checks;
    j["failures"] = failed;
    j["provenance"] = provenance_;
    return j;
}

}  // namespace sd
