#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stabledrift/drift.hpp"
#include "stabledrift/report.hpp"

namespace sd::cli {

struct ExperimentConfig {
    std::string scenario;
    std::uint64_t seed = 20240917;
    bool quick = false;

    int dim = 3;
    double alpha = 1.5;
    double delta = 0.05;
    double lambda = 1.0;
    double nu = 0.675;
    double p = 5.0;
    double q = 0.0;  ///< 0: 2p
    double r = 0.0;  ///< 0: (1+p)/2
    std::optional<double> m_dalpha;  ///< unset: estimated by radial quadrature
    drift::HardyScaling hardy_scaling = drift::HardyScaling::calibrated;

    int N = 32;
    double L = 8.0;

    std::vector<double> t_list = {0.1, 0.25, 0.5};
    std::vector<double> mu_ladder = {1e2, 1e3, 1e4};
    std::size_t n_paths = 100000;
    double dt = 0.01;

    drift::DriftSpec drift;          ///< drift under study (default: Hardy at delta)
    drift::DriftSpec bounded_drift;  ///< smooth drift for the bounded-drift checks

    double q_eff() const { return q > 0.0 ? q : 2.0 * p; }
    double r_eff() const { return r > 0.0 ? r : 0.5 * (1.0 + p); }
    /// Grid points per axis after --quick.
    int grid_n() const;
    std::size_t paths() const;
    /// Form-bound the drift actually carries (differs from delta for the literal Hardy scaling).
    double effective_delta() const;

    json to_json() const;
};

/// key=value text with [section] headers, or a JSON object (first non-blank char '{').
/// Throws ConfigError on empty input, unknown keys or malformed values.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct AdmissibilityInfo {
    double m = 0.0;
    bool m_estimated = false;
    double threshold = 0.0;
    double p_minus = 0.0, p_plus = 0.0;
    double p_floor = 0.0;  ///< (d - alpha + 1) v (d/(2 nu) + 2)
    double delta = 0.0;

    json to_json() const;
};

/// Cross-field admissibility; throws AdmissibilityError naming the violated hypothesis.
AdmissibilityInfo check_admissibility(const ExperimentConfig& c);

/// m estimate used when the config does not pin one.
double estimate_m(double alpha, int dim);

}  // namespace sd::cli
