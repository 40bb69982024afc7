#pragma once

#include <stdexcept>
#include <string>

namespace sd {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

class CapacityError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

/// Iterative method did not reach its tolerance; carries the last estimate.
class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, double last_estimate)
        : NumericalError(what), last_(last_estimate) {}
    double last_estimate() const { return last_; }

private:
    double last_;
};

/// Neumann series whose operator norm estimate is >= 1.
class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, double estimate) : NumericalError(what), est_(estimate) {}
    double estimate() const { return est_; }

private:
    double est_;
};

class AdmissibilityError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw ParameterError(msg);
}

}  // namespace sd
