#ifndef EHWSN_ERRORS_HPP
#define EHWSN_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace ehwsn {

/// Machine-readable failure category; the CLI maps each to an exit code.
enum class ErrorCategory {
    validation = 2,
    config = 3,
    capacity_violation = 4,
    rate_infeasible = 5,
    energy_infeasible = 6,
    not_converged = 7,
    io = 8,
    kkt = 9,
};

std::string_view to_string(ErrorCategory category);

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what)
        : Error(ErrorCategory::validation, what) {}
};

/// Raised by the M/M/1 delay when the offered flow reaches the link rate.
class CapacityViolation : public Error {
public:
    CapacityViolation(long link, double flow, double capacity);

    long link() const noexcept { return link_; }
    double flow() const noexcept { return flow_; }
    double capacity() const noexcept { return capacity_; }

private:
    long link_;
    double flow_;
    double capacity_;
};

class RateInfeasible : public Error {
public:
    explicit RateInfeasible(double spectral_radius);

    double spectral_radius() const noexcept { return spectral_radius_; }

private:
    double spectral_radius_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

class IoError : public Error {
public:
    IoError(const std::string& path, const std::string& what)
        : Error(ErrorCategory::io, path + ": " + what) {}
};

}  // namespace ehwsn

#endif  // EHWSN_ERRORS_HPP
