// Error types shared across modules.
#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace crflow {

namespace detail {
inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}
}  // namespace detail

struct SolveReport {
    int iterations = 0;
    double residual = 0.0;  // relative, dmu-weighted L2
    bool converged = false;
};

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
  public:
    ConfigError(const std::string& what, int line = 0, std::string field = {})
        : Error(what), line(line), field(std::move(field)) {}
    int line;
    std::string field;
};

class NonPositiveDefinite : public Error {
  public:
    explicit NonPositiveDefinite(std::size_t point)
        : Error("metric is not positive definite at grid point " + std::to_string(point)), point(point) {}
    std::size_t point;
};

class EmptyDomain : public Error {
  public:
    using Error::Error;
};

class NonNegativeScalarCurvature : public Error {
  public:
    NonNegativeScalarCurvature(std::size_t sample, double value)
        : Error("scalar curvature " + detail::sci(value) + " is not negative at sample " + std::to_string(sample)),
          sample(sample) {}
    std::size_t sample;
};

/// Failures of numerical procedures (CLI exit code 3).
class SolverError : public Error {
  public:
    using Error::Error;
};

class NotConverged : public SolverError {
  public:
    NotConverged(const std::string& what, SolveReport report)
        : SolverError(what + " (iterations " + std::to_string(report.iterations) + ", residual " +
                      detail::sci(report.residual) + ")"),
          report(report) {}
    SolveReport report;
};

class NearSingular : public SolverError {
  public:
    NearSingular(const std::string& what, SolveReport report) : SolverError(what), report(report) {}
    SolveReport report;
};

class NegativePressure : public SolverError {
  public:
    NegativePressure(std::size_t point, double value)
        : SolverError("conformal pressure " + detail::sci(value) + " at grid point " + std::to_string(point)),
          point(point), value(value) {}
    std::size_t point;
    double value;
};

class WrongYamabeSign : public SolverError {
  public:
    using SolverError::SolverError;
};

class StepRejected : public SolverError {
  public:
    using SolverError::SolverError;
};

class ConstraintBlowup : public SolverError {
  public:
    ConstraintBlowup(const std::string& what, double drift) : SolverError(what), drift(drift) {}
    double drift;
};

class OdeFailure : public SolverError {
  public:
    using SolverError::SolverError;
};

}  // namespace crflow
