// Elliptic solves: L_g = (n-1) Delta_g - R(g), the fourth-order composite
// DR DR*, the conformal pressure and Yamabe normalization onto R = -1.
#pragma once

#include <utility>

#include "crflow/errors.hpp"
#include "crflow/geometry.hpp"

namespace crflow {

/// spectral: constant-coefficient FFT inverse of the frozen operator.
enum class Preconditioner { none, diagonal, spectral };

struct EllipticConfig {
    double tolerance = 1e-10;
    int max_iterations = 1000;
    Preconditioner preconditioner = Preconditioner::spectral;
    int gmres_restart = 80;
    /// Constraint drift max|1 + R| accepted by pressure(): warn, then abort.
    double drift_warn = 1e-3;
    double drift_abort = 1e-1;
    /// Postcondition of yamabe_normalize on max|R + 1|.
    double constraint_tolerance = 1e-10;
    int newton_max_iterations = 60;
};

/// (n-1) Delta phi - R phi, or (n-1) Delta phi + phi with use_constraint.
ScalarField apply_L(const Geometry& geo, const ScalarField& phi, bool use_constraint);

/// Inverse of the constrained form (n-1) Delta + 1 by PCG in the dmu inner
/// product. Constant right-hand sides are returned unchanged (L c = c).
std::pair<ScalarField, SolveReport> solve_L(const Geometry& geo, const ScalarField& f, const EllipticConfig& cfg);
std::pair<ScalarField, SolveReport> solve_L(const MetricField& g, const ScalarField& f, const EllipticConfig& cfg);

/// Inverse of the general form (n-1) Delta - R. PCG when -R > 0 everywhere,
/// GMRES otherwise.
std::pair<ScalarField, SolveReport> solve_L_general(const Geometry& geo, const ScalarField& f,
                                                    const EllipticConfig& cfg);

/// (alpha Delta + V) x = f with x as initial guess; V > 0 expected.
SolveReport solve_helmholtz(const Geometry& geo, double alpha, const ScalarField& V, const ScalarField& f,
                            ScalarField& x, const EllipticConfig& cfg);

struct PressureResult {
    ScalarField p;
    SolveReport report;
    double drift = 0.0;  // max|1 + R| of the input
    bool drift_warning = false;
};

/// p = 2 L^{-1}(|Ric|^2) - 2/n, evaluated as 2 L^{-1}(|Ric|^2 - 1/n).
/// Throws ConstraintBlowup above drift_abort and NegativePressure if
/// min p < -10 * tolerance.
PressureResult pressure(const Geometry& geo, const EllipticConfig& cfg);
PressureResult pressure(const MetricField& g, const EllipticConfig& cfg);

/// DR(DR* phi) = f by right-preconditioned GMRES. Throws NearSingular on
/// stagnation.
std::pair<ScalarField, SolveReport> solve_DRDRstar(const Geometry& geo, const ScalarField& f,
                                                   const EllipticConfig& cfg);
std::pair<ScalarField, SolveReport> solve_DRDRstar(const MetricField& g, const ScalarField& f,
                                                   const EllipticConfig& cfg);

struct YamabeResult {
    MetricField metric;  // u^4 g
    ScalarField u;
    Geometry geometry;  // of the normalized metric, Ricci detail
    SolveReport report;
    int newton_iterations = 0;
    int correction_iterations = 0;
    double constraint_residual = 0.0;  // max|R + 1| after normalization
};

/// Conformal factor u > 0 with R(u^4 g) = -1.
///
/// A positive ground state of 8 Delta + R gives the starting guess and the
/// sign test (lowest eigenvalue must be negative, else WrongYamabeSign). Damped
/// Newton then solves 8 Delta u + R u + u^5 = 0. The discrete curvature of
/// u^4 g differs from -1 by the discretization error, so damped Newton steps
/// g <- e^w g with (2 Delta - R) w = -(1 + R) finish the job on the discrete
/// constraint itself.
YamabeResult yamabe_normalize(const MetricField& g, const EllipticConfig& cfg);

}  // namespace crflow
