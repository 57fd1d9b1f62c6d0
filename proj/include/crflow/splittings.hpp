// Decompositions of symmetric tensors at a metric with R = -1,
//   h = h~ + phi g        (h~ in ker DR, non-orthogonal),
//   h = h- + DR* phi      (h- in ker DR, L2-orthogonal),
// and the Yamabe functional with its gradient.
#pragma once

#include "crflow/elliptic.hpp"
#include "crflow/geometry.hpp"

namespace crflow {

struct SplitResult {
    SymTensorField tangential;  // in ker DR(g)
    ScalarField multiplier;     // phi
    SolveReport report;
    /// max over points of |tangential + part(phi) - h| relative to max|h|.
    double reconstruction_residual = 0.0;
    /// ||DR(g) tangential|| / ||DR(g) h|| (dmu-weighted L2); 0 when DR h = 0.
    double constraint_residual = 0.0;
};

/// phi = L^{-1}(DR h), h~ = h - phi g.
SplitResult project_tilde(const Geometry& geo, const SymTensorField& h, const EllipticConfig& cfg);
SplitResult project_tilde(const MetricField& g, const SymTensorField& h, const EllipticConfig& cfg);

/// phi = (DR DR*)^{-1}(DR h), h- = h - DR* phi.
SplitResult project_bar(const Geometry& geo, const SymTensorField& h, const EllipticConfig& cfg);
SplitResult project_bar(const MetricField& g, const SymTensorField& h, const EllipticConfig& cfg);

/// Y(g) = vol^{(2-n)/n} int R dmu.
double yamabe_functional(const Geometry& geo);
double yamabe_functional(const MetricField& g);

/// grad Y = -vol^{(2-n)/n} (Ein + ((n-2)/(2n)) Rbar g), Rbar = R_total / vol.
SymTensorField grad_yamabe(const Geometry& geo);
SymTensorField grad_yamabe(const MetricField& g);

struct QuasiGradientReport {
    double residual = 0.0;  // ||flow rhs - 2 v^{(n-2)/n} P~(grad Y)||, dmu-weighted L2
    double rhs_norm = 0.0;  // ||flow rhs||
};

/// Compares the flow right-hand side -2(Ric + g/n) - p g with the quasi-gradient
/// 2 v^{(n-2)/n} P~(grad Y). Both sides are computed independently.
QuasiGradientReport quasi_gradient_residual(const Geometry& geo, const EllipticConfig& cfg);
double quasi_gradient_residual(const MetricField& g, const EllipticConfig& cfg);

}  // namespace crflow
