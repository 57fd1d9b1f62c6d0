// Differential operators, the linearized scalar curvature and its adjoint,
// norms and quadrature.
#pragma once

#include "crflow/geometry.hpp"

namespace crflow {

/// d phi.
CovectorField gradient(const Geometry& geo, const ScalarField& phi);

/// Delta_g phi = delta_g d phi, positive operator.
ScalarField laplacian(const Geometry& geo, const ScalarField& phi);

/// (delta_g h)_j = -g^ik h_ij|k. The pure-trace part is differenced as
/// delta(tau g) = -d tau so that delta(phi g) = -d phi holds exactly.
CovectorField divergence(const Geometry& geo, const SymTensorField& h);

/// delta_g w = -g^ij w_i|j for a 1-form.
ScalarField divergence(const Geometry& geo, const CovectorField& w);

/// Hess_g phi_ij = D_i D_j phi - Gamma^k_ij D_k phi.
SymTensorField hessian(const Geometry& geo, const ScalarField& phi);

/// DR(g)h = Delta tr_g h + delta delta h - Ric . h.
ScalarField linearized_R(const Geometry& geo, const SymTensorField& h);

/// DR(g)* phi = Hess phi - g (g^kl Hess_kl phi) - Ric phi.
SymTensorField adjoint_linearized_R(const Geometry& geo, const ScalarField& phi);

struct NormsAndVolume {
    ScalarField norm_sq;  // |h|^2_g
    ScalarField density;  // sqrt det g
    double volume = 0.0;
};

NormsAndVolume norms_and_volume(const MetricField& g, const SymTensorField& h);

// Pointwise algebra and quadrature.

ScalarField trace(const Geometry& geo, const SymTensorField& h);
/// Pointwise a . b = g^ik g^jl a_ij b_kl.
ScalarField dot(const Geometry& geo, const SymTensorField& a, const SymTensorField& b);
SymTensorField traceless_ricci(const Geometry& geo);
/// Cell-sum quadrature of f dmu_g.
double integrate(const Geometry& geo, const ScalarField& f);
double volume(const Geometry& geo);
/// L2(dmu_g) inner products and norms.
double inner(const Geometry& geo, const ScalarField& a, const ScalarField& b);
double inner(const Geometry& geo, const SymTensorField& a, const SymTensorField& b);
double norm(const Geometry& geo, const ScalarField& a);
double norm(const Geometry& geo, const SymTensorField& a);

/// phi * g pointwise.
SymTensorField scale_metric(const MetricField& g, const ScalarField& phi);

double max_abs(const ScalarField& f);
double max_value(const ScalarField& f);
double min_value(const ScalarField& f);

}  // namespace crflow
