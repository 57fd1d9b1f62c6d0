// Matrix-free Krylov solvers over grid vectors in a weighted inner product
// <a, b> = sum_i w_i a_i b_i.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "crflow/errors.hpp"

namespace crflow {

using Vector = std::vector<double>;
using LinearMap = std::function<void(const Vector& in, Vector& out)>;

struct KrylovOptions {
    double tolerance = 1e-10;
    int max_iterations = 500;
    int restart = 60;  // GMRES only
    /// GMRES: a restart cycle that reduces the residual by less than this
    /// factor is treated as stagnation.
    double stagnation_ratio = 0.999;
};

double weighted_dot(const Vector& w, const Vector& a, const Vector& b);

/// Preconditioned conjugate gradients for an operator self-adjoint and
/// positive definite in the weighted inner product. `precond` must be
/// self-adjoint in the same inner product. x holds the initial guess.
/// Throws NotConverged; a non-positive curvature direction also ends the
/// iteration with NotConverged.
SolveReport pcg(const LinearMap& apply, const LinearMap& precond, const Vector& w, const Vector& b, Vector& x,
                const KrylovOptions& opt);

/// Right-preconditioned restarted GMRES with modified Gram-Schmidt in the
/// weighted inner product. Throws NotConverged, or NearSingular on stagnation.
SolveReport gmres(const LinearMap& apply, const LinearMap& precond, const Vector& w, const Vector& b, Vector& x,
                  const KrylovOptions& opt);

}  // namespace crflow
