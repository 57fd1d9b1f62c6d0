// Serial reference kernels: plain loops with explicit periodic wrapping, no
// OpenMP and no shared neighbour tables. Tests compare the parallel kernels
// against these; the benchmark times both.
#pragma once

#include "crflow/geometry.hpp"

namespace crflow::reference {

/// d phi at order 2 or 4.
CovectorField gradient(const Grid& grid, const ScalarField& phi);
/// Positive Laplacian in conservative form.
ScalarField laplacian(const Geometry& geo, const ScalarField& phi);
/// Left-to-right cell sum of f sqrt(det g).
double integrate(const Geometry& geo, const ScalarField& f);

}  // namespace crflow::reference
