// Bundled initial metrics and seeded random smooth fields.
#pragma once

#include <cstdint>
#include <string>

#include "crflow/field.hpp"

namespace crflow {

MetricField flat_metric(const Grid& grid);

/// Small sine perturbation of the flat torus, not conformally flat:
/// g = diag(1 + e sin 2pi y, 1 + e sin 2pi z, 1 + e sin 2pi x) + (e/3) sin 2pi (x + z) (dx dy + dy dx)
/// in coordinates scaled to unit period.
MetricField near_flat_torus(const Grid& grid, double amplitude = 0.1);

/// The flow preset. A Sol-like exponential modulation f = a sin 2pi x,
///   g_xx = 1 + r sin 2pi y,  g_yy = e^{2f} (1 + r sin 2pi z),  g_zz = e^{-2f},
///   g_xy = 0.3 r sin 2pi z,  g_yz = 0.5 r sin 2pi (x + y),  g_xz = 0,
/// with a small ripple r. After Yamabe normalization its traceless Ricci is
/// O(1), unlike near-flat perturbations, whose normalized metrics are tiny and
/// far from Einstein.
MetricField perturbed_torus(const Grid& grid, double amplitude = 0.8, double ripple = 0.05);

/// e^{2f} delta.
MetricField conformally_flat(const Grid& grid, const ScalarField& f);

/// Sum of a few random Fourier modes with |k|_inf <= max_mode, scaled so that
/// the largest coefficient magnitude is `amplitude`.
ScalarField random_smooth_scalar(const Grid& grid, std::uint64_t seed, double amplitude = 1.0, int max_mode = 1);
SymTensorField random_smooth_tensor(const Grid& grid, std::uint64_t seed, double amplitude = 1.0, int max_mode = 1);
/// delta + random smooth tensor; positive definite for amplitude < 1/3.
MetricField random_smooth_metric(const Grid& grid, std::uint64_t seed, double amplitude = 0.15, int max_mode = 1);

/// Named presets used by the CLI: "flat", "near-flat", "perturbed-torus", "random".
MetricField preset_metric(const std::string& name, const Grid& grid, std::uint64_t seed, double amplitude);

}  // namespace crflow
