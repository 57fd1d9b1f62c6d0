#include <cmath>

#include "crflow/elliptic.hpp"
#include "crflow/homogeneous.hpp"
#include "crflow/operators.hpp"
#include "crflow/presets.hpp"
#include "crflow/splittings.hpp"
#include "doctest.h"

using namespace crflow;

namespace {

SymTensorField difference(const SymTensorField& a, const SymTensorField& b) {
    SymTensorField d(a.grid);
    for (std::size_t n = 0; n < d.size(); ++n) d[n] = a[n] - b[n];
    return d;
}

}  // namespace

TEST_CASE("projections onto ker DR") {
    const Grid grid = Grid::cube(12);
    EllipticConfig cfg;
    const YamabeResult y = yamabe_normalize(near_flat_torus(grid, 0.1), cfg);
    const Geometry& geo = y.geometry;
    const SymTensorField h = random_smooth_tensor(grid, 5);

    for (bool tilde : {true, false}) {
        auto P = [&](const SymTensorField& x) { return tilde ? project_tilde(geo, x, cfg) : project_bar(geo, x, cfg); };
        const SplitResult once = P(h);
        CHECK(once.constraint_residual <= 1e-8);
        CHECK(once.reconstruction_residual <= 1e-13);
        const SplitResult twice = P(once.tangential);
        CHECK(norm(geo, difference(twice.tangential, once.tangential)) <= 1e-8 * norm(geo, once.tangential));
    }
    // h- is L2-orthogonal to range DR*, which contains Ric = DR*(-1).
    const SplitResult bar = project_bar(geo, h, cfg);
    CHECK(std::abs(inner(geo, geo.curvature.ricci, bar.tangential)) <=
          1e-6 * norm(geo, geo.curvature.ricci) * norm(geo, h));
    // Multiples of g are removed entirely by the tilde projection.
    const SplitResult gpart = project_tilde(geo, scale_metric(geo.metric, random_smooth_scalar(grid, 3)), cfg);
    CHECK(norm(geo, gpart.tangential) <= 1e-8);
}

TEST_CASE("Yamabe functional and its gradient") {
    const Grid grid = Grid::cube(8);
    const HomogeneousModel iso = HomogeneousModel::named("isotropic");
    const Geometry geo = embedded_geometry(iso)(embed(grid, {6.0, 6.0, 6.0}));
    // R = -1 and vol = 6^(3/2) on the unit cube.
    CHECK(yamabe_functional(geo) == doctest::Approx(-std::pow(6.0, 1.5) * std::pow(6.0, -0.5)).epsilon(1e-13));
    // At an Einstein metric the gradient vanishes.
    CHECK(norm(geo, grad_yamabe(geo)) <= 1e-13);
}

TEST_CASE("quasi-gradient residual shrinks under refinement") {
    EllipticConfig cfg;
    double prev = 0.0;
    for (int n : {12, 24}) {
        const YamabeResult y = yamabe_normalize(near_flat_torus(Grid::cube(n), 0.1), cfg);
        const QuasiGradientReport r = quasi_gradient_residual(y.geometry, cfg);
        const double rel = r.residual / r.rhs_norm;
        MESSAGE("n = " << n << ": relative residual " << rel);
        CHECK(rel < 0.1);
        if (prev > 0.0) CHECK(rel < prev / 2.0);
        prev = rel;
    }
}
