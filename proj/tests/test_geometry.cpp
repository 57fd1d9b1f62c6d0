#include <cmath>
#include <numbers>

#include "crflow/errors.hpp"
#include "crflow/geometry.hpp"
#include "crflow/operators.hpp"
#include "crflow/presets.hpp"
#include "crflow/reference.hpp"
#include "doctest.h"

using namespace crflow;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double max_abs_vec(const CovectorField& w) {
    double m = 0.0;
    for (const auto& v : w.data)
        for (int a = 0; a < 3; ++a) m = std::max(m, std::abs(v[a]));
    return m;
}

double bianchi_residual(const Grid& grid) {
    const Geometry geo = make_geometry(random_smooth_metric(grid, 7));
    const CovectorField dric = divergence(geo, geo.curvature.ricci);
    const CovectorField dr = gradient(geo, geo.curvature.scalar);
    CovectorField r(grid);
    for (std::size_t n = 0; n < r.size(); ++n) r[n] = dric[n] + 0.5 * dr[n];
    return max_abs_vec(r);
}

double conformal_scalar_error(const Grid& grid) {
    ScalarField f(grid);
    ScalarField exact(grid);
    for (std::size_t n = 0; n < f.size(); ++n) {
        const double x = grid.position(0, grid.coords(n)[0]);
        const double v = 0.05 * std::sin(kTwoPi * x);
        const double d1 = 0.05 * kTwoPi * std::cos(kTwoPi * x);
        const double d2 = -kTwoPi * kTwoPi * v;
        f[n] = v;
        exact[n] = -std::exp(-2.0 * v) * (4.0 * d2 + 2.0 * d1 * d1);
    }
    const Geometry geo = make_geometry(conformally_flat(grid, f));
    double e = 0.0;
    for (std::size_t n = 0; n < f.size(); ++n) e = std::max(e, std::abs(geo.curvature.scalar[n] - exact[n]));
    return e;
}

double adjoint_defect(const Grid& grid) {
    const Geometry geo = make_geometry(random_smooth_metric(grid, 11));
    const SymTensorField h = random_smooth_tensor(grid, 12);
    const ScalarField phi = random_smooth_scalar(grid, 13);
    return std::abs(inner(geo, linearized_R(geo, h), phi) - inner(geo, h, adjoint_linearized_R(geo, phi)));
}

}  // namespace

TEST_CASE("flat metric has vanishing curvature") {
    const Grid grid = Grid::cube(8);
    const auto cb = curvature(flat_metric(grid));
    for (std::size_t n = 0; n < grid.size(); ++n) {
        CHECK(cb.scalar[n] == 0.0);
        for (double v : cb.riemann[n]) CHECK(v == 0.0);
    }
}

TEST_CASE("inverse metric residual") {
    const Grid grid = Grid::cube(8);
    const MetricField g = random_smooth_metric(grid, 3);
    const SymTensorField inv = inverse_metric(g);
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const Mat3 m = product(g[n], inv[n]);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(std::abs(m[i][j] - (i == j ? 1.0 : 0.0)) < 1e-12);
    }
    MetricField bad(grid);
    bad[5] = Sym3::diagonal(1.0, -1.0, 1.0);
    CHECK_THROWS_AS(inverse_metric(bad), NonPositiveDefinite);
}

TEST_CASE("conformal scalar curvature converges at the stencil order") {
    for (int order : {2, 4}) {
        const double e16 = conformal_scalar_error(Grid::cube(16, 1.0, order));
        const double e32 = conformal_scalar_error(Grid::cube(32, 1.0, order));
        CHECK(std::log2(e16 / e32) == doctest::Approx(order).epsilon(0.25));
    }
}

TEST_CASE("contracted Bianchi identity converges") {
    for (int order : {2, 4}) {
        const double r16 = bianchi_residual(Grid::cube(16, 1.0, order));
        const double r32 = bianchi_residual(Grid::cube(32, 1.0, order));
        MESSAGE("order " << order << ": " << r16 << " -> " << r32);
        CHECK(std::log2(r16 / r32) == doctest::Approx(order).epsilon(0.25));
    }
}

TEST_CASE("flat laplacian eigenfunction and integration by parts") {
    const Grid grid = Grid::cube(32, 1.0, 4);
    const Geometry flat = make_geometry(flat_metric(grid));
    ScalarField phi(grid);
    for (std::size_t n = 0; n < phi.size(); ++n) phi[n] = std::sin(kTwoPi * grid.position(0, grid.coords(n)[0]));
    const ScalarField lap = laplacian(flat, phi);
    for (std::size_t n = 0; n < phi.size(); ++n) CHECK(lap[n] == doctest::Approx(kTwoPi * kTwoPi * phi[n]).epsilon(1e-3).scale(1));
    CHECK(max_abs(laplacian(flat, ScalarField(grid, 2.0))) == 0.0);

    const Geometry geo = make_geometry(random_smooth_metric(grid, 5));
    const ScalarField a = random_smooth_scalar(grid, 1);
    const ScalarField b = random_smooth_scalar(grid, 2);
    const CovectorField da = gradient(geo, a);
    const CovectorField db = gradient(geo, b);
    ScalarField gab(grid);
    for (std::size_t n = 0; n < gab.size(); ++n) {
        const Vec3 up = raise(geo.inverse[n], da[n]);
        gab[n] = up[0] * db[n][0] + up[1] * db[n][1] + up[2] * db[n][2];
    }
    CHECK(inner(geo, laplacian(geo, a), b) == doctest::Approx(integrate(geo, gab)).epsilon(1e-12));
}

TEST_CASE("divergence of pure-trace tensors and of the metric") {
    const Grid grid = Grid::cube(16);
    const Geometry geo = make_geometry(random_smooth_metric(grid, 9));
    const ScalarField f = random_smooth_scalar(grid, 4);
    const CovectorField d = divergence(geo, scale_metric(geo.metric, f));
    const CovectorField df = gradient(geo, f);
    for (std::size_t n = 0; n < grid.size(); ++n)
        for (int a = 0; a < 3; ++a) CHECK(d[n][a] == doctest::Approx(-df[n][a]).epsilon(1e-12).scale(1));
    CHECK(max_abs_vec(divergence(geo, geo.metric)) < 1e-12);
}

TEST_CASE("exact linear identities") {
    const Grid grid = Grid::cube(16);
    const Geometry geo = make_geometry(random_smooth_metric(grid, 21));
    const ScalarField phi = random_smooth_scalar(grid, 22);
    const ScalarField lhs = linearized_R(geo, scale_metric(geo.metric, phi));
    const ScalarField lap = laplacian(geo, phi);
    for (std::size_t n = 0; n < grid.size(); ++n)
        CHECK(lhs[n] == doctest::Approx(2.0 * lap[n] - geo.curvature.scalar[n] * phi[n]).epsilon(1e-10).scale(1));

    const SymTensorField ric = adjoint_linearized_R(geo, ScalarField(grid, -1.0));
    for (std::size_t n = 0; n < grid.size(); ++n)
        for (int s = 0; s < 6; ++s) CHECK(ric[n].c[s] == doctest::Approx(geo.curvature.ricci[n].c[s]).epsilon(1e-12).scale(1));
}

TEST_CASE("adjointness defect converges at the stencil order") {
    for (int order : {2, 4}) {
        const double d16 = adjoint_defect(Grid::cube(16, 1.0, order));
        const double d32 = adjoint_defect(Grid::cube(32, 1.0, order));
        MESSAGE("order " << order << ": " << d16 << " -> " << d32);
        CHECK(std::log2(d16 / d32) == doctest::Approx(order).epsilon(0.25));
    }
}

TEST_CASE("algebraic curvature identities") {
    const Grid grid = Grid::cube(16);
    const Geometry geo = make_geometry(random_smooth_metric(grid, 31), CurvatureDetail::full);
    const auto& cb = geo.curvature;
    for (std::size_t n = 0; n < grid.size(); n += 7) {
        const Sym3& gi = geo.inverse[n];
        const double ric2 = contract(gi, cb.ricci[n], cb.ricci[n]);
        const Sym3 rt = cb.ricci[n] - (cb.scalar[n] / 3.0) * geo.metric[n];
        CHECK(ric2 == doctest::Approx(contract(gi, rt, rt) + cb.scalar[n] * cb.scalar[n] / 3.0).epsilon(1e-12));
        double contr = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int a = 0; a < 3; ++a) s += cb.riemann[n][idx4(a, i, a, j)];
                contr = std::max(contr, std::abs(s - cb.ricci[n](i, j)));
            }
        CHECK(contr < 1e-12 * (1.0 + std::sqrt(ric2)));
    }
    CHECK(contract(geo.inverse[0], geo.metric[0], geo.metric[0]) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("parallel kernels match the serial reference") {
    for (int order : {2, 4}) {
        const Grid grid = Grid::cube(16, 1.3, order);
        const Geometry geo = make_geometry(random_smooth_metric(grid, 41));
        const ScalarField phi = random_smooth_scalar(grid, 42, 1.0, 2);
        const ScalarField a = laplacian(geo, phi);
        const ScalarField b = reference::laplacian(geo, phi);
        const double scale = max_abs(b);
        for (std::size_t n = 0; n < grid.size(); ++n) CHECK(std::abs(a[n] - b[n]) <= 1e-13 * scale);
        const CovectorField ga = gradient(geo, phi);
        const CovectorField gb = reference::gradient(grid, phi);
        for (std::size_t n = 0; n < grid.size(); ++n)
            for (int c = 0; c < 3; ++c) CHECK(ga[n][c] == doctest::Approx(gb[n][c]).epsilon(1e-13).scale(1));
        CHECK(integrate(geo, phi) == doctest::Approx(reference::integrate(geo, phi)).epsilon(1e-13));
    }
}
