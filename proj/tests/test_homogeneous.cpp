#include <array>
#include <cmath>

#include "crflow/errors.hpp"
#include "crflow/homogeneous.hpp"
#include "doctest.h"

using namespace crflow;

namespace {

using M3 = std::array<std::array<double, 3>, 3>;
using P3 = std::array<double, 3>;

// A dx^2 + B dy^2 + C (dz - x dy)^2 in the standard chart of the Heisenberg group.
M3 heisenberg(double A, double B, double C, const P3& p) {
    const double x = p[0];
    M3 g{};
    g[0][0] = A;
    g[1][1] = B + C * x * x;
    g[1][2] = g[2][1] = -C * x;
    g[2][2] = C;
    return g;
}

M3 inv3(const M3& a) {
    M3 r{};
    const double d = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const int i1 = (j + 1) % 3, i2 = (j + 2) % 3, j1 = (i + 1) % 3, j2 = (i + 2) % 3;
            r[i][j] = (a[i1][j1] * a[i2][j2] - a[i1][j2] * a[i2][j1]) / d;
        }
    return r;
}

template <class F>
auto partial(F f, P3 p, int axis, double h) {
    P3 a = p, b = p;
    a[axis] += h;
    b[axis] -= h;
    auto fa = f(a), fb = f(b);
    for (std::size_t q = 0; q < fa.size(); ++q)
        for (std::size_t r = 0; r < fa[q].size(); ++r) fa[q][r] = (fa[q][r] - fb[q][r]) / (2 * h);
    return fa;
}

using Gamma = std::array<M3, 3>;  // Gamma[k][i][j]

Gamma christoffel(double A, double B, double C, const P3& p) {
    const M3 g = heisenberg(A, B, C, p);
    const M3 gi = inv3(g);
    std::array<M3, 3> dg;
    for (int a = 0; a < 3; ++a) dg[a] = partial([&](const P3& q) { return heisenberg(A, B, C, q); }, p, a, 1e-4);
    Gamma G{};
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int l = 0; l < 3; ++l) s += gi[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                G[k][i][j] = 0.5 * s;
            }
    return G;
}

// Ric_ij = d_k G^k_ij - d_j G^k_ik + G^k_kl G^l_ij - G^k_jl G^l_ik.
M3 chart_ricci(double A, double B, double C, const P3& p) {
    const Gamma G = christoffel(A, B, C, p);
    std::array<Gamma, 3> dG;
    for (int a = 0; a < 3; ++a) {
        P3 pa = p, pb = p;
        pa[a] += 1e-3;
        pb[a] -= 1e-3;
        const Gamma ga = christoffel(A, B, C, pa), gb = christoffel(A, B, C, pb);
        for (int k = 0; k < 3; ++k)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) dG[a][k][i][j] = (ga[k][i][j] - gb[k][i][j]) / 2e-3;
    }
    M3 ric{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) {
                s += dG[k][k][i][j] - dG[j][k][i][k];
                for (int l = 0; l < 3; ++l) s += G[k][k][l] * G[l][i][j] - G[k][j][l] * G[l][i][k];
            }
            ric[i][j] = s;
        }
    return ric;
}

}  // namespace

TEST_CASE("nil curvature agrees with a coordinate-chart computation") {
    const HomogeneousModel nil = HomogeneousModel::named("nil");
    for (const P3 abc : {P3{1.0, 1.0, 1.0}, P3{0.7, 1.3, 2.1}}) {
        // At the origin the left-invariant frame is (d_x, d_y, d_z).
        const M3 ric = chart_ricci(abc[0], abc[1], abc[2], {0.0, 0.0, 0.0});
        const FrameCurvature fc = frame_curvature(nil, {abc[0], abc[1], abc[2]});
        double R = 0.0;
        for (int i = 0; i < 3; ++i) {
            CHECK(fc.ricci[i] == doctest::Approx(ric[i][i]).epsilon(1e-6));
            R += ric[i][i] / abc[i];
        }
        CHECK(std::abs(ric[0][1]) < 1e-6);
        CHECK(fc.scalar == doctest::Approx(R).epsilon(1e-6));
        CHECK(fc.scalar < 0.0);
    }
    CHECK(frame_curvature(nil, {1.0, 1.0, 1.0}).scalar == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("frame curvature algebra") {
    for (const char* name : {"nil", "sol", "sl2r", "isotropic"}) {
        const HomogeneousModel m = HomogeneousModel::named(name);
        const FrameCurvature fc = frame_curvature(m, {0.8, 1.7, 2.3});
        CHECK(std::abs(fc.ricci_norm2 - fc.traceless_norm2 - fc.scalar * fc.scalar / 3.0) <=
              1e-14 * fc.ricci_norm2);
    }
    const HomogeneousModel iso = HomogeneousModel::named("isotropic");
    const FrameCurvature fc = frame_curvature(iso, {6.0, 6.0, 6.0});
    CHECK(fc.scalar == doctest::Approx(-1.0).epsilon(1e-15));
    for (int i = 0; i < 3; ++i) CHECK(fc.ricci[i] == doctest::Approx(fc.scalar / 3.0 * 6.0).epsilon(1e-15));
    CHECK(fc.traceless_norm2 < 1e-30);
    CHECK_THROWS_AS(HomogeneousModel::named("bianchi-vi"), ConfigError);
}

TEST_CASE("classical nil flow: unit volume, increasing scalar curvature") {
    const HomogeneousModel nil = HomogeneousModel::named("nil");
    const auto cl = classical_flow(nil, {1.0, 1.0, 1.0}, 20.0);
    REQUIRE(cl.size() > 10);
    for (std::size_t q = 1; q < cl.size(); ++q) {
        CHECK(cl[q].scalar > cl[q - 1].scalar);
        CHECK(cl[q].s > cl[q - 1].s);
        CHECK(std::abs(cl[q].volume - cl[0].volume) <= 1e-8 * cl[0].volume);
    }
}

TEST_CASE("transform lands on R = -1 with vol = |R|^(3/2)") {
    const HomogeneousModel nil = HomogeneousModel::named("nil");
    const auto cl = classical_flow(nil, {1.0, 1.0, 1.0}, 20.0);
    std::vector<double> s;
    for (double v = 0.0; v <= 0.7; v += 0.05) s.push_back(v);
    const auto tr = transform(nil, cl, s);
    for (const auto& c : tr) {
        CHECK(std::abs(c.scalar + 1.0) <= 1e-8);
        if (c.t <= 0.0) continue;
        // Classical curvature at t(s) from a separate integration that ends there.
        const double r = classical_flow(nil, {1.0, 1.0, 1.0}, c.t).back().scalar;
        CHECK(std::abs(std::pow(-r, 1.5) - c.volume) <= 1e-8 * c.volume);
    }
    for (std::size_t q = 1; q < tr.size(); ++q) CHECK(tr[q].t > tr[q - 1].t);

    std::vector<ClassicalSample> bad = cl;
    bad[3].scalar = 0.1;
    CHECK_THROWS_AS(transform(nil, bad, s), NonNegativeScalarCurvature);
}

TEST_CASE("direct conformal flow matches the transform with renormalization") {
    const HomogeneousModel nil = HomogeneousModel::named("nil");
    const auto cl = classical_flow(nil, {1.0, 1.0, 1.0}, 20.0);
    std::vector<double> s;
    for (double v = 0.0; v <= 0.7; v += 0.05) s.push_back(v);
    const auto tr = transform(nil, cl, s);
    const auto direct = conformal_flow_direct(nil, normalize_scalar(nil, {1.0, 1.0, 1.0}), s, {}, true);
    REQUIRE(direct.size() == tr.size());
    for (std::size_t q = 0; q < tr.size(); ++q) {
        const auto a = direct[q].state.abc(), b = tr[q].state.abc();
        for (int i = 0; i < 3; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-6 * b[i]);
        CHECK(direct[q].pressure > 0.0);
    }
    CHECK_THROWS_AS(conformal_flow_direct(nil, {1.0, 1.0, 1.0}, s), ConfigError);
}

TEST_CASE("isotropic equilibrium is fixed") {
    const HomogeneousModel iso = HomogeneousModel::named("isotropic");
    const auto out = conformal_flow_direct(iso, {6.0, 6.0, 6.0}, {0.0, 2.5, 5.0, 10.0});
    for (const auto& c : out) {
        for (double v : c.state.abc()) CHECK(std::abs(v - 6.0) <= 1e-10 * 6.0);
        CHECK(std::abs(c.pressure) <= 1e-12);
    }
}
