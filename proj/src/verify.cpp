#include "crflow/verify.hpp"

#include <cmath>
#include <cstdio>

#include "crflow/geometry.hpp"
#include "crflow/operators.hpp"
#include "crflow/presets.hpp"

namespace crflow {

namespace {

struct Residuals {
    std::vector<std::pair<std::string, double>> algebraic, exact, differential;
};

double max_component(const CovectorField& w) {
    double m = 0.0;
    for (const auto& v : w.data)
        for (int a = 0; a < 3; ++a) m = std::max(m, std::abs(v[a]));
    return m;
}

double max_component(const SymTensorField& h) {
    double m = 0.0;
    for (const auto& s : h.data)
        for (double v : s.c) m = std::max(m, std::abs(v));
    return m;
}

// Raises one slot of a 4-index block with g^{-1}.
Block81 raise_slot(const Sym3& gi, const Block81& b, int slot) {
    Block81 out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    int id[4] = {i, j, k, l};
                    double s = 0.0;
                    for (int m = 0; m < 3; ++m) {
                        int src[4] = {i, j, k, l};
                        src[slot] = m;
                        s += gi(id[slot], m) * b[idx4(src[0], src[1], src[2], src[3])];
                    }
                    out[idx4(i, j, k, l)] = s;
                }
    return out;
}

double full_norm2(const Sym3& gi, const Block81& lowered) {
    Block81 up = lowered;
    for (int slot = 0; slot < 4; ++slot) up = raise_slot(gi, up, slot);
    double s = 0.0;
    for (std::size_t q = 0; q < 81; ++q) s += up[q] * lowered[q];
    return s;
}

Residuals evaluate(const Grid& grid, std::uint64_t seed) {
    Residuals r;
    const Geometry geo = make_geometry(random_smooth_metric(grid, seed), CurvatureDetail::full);
    const auto& cb = geo.curvature;
    const std::size_t npts = grid.size();
    const SymTensorField h = random_smooth_tensor(grid, seed + 1, 0.5);
    const ScalarField phi = random_smooth_scalar(grid, seed + 2);

    // Pointwise algebra.
    double inv = 0.0, gnorm = 0.0, ricdec = 0.0, riemdec = 0.0, contr = 0.0;
    const double ric_scale = max_component(cb.ricci);
    for (std::size_t n = 0; n < npts; ++n) {
        const Sym3& g = geo.metric[n];
        const Sym3& gi = geo.inverse[n];
        const Mat3 m = product(g, gi);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) inv = std::max(inv, std::abs(m[i][j] - (i == j ? 1.0 : 0.0)));
        gnorm = std::max(gnorm, std::abs(contract(gi, g, g) - 3.0) / 3.0);

        const double R = cb.scalar[n];
        const double ric2 = contract(gi, cb.ricci[n], cb.ricci[n]);
        const Sym3 rt = cb.ricci[n] - (R / 3.0) * g;
        ricdec = std::max(ricdec, std::abs(ric2 - contract(gi, rt, rt) - R * R / 3.0) / ric2);

        Block81 lowered{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l) {
                        double s = 0.0;
                        for (int a = 0; a < 3; ++a) s += g(i, a) * cb.riemann[n][idx4(a, j, k, l)];
                        lowered[idx4(i, j, k, l)] = s;
                    }
        const double riem2 = full_norm2(gi, lowered);
        const double weyl2 = full_norm2(gi, cb.weyl[n]);
        // n = 3: 4/(n-2) = 4 and 2/((n-1)(n-2)) = 1.
        riemdec = std::max(riemdec, std::abs(riem2 - weyl2 - 4.0 * ric2 + R * R) / (riem2 + 4.0 * ric2));

        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int a = 0; a < 3; ++a) s += cb.riemann[n][idx4(a, i, a, j)];
                contr = std::max(contr, std::abs(s - cb.ricci[n](i, j)) / ric_scale);
            }
    }
    r.algebraic = {{"inverse_metric", inv},
                   {"metric_norm", gnorm},
                   {"ricci_norm_split", ricdec},
                   {"riemann_norm_split", riemdec},
                   {"ricci_contraction", contr}};

    // Identities that the discrete operators satisfy exactly.
    {
        const SymTensorField ric = adjoint_linearized_R(geo, ScalarField(grid, -1.0));
        SymTensorField d(grid);
        for (std::size_t n = 0; n < npts; ++n) d[n] = ric[n] - cb.ricci[n];
        r.exact.emplace_back("ricci_in_adjoint_range", max_component(d) / ric_scale);

        const ScalarField lhs = linearized_R(geo, scale_metric(geo.metric, phi));
        const ScalarField lap = laplacian(geo, phi);
        double e = 0.0, s = 0.0;
        for (std::size_t n = 0; n < npts; ++n) {
            const double rhs = 2.0 * lap[n] - cb.scalar[n] * phi[n];
            e = std::max(e, std::abs(lhs[n] - rhs));
            s = std::max(s, std::abs(2.0 * lap[n]) + std::abs(cb.scalar[n] * phi[n]));
        }
        r.exact.emplace_back("conformal_linearization", e / s);
    }

    // Differential identities.
    {
        const CovectorField dric = divergence(geo, cb.ricci);
        const CovectorField dr = gradient(geo, cb.scalar);
        CovectorField res(grid);
        for (std::size_t n = 0; n < npts; ++n) res[n] = dric[n] + 0.5 * dr[n];
        r.differential.emplace_back("contracted_bianchi", max_component(res) / max_component(dr));
    }
    {
        // Fourth-order central difference in epsilon of R(g + eps h).
        const double eps = 1e-3;
        auto scalar_at = [&](double e) {
            MetricField g = geo.metric;
            for (std::size_t n = 0; n < npts; ++n) g[n] += e * h[n];
            return curvature(g, CurvatureDetail::ricci).scalar;
        };
        const ScalarField p1 = scalar_at(eps), m1 = scalar_at(-eps), p2 = scalar_at(2 * eps), m2 = scalar_at(-2 * eps);
        const ScalarField dR = linearized_R(geo, h);
        double e = 0.0;
        for (std::size_t n = 0; n < npts; ++n) {
            const double fd = (-p2[n] + 8.0 * p1[n] - 8.0 * m1[n] + m2[n]) / (12.0 * eps);
            e = std::max(e, std::abs(dR[n] - fd));
        }
        r.differential.emplace_back("linearization_vs_difference", e / max_abs(dR));
    }
    {
        const ScalarField lhs = linearized_R(geo, cb.ricci);
        const ScalarField lapR = laplacian(geo, cb.scalar);
        double e = 0.0, s = 0.0;
        for (std::size_t n = 0; n < npts; ++n) {
            const double ric2 = contract(geo.inverse[n], cb.ricci[n], cb.ricci[n]);
            e = std::max(e, std::abs(lhs[n] - 0.5 * lapR[n] + ric2));
            s = std::max(s, ric2);
        }
        r.differential.emplace_back("linearization_on_ricci", e / s);
    }
    {
        const ScalarField dRh = linearized_R(geo, h);
        const SymTensorField dRs = adjoint_linearized_R(geo, phi);
        const double defect = std::abs(inner(geo, dRh, phi) - inner(geo, h, dRs));
        r.differential.emplace_back("adjointness", defect / (norm(geo, dRh) * norm(geo, phi)));
    }
    return r;
}

const char* kind_name(IdentityKind k) {
    switch (k) {
        case IdentityKind::algebraic: return "algebraic";
        case IdentityKind::exact: return "exact";
        case IdentityKind::differential: return "differential";
    }
    return "?";
}

}  // namespace

VerifyReport run_verify(const VerifyOptions& opt) {
    const int n0 = opt.resolutions.at(0), n1 = opt.resolutions.at(1);
    auto grid_of = [&](int n) {
        Grid g = Grid::cube(n, 1.0, opt.order);
        g.convention_sign = opt.convention_sign;
        g.validate();
        return g;
    };
    const Residuals a = evaluate(grid_of(n0), opt.seed);
    const Residuals b = evaluate(grid_of(n1), opt.seed);
    const double ratio = std::log2(static_cast<double>(n1) / n0);

    VerifyReport rep;
    auto add = [&](IdentityKind kind, const auto& lhs, const auto& rhs) {
        for (std::size_t q = 0; q < lhs.size(); ++q) {
            IdentityResult r;
            r.name = lhs[q].first;
            r.kind = kind;
            r.coarse = lhs[q].second;
            r.fine = rhs[q].second;
            if (kind == IdentityKind::differential) {
                r.nominal = opt.order;
                r.tolerance = opt.order_slack;
                r.order = std::log2(r.coarse / r.fine) / ratio;
                r.passed = std::isfinite(r.order) && std::abs(r.order - r.nominal) <= r.tolerance;
            } else {
                r.tolerance = opt.algebraic_tolerance;
                r.passed = r.coarse <= r.tolerance && r.fine <= r.tolerance;
            }
            rep.passed = rep.passed && r.passed;
            rep.identities.push_back(r);
        }
    };
    add(IdentityKind::algebraic, a.algebraic, b.algebraic);
    add(IdentityKind::exact, a.exact, b.exact);
    add(IdentityKind::differential, a.differential, b.differential);
    return rep;
}

std::string VerifyReport::text() const {
    std::string out = "identity                       kind          coarse        fine          order   "
                      "target  status\n";
    char line[256];
    for (const auto& r : identities) {
        if (r.kind == IdentityKind::differential)
            std::snprintf(line, sizeof line, "%-30s %-13s %.6e  %.6e  %6.3f  %g+-%g  %s\n", r.name.c_str(),
                          kind_name(r.kind), r.coarse, r.fine, r.order, r.nominal, r.tolerance,
                          r.passed ? "PASS" : "FAIL");
        else
            std::snprintf(line, sizeof line, "%-30s %-13s %.6e  %.6e  %6s  <=%g  %s\n", r.name.c_str(),
                          kind_name(r.kind), r.coarse, r.fine, "-", r.tolerance, r.passed ? "PASS" : "FAIL");
        out += line;
    }
    out += passed ? "verify: PASS\n" : "verify: FAIL (" + failures() + ")\n";
    return out;
}

std::string VerifyReport::failures() const {
    std::string out;
    for (const auto& r : identities)
        if (!r.passed) out += (out.empty() ? "" : ", ") + r.name;
    return out;
}

}  // namespace crflow
