#include "crflow/elliptic.hpp"

#include <algorithm>
#include <cmath>

#include "crflow/krylov.hpp"
#include "crflow/operators.hpp"
#include "crflow/parallel.hpp"
#include "crflow/spectral.hpp"

namespace crflow {

namespace {

KrylovOptions krylov_options(const EllipticConfig& cfg) {
    KrylovOptions o;
    o.tolerance = cfg.tolerance;
    o.max_iterations = cfg.max_iterations;
    o.restart = cfg.gmres_restart;
    return o;
}

bool is_constant(const ScalarField& f) {
    return std::all_of(f.data.begin(), f.data.end(), [&](double v) { return v == f.data.front(); });
}

double mean(const std::vector<double>& v) {
    return reduce_sum(v.size(), [&](std::size_t i) { return v[i]; }) / static_cast<double>(v.size());
}

/// Means of sqrt(g) g^ab (slot order) and of sqrt(g) V.
struct FrozenCoefficients {
    Sym3 w;
    double v = 0.0;
};

FrozenCoefficients freeze(const Geometry& geo, const ScalarField* V, bool densitize) {
    FrozenCoefficients fc;
    const std::size_t n = geo.density.size();
    for (int s = 0; s < 6; ++s)
        fc.w.c[s] = reduce_sum(n, [&](std::size_t i) {
                        return (densitize ? geo.density[i] : 1.0) * geo.inverse[i].c[s];
                    }) / static_cast<double>(n);
    if (V)
        fc.v = reduce_sum(n, [&](std::size_t i) { return (densitize ? geo.density[i] : 1.0) * (*V)[i]; }) /
               static_cast<double>(n);
    return fc;
}

double quadratic(const Sym3& w, double sx, double sy, double sz) {
    return w(0, 0) * sx * sx + w(1, 1) * sy * sy + w(2, 2) * sz * sz +
           2.0 * (w(0, 1) * sx * sy + w(0, 2) * sx * sz + w(1, 2) * sy * sz);
}

ScalarField helmholtz(const Geometry& geo, double alpha, const ScalarField& V, const ScalarField& x) {
    ScalarField out = laplacian(geo, x);
    for_each_index(out.size(), [&](std::size_t i) { out[i] = alpha * out[i] + V[i] * x[i]; });
    return out;
}

}  // namespace

ScalarField apply_L(const Geometry& geo, const ScalarField& phi, bool use_constraint) {
    ScalarField out = laplacian(geo, phi);
    for_each_index(out.size(), [&](std::size_t i) {
        const double v = use_constraint ? 1.0 : -geo.curvature.scalar[i];
        out[i] = 2.0 * out[i] + v * phi[i];
    });
    return out;
}

SolveReport solve_helmholtz(const Geometry& geo, double alpha, const ScalarField& V, const ScalarField& f,
                            ScalarField& x, const EllipticConfig& cfg) {
    const Grid& grid = geo.grid();
    LinearMap apply = [&](const Vector& in, Vector& out) {
        ScalarField xin(grid);
        xin.data = in;
        out = helmholtz(geo, alpha, V, xin).data;
    };

    LinearMap precond;
    std::unique_ptr<FourierMultiplier> fm;
    std::vector<double> diag;
    switch (cfg.preconditioner) {
        case Preconditioner::none:
            precond = [](const Vector& in, Vector& out) { out = in; };
            break;
        case Preconditioner::diagonal: {
            const StencilCoeffs st = StencilCoeffs::of(grid);
            const double c = 2.0 * (st.c1 * st.c1 + st.c2 * st.c2);
            diag.resize(grid.size());
            for_each_index(diag.size(), [&](std::size_t i) {
                double d = V[i];
                for (int a = 0; a < 3; ++a) d += alpha * c * geo.inverse[i](a, a) * st.inv_h[a] * st.inv_h[a];
                diag[i] = d;
            });
            precond = [&diag](const Vector& in, Vector& out) {
                out.resize(in.size());
                for_each_index(in.size(), [&](std::size_t i) { out[i] = in[i] / diag[i]; });
            };
            break;
        }
        case Preconditioner::spectral: {
            const FrozenCoefficients fc = freeze(geo, &V, true);
            const double v0 = std::max(std::abs(fc.v), 1e-8);
            fm = std::make_unique<FourierMultiplier>(grid, [&](double sx, double sy, double sz) {
                return 1.0 / (alpha * quadratic(fc.w, sx, sy, sz) + v0);
            });
            precond = [&geo, &fm](const Vector& in, Vector& out) {
                Vector d(in.size());
                for_each_index(in.size(), [&](std::size_t i) { d[i] = geo.density[i] * in[i]; });
                fm->apply(d, out);
            };
            break;
        }
    }
    return pcg(apply, precond, geo.density.data, f.data, x.data, krylov_options(cfg));
}

std::pair<ScalarField, SolveReport> solve_L(const Geometry& geo, const ScalarField& f, const EllipticConfig& cfg) {
    SolveReport rep;
    if (is_constant(f)) {
        rep.converged = true;
        return {f, rep};
    }
    ScalarField x(geo.grid());
    rep = solve_helmholtz(geo, 2.0, ScalarField(geo.grid(), 1.0), f, x, cfg);
    return {std::move(x), rep};
}

std::pair<ScalarField, SolveReport> solve_L(const MetricField& g, const ScalarField& f, const EllipticConfig& cfg) {
    return solve_L(make_geometry(g), f, cfg);
}

std::pair<ScalarField, SolveReport> solve_L_general(const Geometry& geo, const ScalarField& f,
                                                    const EllipticConfig& cfg) {
    const Grid& grid = geo.grid();
    ScalarField V(grid);
    for_each_index(V.size(), [&](std::size_t i) { V[i] = -geo.curvature.scalar[i]; });
    ScalarField x(grid);
    if (min_value(V) > 0.0) return {x, solve_helmholtz(geo, 2.0, V, f, x, cfg)};

    const FrozenCoefficients fc = freeze(geo, nullptr, false);
    FourierMultiplier fm(grid, [&](double sx, double sy, double sz) {
        return 1.0 / (2.0 * quadratic(fc.w, sx, sy, sz) + 1.0);
    });
    LinearMap apply = [&](const Vector& in, Vector& out) {
        ScalarField xin(grid);
        xin.data = in;
        out = apply_L(geo, xin, false).data;
    };
    LinearMap precond = [&](const Vector& in, Vector& out) { fm.apply(in, out); };
    const SolveReport rep = gmres(apply, precond, geo.density.data, f.data, x.data, krylov_options(cfg));
    return {std::move(x), rep};
}

PressureResult pressure(const Geometry& geo, const EllipticConfig& cfg) {
    const Grid& grid = geo.grid();
    const auto& cb = geo.curvature;
    PressureResult res;
    res.drift = reduce_max(grid.size(), [&](std::size_t i) { return std::abs(1.0 + cb.scalar[i]); });
    if (res.drift > cfg.drift_abort)
        throw ConstraintBlowup("constraint drift max|1+R| = " + detail::sci(res.drift) + " exceeds the abort threshold",
                               res.drift);
    res.drift_warning = res.drift > cfg.drift_warn;

    ScalarField f(grid);
    for_each_index(f.size(), [&](std::size_t i) {
        const Sym3 rt = cb.ricci[i] - (cb.scalar[i] / 3.0) * geo.metric[i];
        f[i] = contract(geo.inverse[i], rt, rt) + (cb.scalar[i] * cb.scalar[i] - 1.0) / 3.0;
    });
    auto [q, rep] = solve_L(geo, f, cfg);
    res.report = rep;
    res.p = ScalarField(grid);
    for_each_index(f.size(), [&](std::size_t i) { res.p[i] = 2.0 * q[i]; });

    std::size_t worst = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (res.p[i] < res.p[worst]) worst = i;
    if (res.p[worst] < -10.0 * cfg.tolerance) throw NegativePressure(worst, res.p[worst]);
    return res;
}

PressureResult pressure(const MetricField& g, const EllipticConfig& cfg) { return pressure(make_geometry(g), cfg); }

std::pair<ScalarField, SolveReport> solve_DRDRstar(const Geometry& geo, const ScalarField& f,
                                                   const EllipticConfig& cfg) {
    const Grid& grid = geo.grid();
    const auto& cb = geo.curvature;
    const FrozenCoefficients fc = freeze(geo, nullptr, false);
    const double rbar = mean(cb.scalar.data);
    std::vector<double> ric2(grid.size());
    for_each_index(ric2.size(), [&](std::size_t i) { ric2[i] = contract(geo.inverse[i], cb.ricci[i], cb.ricci[i]); });
    const double c0 = std::max(mean(ric2), 1e-6);
    FourierMultiplier fm(grid, [&](double sx, double sy, double sz) {
        const double q = quadratic(fc.w, sx, sy, sz);
        return 1.0 / (2.0 * q * q + 2.0 * std::abs(rbar) * q + c0);
    });
    LinearMap apply = [&](const Vector& in, Vector& out) {
        ScalarField xin(grid);
        xin.data = in;
        out = linearized_R(geo, adjoint_linearized_R(geo, xin)).data;
    };
    LinearMap precond = cfg.preconditioner == Preconditioner::none
                            ? LinearMap([](const Vector& in, Vector& out) { out = in; })
                            : LinearMap([&](const Vector& in, Vector& out) { fm.apply(in, out); });
    ScalarField x(grid);
    const SolveReport rep = gmres(apply, precond, geo.density.data, f.data, x.data, krylov_options(cfg));
    return {std::move(x), rep};
}

std::pair<ScalarField, SolveReport> solve_DRDRstar(const MetricField& g, const ScalarField& f,
                                                   const EllipticConfig& cfg) {
    return solve_DRDRstar(make_geometry(g), f, cfg);
}

namespace {

double constraint_defect(const Geometry& geo) {
    return reduce_max(geo.density.size(), [&](std::size_t i) { return std::abs(1.0 + geo.curvature.scalar[i]); });
}

ScalarField defect_field(const Geometry& geo) {
    ScalarField d(geo.grid());
    for_each_index(d.size(), [&](std::size_t i) { d[i] = 1.0 + geo.curvature.scalar[i]; });
    return d;
}

/// 8 Delta u + R u + u^5.
ScalarField yamabe_residual(const Geometry& geo, const ScalarField& u) {
    ScalarField out = laplacian(geo, u);
    for_each_index(out.size(), [&](std::size_t i) {
        const double u2 = u[i] * u[i];
        out[i] = 8.0 * out[i] + geo.curvature.scalar[i] * u[i] + u2 * u2 * u[i];
    });
    return out;
}

double weighted_norm(const Geometry& geo, const ScalarField& f) {
    return std::sqrt(weighted_dot(geo.density.data, f.data, f.data));
}

/// Lowest eigenpair of 8 Delta + R by shifted inverse iteration.
std::pair<double, ScalarField> ground_state(const Geometry& geo, const EllipticConfig& cfg) {
    const Grid& grid = geo.grid();
    const double shift = min_value(geo.curvature.scalar) - 1.0;
    ScalarField V(grid);
    for_each_index(V.size(), [&](std::size_t i) { V[i] = geo.curvature.scalar[i] - shift; });
    ScalarField x(grid, 1.0);
    double lambda = 0.0;
    for (int it = 0; it < 100; ++it) {
        ScalarField y = x;
        solve_helmholtz(geo, 8.0, V, x, y, cfg);
        const double nrm = weighted_norm(geo, y);
        for_each_index(y.size(), [&](std::size_t i) { y[i] /= nrm; });
        const ScalarField ay = helmholtz(geo, 8.0, V, y);
        const double next = weighted_dot(geo.density.data, ay.data, y.data) + shift;
        x = std::move(y);
        const bool done = it > 0 && std::abs(next - lambda) <= 1e-12 * std::max(1.0, std::abs(next));
        lambda = next;
        if (done) break;
    }
    if (reduce_sum(x.size(), [&](std::size_t i) { return x[i]; }) < 0.0)
        for (double& v : x.data) v = -v;
    return {lambda, x};
}

}  // namespace

YamabeResult yamabe_normalize(const MetricField& g, const EllipticConfig& cfg) {
    const Grid& grid = g.grid;
    YamabeResult res;
    res.u = ScalarField(grid, 1.0);
    Geometry geo = make_geometry(g);
    res.constraint_residual = constraint_defect(geo);
    if (res.constraint_residual <= cfg.constraint_tolerance) {
        res.report.converged = true;
        res.metric = g;
        res.geometry = std::move(geo);
        return res;
    }

    auto [lambda, phi] = ground_state(geo, cfg);
    if (lambda >= -cfg.tolerance)
        throw WrongYamabeSign("lowest eigenvalue of the conformal Laplacian is " + detail::sci(lambda) +
                              "; the conformal class has nonnegative Yamabe constant");
    const double top = max_value(phi);
    for (double& v : phi.data) v = std::max(v, 1e-3 * top);
    double p2 = 0.0, p6 = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double w = geo.density[i] * phi[i] * phi[i];
        p2 += w;
        p6 += w * phi[i] * phi[i] * phi[i] * phi[i];
    }
    const double c = std::pow(-lambda * p2 / p6, 0.25);
    ScalarField u(grid);
    for_each_index(u.size(), [&](std::size_t i) { u[i] = c * phi[i]; });

    ScalarField F = yamabe_residual(geo, u);
    double fnorm = weighted_norm(geo, F);
    for (res.newton_iterations = 0; res.newton_iterations < cfg.newton_max_iterations; ++res.newton_iterations) {
        const double rel = reduce_max(u.size(), [&](std::size_t i) { return std::abs(F[i]) / std::pow(u[i], 5); });
        if (rel <= 1e-11) break;
        ScalarField V(grid);
        for_each_index(V.size(), [&](std::size_t i) {
            const double u2 = u[i] * u[i];
            V[i] = geo.curvature.scalar[i] + 5.0 * u2 * u2;
        });
        ScalarField rhs(grid);
        for_each_index(rhs.size(), [&](std::size_t i) { rhs[i] = -F[i]; });
        ScalarField delta(grid);
        res.report = solve_helmholtz(geo, 8.0, V, rhs, delta, cfg);

        const double floor = 0.1 * min_value(u);
        double t = 1.0;
        ScalarField trial(grid);
        ScalarField Ft;
        double tnorm = 0.0;
        for (;;) {
            for_each_index(u.size(), [&](std::size_t i) { trial[i] = std::max(u[i] + t * delta[i], floor); });
            Ft = yamabe_residual(geo, trial);
            tnorm = weighted_norm(geo, Ft);
            if (tnorm <= (1.0 - 1e-4 * t) * fnorm || t < 1.0 / 64.0) break;
            t *= 0.5;
        }
        if (tnorm >= fnorm) break;
        u = std::move(trial);
        F = std::move(Ft);
        fnorm = tnorm;
        if (min_value(u) < 1e-8 * max_value(u))
            throw WrongYamabeSign("conformal factor collapsed toward zero during normalization");
    }

    MetricField gcur(grid);
    for_each_index(gcur.size(), [&](std::size_t i) {
        const double u2 = u[i] * u[i];
        gcur[i] = (u2 * u2) * g[i];
    });
    geo = make_geometry(gcur);
    ScalarField d = defect_field(geo);
    double dnorm = weighted_norm(geo, d);
    double defect = max_abs(d);
    // Newton on the discrete constraint. The operator 2 Delta - R is the
    // linearization of the continuum map w -> R(e^w g); the discrete curvature
    // differs from it at O(h^2), which stalls plain Newton on rough modes, so
    // once the cheap steps stop paying the Jacobian is applied by differencing
    // the curvature kernel, with 2 Delta - R as preconditioner.
    bool exact_jacobian = false;
    for (res.correction_iterations = 0; res.correction_iterations < 40 && defect > cfg.constraint_tolerance;
         ++res.correction_iterations) {
        ScalarField rhs(grid);
        for_each_index(rhs.size(), [&](std::size_t i) { rhs[i] = -d[i]; });
        ScalarField w(grid);
        if (!exact_jacobian) {
            auto solved = solve_L_general(geo, rhs, cfg);
            w = std::move(solved.first);
            res.report = solved.second;
        } else {
            EllipticConfig inner = cfg;
            inner.tolerance = std::max(cfg.tolerance, 1e-9);
            LinearMap jac = [&](const Vector& in, Vector& out) {
                double vmax = 0.0;
                for (double v : in) vmax = std::max(vmax, std::abs(v));
                out.assign(in.size(), 0.0);
                if (vmax == 0.0) return;
                const double eps = 1e-7 / vmax;
                MetricField moved(grid);
                for_each_index(moved.size(), [&](std::size_t i) { moved[i] = std::exp(eps * in[i]) * gcur[i]; });
                const Geometry mg = make_geometry(moved);
                for_each_index(out.size(), [&](std::size_t i) {
                    out[i] = (mg.curvature.scalar[i] - geo.curvature.scalar[i]) / eps;
                });
            };
            LinearMap pre = [&](const Vector& in, Vector& out) {
                ScalarField f(grid);
                f.data = in;
                out = solve_L_general(geo, f, inner).first.data;
            };
            KrylovOptions ko;
            ko.tolerance = std::max(1e-3 * defect, 1e-6);
            ko.max_iterations = 60;
            ko.restart = 30;
            try {
                res.report = gmres(jac, pre, geo.density.data, rhs.data, w.data, ko);
            } catch (const SolverError&) {
                // keep whatever partial step GMRES produced
            }
        }
        double t = 1.0;
        bool accepted = false;
        for (int k = 0; k < 6; ++k, t *= 0.5) {
            MetricField trial(grid);
            for_each_index(trial.size(), [&](std::size_t i) { trial[i] = std::exp(t * w[i]) * gcur[i]; });
            Geometry tgeo = make_geometry(trial);
            ScalarField td = defect_field(tgeo);
            const double tn = weighted_norm(tgeo, td);
            if (tn < dnorm) {
                for_each_index(u.size(), [&](std::size_t i) { u[i] *= std::exp(0.25 * t * w[i]); });
                gcur = std::move(trial);
                geo = std::move(tgeo);
                d = std::move(td);
                if (tn > 0.25 * dnorm) exact_jacobian = true;
                dnorm = tn;
                defect = max_abs(d);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (exact_jacobian) break;
            exact_jacobian = true;
        }
    }
    res.constraint_residual = defect;
    if (defect > cfg.constraint_tolerance)
        throw NotConverged("Yamabe normalization missed the constraint tolerance",
                           SolveReport{res.newton_iterations + res.correction_iterations, defect, false});
    res.metric = std::move(gcur);
    res.u = std::move(u);
    res.geometry = std::move(geo);
    return res;
}

}  // namespace crflow
