#include "crflow/homogeneous.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/interpolators/cubic_hermite.hpp>
#include <boost/numeric/odeint.hpp>

#include "crflow/errors.hpp"

namespace crflow {

namespace odeint = boost::numeric::odeint;

HomogeneousModel HomogeneousModel::named(const std::string& name) {
    HomogeneousModel m;
    if (name == "nil") {
        m.kind = ModelKind::nil;
        m.lambda = {0.0, 0.0, 1.0};
    } else if (name == "sol") {
        m.kind = ModelKind::sol;
        m.lambda = {1.0, -1.0, 0.0};
    } else if (name == "sl2r") {
        m.kind = ModelKind::sl2r;
        m.lambda = {-1.0, 1.0, 1.0};
    } else if (name == "isotropic" || name == "isotropic-hyperbolic") {
        m.kind = ModelKind::isotropic;
        m.lambda = {0.0, 0.0, 0.0};
    } else {
        throw ConfigError("unknown homogeneous model '" + name + "'", 0, "model");
    }
    return m;
}

std::string HomogeneousModel::name() const {
    switch (kind) {
        case ModelKind::nil: return "nil";
        case ModelKind::sol: return "sol";
        case ModelKind::sl2r: return "sl2r";
        case ModelKind::isotropic: return "isotropic";
    }
    return "?";
}

namespace {

using Table3 = std::array<std::array<std::array<double, 3>, 3>, 3>;

FrameCurvature from_orthonormal_ricci(const std::array<double, 3>& ro, const std::array<double, 3>& g) {
    FrameCurvature fc;
    fc.scalar = ro[0] + ro[1] + ro[2];
    for (int i = 0; i < 3; ++i) {
        fc.ricci[i] = g[i] * ro[i];
        fc.ricci_norm2 += ro[i] * ro[i];
    }
    fc.traceless_norm2 = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double d = ro[i] - fc.scalar / 3.0;
        fc.traceless_norm2 += d * d;
    }
    return fc;
}

}  // namespace

FrameCurvature frame_curvature(const HomogeneousModel& m, const HomogeneousState& s) {
    const std::array<double, 3> g = s.abc();
    for (double v : g)
        if (!(v > 0.0)) throw ConfigError("homogeneous metric coefficients must be positive", 0, "state");

    if (m.kind == ModelKind::isotropic) {
        // c * hyperbolic: Ric = -2 g_hyp in the frame where g_hyp = identity.
        const std::array<double, 3> ro{-2.0 / g[0], -2.0 / g[1], -2.0 / g[2]};
        FrameCurvature fc = from_orthonormal_ricci(ro, g);
        fc.sectional_min = fc.sectional_max = fc.scalar / 6.0;
        return fc;
    }

    // C[i][j][k] = <[f_i, f_j], f_k> for f_i = e_i / sqrt(g_i).
    Table3 C{};
    const int cyc[3][3] = {{1, 2, 0}, {2, 0, 1}, {0, 1, 2}};  // [e_a, e_b] = l_k e_k
    for (const auto& t : cyc) {
        const int a = t[0], b = t[1], k = t[2];
        const double v = m.lambda[k] * std::sqrt(g[k] / (g[a] * g[b]));
        C[a][b][k] = v;
        C[b][a][k] = -v;
    }
    Table3 G{};  // grad_{f_i} f_j = G[i][j][k] f_k
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) G[i][j][k] = 0.5 * (C[i][j][k] - C[j][k][i] + C[k][i][j]);

    // Rm[a][b][c][d] = <R(f_a, f_b) f_c, f_d>
    double Rm[3][3][3][3] = {};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c)
                for (int d = 0; d < 3; ++d) {
                    double v = 0.0;
                    for (int k = 0; k < 3; ++k) {
                        v += G[b][c][k] * G[a][k][d] - G[a][c][k] * G[b][k][d];
                        v -= C[a][b][k] * G[k][c][d];
                    }
                    Rm[a][b][c][d] = v;
                }
    std::array<double, 3> ro{};
    for (int b = 0; b < 3; ++b)
        for (int a = 0; a < 3; ++a) ro[b] += Rm[a][b][b][a];
    FrameCurvature fc = from_orthonormal_ricci(ro, g);
    double kmin = 1e300, kmax = -1e300;
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            const double k = Rm[a][b][b][a];
            kmin = std::min(kmin, k);
            kmax = std::max(kmax, k);
        }
    fc.sectional_min = kmin;
    fc.sectional_max = kmax;
    return fc;
}

double homogeneous_volume(const HomogeneousModel& m, const HomogeneousState& s) {
    return m.covolume * std::sqrt(s.A * s.B * s.C);
}

HomogeneousState normalize_scalar(const HomogeneousModel& m, const HomogeneousState& s) {
    const double r = std::abs(frame_curvature(m, s).scalar);
    HomogeneousState out = s;
    out.A *= r;
    out.B *= r;
    out.C *= r;
    return out;
}

namespace {

using Ode4 = std::array<double, 4>;

HomogeneousState state_of(const Ode4& x, double t) {
    HomogeneousState s;
    s.A = x[0];
    s.B = x[1];
    s.C = x[2];
    s.t = t;
    return s;
}

void check_state(const Ode4& x, double t) {
    for (int i = 0; i < 3; ++i)
        if (!std::isfinite(x[i]) || x[i] <= 0.0)
            throw OdeFailure("homogeneous metric left the positive cone at t = " + detail::sci(t));
}

struct ClassicalRhs {
    const HomogeneousModel& m;
    void operator()(const Ode4& x, Ode4& dx, double) const {
        const HomogeneousState s = state_of(x, 0.0);
        const FrameCurvature fc = frame_curvature(m, s);
        for (int i = 0; i < 3; ++i) dx[i] = -2.0 * fc.ricci[i] + (2.0 / 3.0) * fc.scalar * x[i];
        dx[3] = std::abs(fc.scalar);
    }
};

struct ConformalRhs {
    const HomogeneousModel& m;
    void operator()(const Ode4& x, Ode4& dx, double) const {
        const FrameCurvature fc = frame_curvature(m, state_of(x, 0.0));
        const double p = 2.0 * (fc.ricci_norm2 - 1.0 / 3.0);
        for (int i = 0; i < 3; ++i) dx[i] = -2.0 * fc.ricci[i] - (2.0 / 3.0 + p) * x[i];
        dx[3] = 0.0;
    }
};

Ode4 unit_volume_start(const HomogeneousModel& m, const HomogeneousState& s0) {
    const double k = std::pow(homogeneous_volume(m, s0), -2.0 / 3.0);
    return {k * s0.A, k * s0.B, k * s0.C, 0.0};
}

}  // namespace

std::vector<ClassicalSample> classical_flow(const HomogeneousModel& m, const HomogeneousState& s0, double horizon,
                                            const OdeOptions& opt) {
    Ode4 x = unit_volume_start(m, s0);
    const double vol0 = homogeneous_volume(m, state_of(x, 0.0));
    std::vector<ClassicalSample> out;
    auto observe = [&](const Ode4& y, double t) {
        check_state(y, t);
        ClassicalSample cs;
        cs.t = t;
        cs.s = y[3];
        cs.state = state_of(y, t);
        cs.scalar = frame_curvature(m, cs.state).scalar;
        cs.volume = homogeneous_volume(m, cs.state);
        if (std::abs(cs.volume - vol0) > std::max(10.0 * opt.rtol * vol0, opt.atol))
            throw OdeFailure("volume element drifted to " + detail::sci(cs.volume) + " at t = " + detail::sci(t));
        out.push_back(cs);
    };
    if (horizon <= 0.0) {
        observe(x, 0.0);
        return out;
    }
    try {
        auto stepper = odeint::make_controlled(opt.atol, opt.rtol, odeint::runge_kutta_dopri5<Ode4>());
        odeint::integrate_adaptive(stepper, ClassicalRhs{m}, x, 0.0, horizon, std::min(opt.initial_step, horizon),
                                   observe);
    } catch (const OdeFailure&) {
        throw;
    } catch (const std::exception& e) {
        throw OdeFailure(std::string("classical homogeneous flow: ") + e.what());
    }
    return out;
}

std::vector<ConformalSample> transform(const HomogeneousModel& m, const std::vector<ClassicalSample>& classical,
                                       const std::vector<double>& s_values, const OdeOptions& opt) {
    if (classical.size() < 2) throw ConfigError("transform needs at least two classical samples", 0, "classical");
    std::vector<double> ss, ts, slopes;
    for (std::size_t i = 0; i < classical.size(); ++i) {
        const ClassicalSample& c = classical[i];
        if (!(c.scalar < 0.0)) throw NonNegativeScalarCurvature(i, c.scalar);
        ss.push_back(c.s);
        ts.push_back(c.t);
        slopes.push_back(1.0 / std::abs(c.scalar));  // dt/ds
    }
    // Fritsch-Carlson limiter keeps the Hermite interpolant monotone.
    for (std::size_t i = 0; i + 1 < ss.size(); ++i) {
        const double secant = (ts[i + 1] - ts[i]) / (ss[i + 1] - ss[i]);
        const double a = slopes[i] / secant, b = slopes[i + 1] / secant;
        const double r = a * a + b * b;
        if (r > 9.0) {
            const double k = 3.0 / std::sqrt(r);
            slopes[i] = k * a * secant;
            slopes[i + 1] = k * b * secant;
        }
    }
    const double s_lo = ss.front(), s_hi = ss.back();
    boost::math::interpolators::cubic_hermite<std::vector<double>> t_of_s(std::move(ss), std::move(ts),
                                                                         std::move(slopes));

    std::vector<double> times;
    for (double s : s_values) {
        if (s < s_lo - 1e-14 || s > s_hi + 1e-12)
            throw ConfigError("requested s outside the classical trajectory", 0, "s");
        times.push_back(std::clamp(t_of_s(std::clamp(s, s_lo, s_hi)), classical.front().t, classical.back().t));
    }
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw ConfigError("s samples must be strictly increasing", 0, "s");

    // Re-run the classical flow with dense output at the interpolated times.
    const ClassicalSample& first = classical.front();
    Ode4 x{first.state.A, first.state.B, first.state.C, first.s};
    std::vector<ConformalSample> out;
    auto observe = [&](const Ode4& y, double t) {
        check_state(y, t);
        const HomogeneousState g = state_of(y, t);
        const double r = std::abs(frame_curvature(m, g).scalar);
        ConformalSample cs;
        cs.s = s_values[out.size()];
        cs.t = t;
        cs.state = g;
        cs.state.A *= r;
        cs.state.B *= r;
        cs.state.C *= r;
        cs.state.t = cs.s;
        const FrameCurvature fb = frame_curvature(m, cs.state);
        cs.scalar = fb.scalar;
        cs.pressure = 2.0 * fb.traceless_norm2;
        cs.volume = homogeneous_volume(m, cs.state);
        cs.drift = std::abs(fb.scalar + 1.0);
        out.push_back(cs);
    };
    try {
        auto stepper = odeint::make_dense_output(opt.atol, opt.rtol, odeint::runge_kutta_dopri5<Ode4>());
        bool skip_first = times.front() > first.t;
        if (skip_first) times.insert(times.begin(), first.t);
        auto obs = [&](const Ode4& y, double t) {
            if (skip_first) {
                skip_first = false;
                return;
            }
            observe(y, t);
        };
        odeint::integrate_times(stepper, ClassicalRhs{m}, x, times.begin(), times.end(), opt.initial_step, obs);
    } catch (const SolverError&) {
        throw;
    } catch (const std::exception& e) {
        throw OdeFailure(std::string("transform: ") + e.what());
    }
    return out;
}

std::vector<ConformalSample> conformal_flow_direct(const HomogeneousModel& m, const HomogeneousState& s0,
                                                   const std::vector<double>& s_values, const OdeOptions& opt,
                                                   bool renormalize, double drift_abort) {
    const FrameCurvature f0 = frame_curvature(m, s0);
    if (std::abs(f0.scalar + 1.0) > 1e-10)
        throw ConfigError("direct conformal flow needs R = -1 initially; rescale by |R| first", 0, "state");
    Ode4 x{s0.A, s0.B, s0.C, 0.0};
    double s = s0.t;
    std::vector<ConformalSample> out;
    auto sample = [&](double at) {
        check_state(x, at);
        ConformalSample cs;
        cs.s = at;
        cs.state = state_of(x, at);
        FrameCurvature fc = frame_curvature(m, cs.state);
        cs.drift = std::abs(fc.scalar + 1.0);
        if (cs.drift > drift_abort) throw ConstraintBlowup("homogeneous conformal flow left R = -1", cs.drift);
        if (renormalize) {
            cs.state = normalize_scalar(m, cs.state);
            x = {cs.state.A, cs.state.B, cs.state.C, 0.0};
            fc = frame_curvature(m, cs.state);
        }
        cs.scalar = fc.scalar;
        cs.pressure = 2.0 * (fc.ricci_norm2 - 1.0 / 3.0);
        cs.volume = homogeneous_volume(m, cs.state);
        out.push_back(cs);
    };
    try {
        for (double target : s_values) {
            if (target < s) throw ConfigError("s samples must be nondecreasing from the initial s", 0, "s");
            if (target > s) {
                auto stepper = odeint::make_controlled(opt.atol, opt.rtol, odeint::runge_kutta_dopri5<Ode4>());
                odeint::integrate_adaptive(stepper, ConformalRhs{m}, x, s, target,
                                           std::min(opt.initial_step, target - s));
                s = target;
            }
            sample(target);
        }
    } catch (const SolverError&) {
        throw;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw OdeFailure(std::string("direct conformal flow: ") + e.what());
    }
    return out;
}

MetricField embed(const Grid& grid, const HomogeneousState& s) {
    return MetricField(grid, Sym3::diagonal(s.A, s.B, s.C));
}

GeometryProvider embedded_geometry(const HomogeneousModel& m) {
    return [m](const MetricField& g) {
        const Sym3 g0 = g[0];
        for (const Sym3& v : g.data)
            for (int q = 0; q < 6; ++q)
                if (std::abs(v.c[q] - g0.c[q]) > 1e-12 * std::abs(g0.c[q]) + 1e-300)
                    throw ConfigError("embedded homogeneous state must be spatially constant", 0, "metric");
        if (g0(0, 1) != 0.0 || g0(0, 2) != 0.0 || g0(1, 2) != 0.0)
            throw ConfigError("embedded homogeneous state must be diagonal in the Milnor frame", 0, "metric");
        HomogeneousState s;
        s.A = g0(0, 0);
        s.B = g0(1, 1);
        s.C = g0(2, 2);
        const FrameCurvature fc = frame_curvature(m, s);
        return constant_geometry(g.grid, g0, Sym3::diagonal(fc.ricci[0], fc.ricci[1], fc.ricci[2]));
    };
}

FlowContext embedded_context(const HomogeneousModel& m, IntegratorConfig cfg) {
    FlowContext ctx;
    ctx.cfg = std::move(cfg);
    ctx.geometry = embedded_geometry(m);
    ctx.embedded = true;
    return ctx;
}

}  // namespace crflow
