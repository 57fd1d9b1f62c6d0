#include "crflow/flow.hpp"

#include <algorithm>
#include <cmath>

#include "crflow/operators.hpp"
#include "crflow/parallel.hpp"
#include "crflow/splittings.hpp"

namespace crflow {

GeometryProvider grid_geometry() {
    return [](const MetricField& g) { return make_geometry(g); };
}

std::vector<double> local_volumes(const Geometry& geo, const std::vector<IndexBox>& domains) {
    const Grid& grid = geo.grid();
    std::vector<double> out;
    out.reserve(domains.size());
    for (const IndexBox& b : domains) {
        for (int a = 0; a < 3; ++a)
            if (b.lo[a] < 0 || b.hi[a] > grid.n[a] || b.hi[a] <= b.lo[a])
                throw EmptyDomain("subdomain box is empty or outside the grid");
        double s = 0.0;
        for (int k = b.lo[2]; k < b.hi[2]; ++k)
            for (int j = b.lo[1]; j < b.hi[1]; ++j)
                for (int i = b.lo[0]; i < b.hi[0]; ++i) s += geo.density[grid.index(i, j, k)];
        out.push_back(s * grid.cell_volume());
    }
    return out;
}

std::vector<double> local_volumes(const FlowState& s, const std::vector<IndexBox>& domains) {
    return local_volumes(s.geometry, domains);
}

namespace {

void fill_record(FlowState& s, const FlowContext& ctx) {
    const Geometry& geo = s.geometry;
    const auto& cb = geo.curvature;
    DiagnosticRecord& r = s.record;
    r.step = s.step;
    r.t = s.t;
    r.volume = volume(geo);
    r.r_min = min_value(cb.scalar);
    r.r_max = max_value(cb.scalar);
    r.p_min = min_value(s.pressure);
    r.p_max = max_value(s.pressure);
    const ScalarField rt2 = dot(geo, traceless_ricci(geo), traceless_ricci(geo));
    r.ricT2_min = min_value(rt2);
    r.ricT2_max = max_value(rt2);
    r.drift = reduce_max(cb.scalar.size(), [&](std::size_t i) { return std::abs(1.0 + cb.scalar[i]); });
    r.yamabe = yamabe_functional(geo);
    r.local_volumes = ctx.cfg.domains.empty() ? std::vector<double>{} : local_volumes(geo, ctx.cfg.domains);
    const double tol = 10.0 * ctx.cfg.elliptic.tolerance;
    r.static_state = std::max(std::abs(r.p_min), std::abs(r.p_max)) <= tol && r.ricT2_max <= tol;
}

void refresh_pressure(FlowState& s, const FlowContext& ctx) {
    s.pressure = pressure(s.geometry, ctx.cfg.elliptic).p;
    s.pressure_current = true;
}

bool positive_everywhere(const MetricField& g) {
    return std::all_of(g.data.begin(), g.data.end(), [](const Sym3& m) { return is_positive_definite(m); });
}

MetricField add_scaled(const MetricField& g, double s, const SymTensorField& v) {
    MetricField out(g.grid);
    for_each_index(out.size(), [&](std::size_t i) { out[i] = g[i] + s * v[i]; });
    if (!positive_everywhere(out)) throw StepRejected("curvature substep left the cone of positive definite metrics");
    return out;
}

/// L_W g with W^k = g^ij Gamma^k_ij, trace replaced by 2 div W in
/// conservative form so that the gauge term leaves the total volume alone.
SymTensorField deturck_term(const Geometry& geo) {
    const Grid& grid = geo.grid();
    const StencilCoeffs st = StencilCoeffs::of(grid);
    const auto& gam = geo.curvature.christoffel;
    CovectorField wlow(grid);
    Field<Vec3> flux(grid);
    for_each_index(wlow.size(), [&](std::size_t n) {
        Vec3 wup;
        for (int k = 0; k < 3; ++k) wup[k] = trace(geo.inverse[n], gam[n][k]);
        wlow[n] = lower(geo.metric[n], wup);
        flux[n] = geo.density[n] * wup;
    });
    SymTensorField out(grid);
    for_each_point(grid, [&](const PointIndex& p) {
        const std::size_t n = p.idx;
        std::array<Vec3, 3> dw;
        double div = 0.0;
        for (int a = 0; a < 3; ++a) {
            dw[a] = diff(wlow.data, p, a, st);
            div += diff(flux.data, p, a, st)[a];
        }
        div /= geo.density[n];
        Sym3 l;
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                double v = dw[i][j] + dw[j][i];
                for (int m = 0; m < 3; ++m) v -= 2.0 * gam[n][m](i, j) * wlow[n][m];
                l(i, j) = v;
            }
        const double tr = trace(geo.inverse[n], l);
        out[n] = l + ((2.0 * div - tr) / 3.0) * geo.metric[n];
    });
    return out;
}

double max_norm2(const Geometry& geo, const SymTensorField& v) {
    return reduce_max(v.size(), [&](std::size_t i) { return contract(geo.inverse[i], v[i], v[i]); });
}

}  // namespace

SymTensorField ricci_velocity(const Geometry& geo, Pairing pairing, bool deturck) {
    SymTensorField v(geo.grid());
    const double c = pairing == Pairing::A ? 2.0 / 3.0 : 0.0;
    for_each_index(v.size(), [&](std::size_t i) { v[i] = -2.0 * geo.curvature.ricci[i] - c * geo.metric[i]; });
    if (deturck) {
        const SymTensorField l = deturck_term(geo);
        for_each_index(v.size(), [&](std::size_t i) { v[i] += l[i]; });
    }
    return v;
}

FlowState make_flow_state(const MetricField& g, const FlowContext& ctx, double t) {
    FlowState s;
    s.t = t;
    s.metric = g;
    s.geometry = ctx.geometry(g);
    refresh_pressure(s, ctx);
    fill_record(s, ctx);
    return s;
}

FlowState conformal_substep(const FlowState& s, double dt, Pairing pairing, const FlowContext& ctx) {
    const double shift = pairing == Pairing::A ? 0.0 : 2.0 / 3.0;
    FlowState out;
    out.t = s.t;
    out.step = s.step;
    out.metric = MetricField(s.metric.grid);
    for_each_index(out.metric.size(), [&](std::size_t i) {
        out.metric[i] = std::exp(-(s.pressure[i] + shift) * dt) * s.metric[i];
    });
    out.geometry = ctx.geometry(out.metric);
    out.record = s.record;
    return out;
}

FlowState ricci_substep(const FlowState& s, double dt, Pairing pairing, bool deturck, const FlowContext& ctx) {
    const MetricField& g = s.metric;
    FlowState out;
    out.t = s.t;
    out.step = s.step;
    out.record = s.record;
    const SymTensorField k1 = ricci_velocity(s.geometry, pairing, deturck);
    double vmax = max_norm2(s.geometry, k1);
    if (ctx.cfg.method == StepMethod::rk4) {
        const MetricField g2 = add_scaled(g, 0.5 * dt, k1);
        const Geometry geo2 = ctx.geometry(g2);
        const SymTensorField k2 = ricci_velocity(geo2, pairing, deturck);
        const MetricField g3 = add_scaled(g, 0.5 * dt, k2);
        const Geometry geo3 = ctx.geometry(g3);
        const SymTensorField k3 = ricci_velocity(geo3, pairing, deturck);
        const MetricField g4 = add_scaled(g, dt, k3);
        const Geometry geo4 = ctx.geometry(g4);
        const SymTensorField k4 = ricci_velocity(geo4, pairing, deturck);
        vmax = std::max({vmax, max_norm2(geo2, k2), max_norm2(geo3, k3), max_norm2(geo4, k4)});
        SymTensorField incr(g.grid);
        for_each_index(incr.size(), [&](std::size_t i) { incr[i] = (1.0 / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]); });
        out.metric = add_scaled(g, dt, incr);
    } else {
        out.metric = add_scaled(g, dt, k1);
    }
    out.geometry = ctx.geometry(out.metric);
    out.record.velocity_norm2_max = vmax;
    return out;
}

double cfl_step(const FlowState& s, const IntegratorConfig& cfg) {
    const Grid& grid = s.metric.grid;
    const double lmax = reduce_max(s.metric.size(), [&](std::size_t i) { return 1.0 / eigenvalues(s.metric[i])[0]; });
    const double h = grid.min_spacing();
    return cfg.cfl_safety * h * h / (6.0 * lmax);
}

namespace {

void normalize_state(FlowState& s, const FlowContext& ctx) {
    if (ctx.embedded) {
        const double scale = -s.geometry.curvature.scalar[0];
        for_each_index(s.metric.size(), [&](std::size_t i) { s.metric[i] = scale * s.metric[i]; });
    } else {
        s.metric = yamabe_normalize(s.metric, ctx.cfg.elliptic).metric;
    }
    s.geometry = ctx.geometry(s.metric);
}

double drift_of(const Geometry& geo) {
    return reduce_max(geo.density.size(), [&](std::size_t i) { return std::abs(1.0 + geo.curvature.scalar[i]); });
}

}  // namespace

FlowState step(const FlowState& s, const FlowContext& ctx) {
    const IntegratorConfig& cfg = ctx.cfg;
    double dt = cfg.dt > 0.0 ? cfg.dt : cfl_step(s, cfg);
    FlowState next;
    int retries = 0;
    for (;;) {
        try {
            if (cfg.scheme == Scheme::lie_trotter) {
                next = ricci_substep(conformal_substep(s, dt, cfg.pairing, ctx), dt, cfg.pairing, cfg.deturck, ctx);
            } else {
                FlowState mid = ricci_substep(conformal_substep(s, 0.5 * dt, cfg.pairing, ctx), dt, cfg.pairing,
                                              cfg.deturck, ctx);
                refresh_pressure(mid, ctx);
                const double vmax = mid.record.velocity_norm2_max;
                next = conformal_substep(mid, 0.5 * dt, cfg.pairing, ctx);
                next.record.velocity_norm2_max = vmax;
            }
            break;
        } catch (const StepRejected&) {
            if (++retries > cfg.max_retries) throw;
            dt *= 0.5;
        }
    }
    next.t = s.t + dt;
    next.step = s.step + 1;
    const double vmax = next.record.velocity_norm2_max;
    const double vol_flow = volume(next.geometry);

    bool reprojected = false;
    if (cfg.reprojection_cadence > 0) {
        const bool due = next.step % cfg.reprojection_cadence == 0;
        if (due || drift_of(next.geometry) > cfg.elliptic.drift_abort) {
            normalize_state(next, ctx);
            reprojected = true;
        }
    }
    refresh_pressure(next, ctx);
    fill_record(next, ctx);

    DiagnosticRecord& r = next.record;
    r.dt = dt;
    r.retries = retries;
    r.reprojected = reprojected;
    r.velocity_norm2_max = vmax;
    r.dvol_dt_measured = (vol_flow - s.record.volume) / dt;
    const double int_prev = integrate(s.geometry, s.pressure);
    const double int_next = integrate(next.geometry, next.pressure);
    r.dvol_dt_predicted = -1.5 * 0.5 * (int_prev + int_next);
    const double pmax = std::max(std::abs(s.record.p_max), std::abs(r.p_max)) + (cfg.pairing == Pairing::B ? 2.0 / 3.0 : 0.0);
    r.dvol_dt_tolerance = 10.0 * dt * s.record.volume * (1.125 * pmax * pmax + 0.25 * vmax);
    return next;
}

std::vector<DiagnosticRecord> run_conformal(const MetricField& g0, const FlowContext& ctx, double horizon,
                                            const std::function<void(const FlowState&)>& on_state) {
    FlowState s;
    s.metric = g0;
    s.geometry = ctx.geometry(g0);
    if (drift_of(s.geometry) > ctx.cfg.elliptic.constraint_tolerance) normalize_state(s, ctx);
    s = make_flow_state(s.metric, ctx, 0.0);
    std::vector<DiagnosticRecord> out{s.record};
    if (on_state) on_state(s);
    FlowContext local = ctx;
    while (s.t < horizon * (1.0 - 1e-12)) {
        const double dt = ctx.cfg.dt > 0.0 ? ctx.cfg.dt : cfl_step(s, ctx.cfg);
        local.cfg.dt = std::min(dt, horizon - s.t);
        s = step(s, local);
        out.push_back(s.record);
        if (on_state) on_state(s);
    }
    return out;
}

std::vector<ClassicalRecord> run_classical(const MetricField& g0, const FlowContext& ctx, double horizon,
                                           const std::function<void(double, const MetricField&)>& on_state) {
    const IntegratorConfig& cfg = ctx.cfg;
    MetricField g = g0;
    {
        const double v = volume(ctx.geometry(g));
        const double scale = std::pow(v, -2.0 / 3.0);
        for_each_index(g.size(), [&](std::size_t i) { g[i] = scale * g[i]; });
    }
    auto velocity = [&](const Geometry& geo) {
        SymTensorField v = ricci_velocity(geo, Pairing::B, cfg.deturck);
        const double rbar = integrate(geo, geo.curvature.scalar) / volume(geo);
        for_each_index(v.size(), [&](std::size_t i) { v[i] += (2.0 / 3.0) * rbar * geo.metric[i]; });
        return v;
    };
    auto record = [&](int n, double t, const Geometry& geo, const ClassicalRecord* prev) {
        ClassicalRecord r;
        r.step = n;
        r.t = t;
        r.volume = volume(geo);
        r.volume_defect = r.volume - 1.0;
        r.r_min = min_value(geo.curvature.scalar);
        r.r_max = max_value(geo.curvature.scalar);
        r.r_mean = integrate(geo, geo.curvature.scalar) / r.volume;
        r.r_min_decreased = prev && prev->r_min <= 0.0 && r.r_min < prev->r_min;
        return r;
    };

    Geometry geo = ctx.geometry(g);
    std::vector<ClassicalRecord> out{record(0, 0.0, geo, nullptr)};
    if (on_state) on_state(0.0, g);
    double t = 0.0;
    int n = 0;
    while (t < horizon * (1.0 - 1e-12)) {
        FlowState probe;
        probe.metric = g;
        double dt = std::min(cfg.dt > 0.0 ? cfg.dt : cfl_step(probe, cfg), horizon - t);
        for (int retries = 0;; ++retries) {
            try {
                const SymTensorField k1 = velocity(geo);
                if (cfg.method == StepMethod::rk4) {
                    const SymTensorField k2 = velocity(ctx.geometry(add_scaled(g, 0.5 * dt, k1)));
                    const SymTensorField k3 = velocity(ctx.geometry(add_scaled(g, 0.5 * dt, k2)));
                    const SymTensorField k4 = velocity(ctx.geometry(add_scaled(g, dt, k3)));
                    SymTensorField incr(g.grid);
                    for_each_index(incr.size(), [&](std::size_t i) {
                        incr[i] = (1.0 / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                    });
                    g = add_scaled(g, dt, incr);
                } else {
                    g = add_scaled(g, dt, k1);
                }
                break;
            } catch (const StepRejected&) {
                if (retries >= cfg.max_retries) throw;
                dt *= 0.5;
            }
        }
        t += dt;
        ++n;
        geo = ctx.geometry(g);
        out.push_back(record(n, t, geo, &out.back()));
        if (on_state) on_state(t, g);
    }
    return out;
}

}  // namespace crflow
