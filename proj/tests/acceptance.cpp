// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--only 1,3,...] [--report-only]
//
// The exit status is the number of failed criteria unless --report-only is
// given, in which case it is nonzero only if a criterion could not be run.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "crflow/commands.hpp"
#include "crflow/elliptic.hpp"
#include "crflow/errors.hpp"
#include "crflow/flow.hpp"
#include "crflow/homogeneous.hpp"
#include "crflow/operators.hpp"
#include "crflow/presets.hpp"
#include "crflow/splittings.hpp"
#include "crflow/verify.hpp"

using namespace crflow;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        detail += (detail.empty() ? "" : "; ") + what + (ok ? "" : " [fail]");
    }
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string sci(double v) { return fmt("%.3e", v); }

const std::uint64_t kSeed = 12345;

// ---------------------------------------------------------------------------

Outcome identity_suite() {
    Outcome o;
    const auto t0 = Clock::now();
    for (int order : {2, 4}) {
        VerifyOptions opt;
        opt.order = order;
        opt.seed = kSeed;
        const VerifyReport rep = run_verify(opt);
        std::printf("%s", rep.text().c_str());
        double worst_alg = 0.0, lo = 1e9, hi = -1e9;
        for (const auto& r : rep.identities) {
            if (r.kind == IdentityKind::differential) {
                lo = std::min(lo, r.order);
                hi = std::max(hi, r.order);
            } else {
                worst_alg = std::max({worst_alg, r.coarse, r.fine});
            }
        }
        o.require(rep.passed, "order " + std::to_string(order) + ": algebraic max " + sci(worst_alg) +
                                  ", observed orders " + fmt("%.2f", lo) + ".." + fmt("%.2f", hi) +
                                  (rep.passed ? "" : " (" + rep.failures() + ")"));
    }
    const double t = seconds_since(t0);
    o.require(t < 120.0, "runtime " + fmt("%.1f", t) + " s");
    return o;
}

// ---------------------------------------------------------------------------

Outcome pressure_law() {
    Outcome o;
    EllipticConfig cfg;
    for (double a : {0.6, 0.8}) {
        const YamabeResult y = yamabe_normalize(perturbed_torus(Grid::cube(16, 1.0, 4), a, 0.05), cfg);
        const PressureResult pr = pressure(y.geometry, cfg);
        const SymTensorField rt = traceless_ricci(y.geometry);
        const double lhs = integrate(y.geometry, pr.p);
        const double rhs = 2.0 * inner(y.geometry, rt, rt);
        o.require(min_value(pr.p) >= 0.0, "a=" + fmt("%.1f", a) + ": min p " + sci(min_value(pr.p)));
        o.require(std::abs(lhs - rhs) <= 1e-8 * rhs, "int p vs 2 int|Ric^T|^2 rel " + sci(std::abs(lhs - rhs) / rhs));
    }
    const Grid grid = Grid::cube(16, 1.0, 4);
    const HomogeneousModel iso = HomogeneousModel::named("isotropic");
    const Geometry eq = embedded_geometry(iso)(embed(grid, {6.0, 6.0, 6.0}));
    const PressureResult pe = pressure(eq, cfg);
    bool zero = true;
    for (double v : pe.p.data) zero = zero && v == 0.0;
    o.require(zero, "equilibrium max|p| " + sci(max_abs(pe.p)));
    return o;
}

// ---------------------------------------------------------------------------

double max_drift_unprojected(int n, double dt) {
    FlowContext ctx;
    ctx.cfg.dt = dt;
    ctx.cfg.reprojection_cadence = 0;
    ctx.cfg.elliptic.drift_abort = 10.0;
    const auto t0 = Clock::now();
    const auto rec = run_conformal(perturbed_torus(Grid::cube(n, 1.0, 4), 0.8, 0.05), ctx, 0.2);
    double d = 0.0;
    for (const auto& r : rec) d = std::max(d, r.drift);
    std::printf("  n=%d dt=%g: max|1+R| = %.4e over %zu records (%.1f s)\n", n, dt, d, rec.size(), seconds_since(t0));
    std::fflush(stdout);
    return d;
}

struct DefaultRun {
    std::vector<DiagnosticRecord> records;
    double seconds = 0.0;
};

DefaultRun default_run() {
    const Grid grid = Grid::cube(32, 1.0, 4);
    FlowContext ctx;
    ctx.cfg.domains = random_boxes(grid, 8, kSeed);
    DefaultRun out;
    const auto t0 = Clock::now();
    out.records = run_conformal(perturbed_torus(grid, 0.8, 0.05), ctx, 0.2);
    out.seconds = seconds_since(t0);
    return out;
}

Outcome constraint_maintenance(const DefaultRun& run) {
    Outcome o;
    const double dt = 8e-4;
    const double d16a = max_drift_unprojected(16, dt), d16b = max_drift_unprojected(16, dt / 2);
    const double d32a = max_drift_unprojected(32, dt), d32b = max_drift_unprojected(32, dt / 2);
    // D(dt, h) ~ C1 dt + C2 h^p: the dt order comes from the fine grid, the h
    // order from the dt-extrapolated values 2 D(dt/2, h) - D(dt, h).
    const double dt_order = std::log2(d32a / d32b);
    const double b16 = 2.0 * d16b - d16a, b32 = 2.0 * d32b - d32a;
    const double h_order = (b16 > 0.0 && b32 > 0.0) ? std::log2(b16 / b32) : std::nan("");
    o.require(dt_order >= 0.5, "K=0 dt order " + fmt("%.2f", dt_order) + " (>= 0.5)");
    o.require(std::isfinite(h_order) && h_order >= 3.5, "h order " + fmt("%.2f", h_order) + " (>= 3.5)");
    o.require(d16b < d16a && d32b < d32a && d32a < d16a && d32b < d16b,
              "every refinement lowers the drift " + sci(d16a) + " " + sci(d16b) + " " + sci(d32a) + " " + sci(d32b));
    double d = 0.0;
    for (const auto& r : run.records) d = std::max(d, r.drift);
    o.require(d < 1e-4, "K=10 32^3 max|1+R| " + sci(d) + " over " + std::to_string(run.records.size() - 1) + " steps");
    return o;
}

// ---------------------------------------------------------------------------

Outcome volume_monotonicity(const DefaultRun& run) {
    Outcome o;
    const auto& rec = run.records;
    int rises = 0, rate_violations = 0, local_rises = 0, collapse_violations = 0;
    double worst_rate = 0.0, int_a = 0.0, worst_margin = 1e300;
    for (std::size_t q = 1; q < rec.size(); ++q) {
        const auto& r = rec[q];
        const auto& s = rec[q - 1];
        rises += !(r.volume < s.volume);
        const double err = std::abs(r.dvol_dt_measured - r.dvol_dt_predicted);
        rate_violations += !(err <= r.dvol_dt_tolerance);
        worst_rate = std::max(worst_rate, err / r.dvol_dt_tolerance);
        for (std::size_t b = 0; b < r.local_volumes.size(); ++b) local_rises += !(r.local_volumes[b] < s.local_volumes[b]);
        int_a += 0.5 * (r.t - s.t) * (r.ricT2_max + s.ricT2_max);
        const double bound = rec[0].volume * std::exp(-3.0 * int_a);
        collapse_violations += !(r.volume >= bound);
        worst_margin = std::min(worst_margin, r.volume / bound);
    }
    const bool non_static = !rec.back().static_state;
    o.require(non_static, "grid run non-static");
    o.require(rises == 0, "grid vol " + sci(rec.front().volume) + " -> " + sci(rec.back().volume) + ", " +
                              std::to_string(rises) + " non-decreases");
    o.require(rate_violations == 0, "rate |meas-pred|/tol max " + fmt("%.3f", worst_rate));
    o.require(local_rises == 0 && rec[0].local_volumes.size() == 8,
              std::to_string(rec[0].local_volumes.size()) + " random boxes, " + std::to_string(local_rises) +
                  " non-decreases");
    o.require(collapse_violations == 0, "no-collapse bound min vol/bound " + fmt("%.4f", worst_margin));

    // Homogeneous: nil under the direct conformal flow.
    const HomogeneousModel nil = HomogeneousModel::named("nil");
    std::vector<double> s;
    for (int k = 0; k <= 300; ++k) s.push_back(0.01 * k);
    const auto h = conformal_flow_direct(nil, normalize_scalar(nil, {1.0, 1.0, 1.0}), s, {}, true);
    int hrises = 0, hviol = 0;
    double hint = 0.0, hmargin = 1e300;
    for (std::size_t q = 1; q < h.size(); ++q) {
        hrises += !(h[q].volume < h[q - 1].volume);
        const double a1 = frame_curvature(nil, h[q].state).traceless_norm2;
        const double a0 = frame_curvature(nil, h[q - 1].state).traceless_norm2;
        hint += 0.5 * (h[q].s - h[q - 1].s) * (a0 + a1);
        // The bound is an equality for nil (constant A), so allow the ODE tolerance.
        const double bound = h[0].volume * std::exp(-3.0 * hint) * (1.0 - 1e-8);
        hviol += !(h[q].volume >= bound);
        hmargin = std::min(hmargin, h[q].volume / (h[0].volume * std::exp(-3.0 * hint)));
    }
    o.require(hrises == 0, "nil vol " + sci(h.front().volume) + " -> " + sci(h.back().volume));
    o.require(hviol == 0, "nil no-collapse bound min vol/bound " + fmt("%.12f", hmargin));
    return o;
}

// ---------------------------------------------------------------------------

Outcome homogeneous_cross_validation() {
    Outcome o;
    const auto t0 = Clock::now();
    const HomogeneousModel nil = HomogeneousModel::named("nil");
    const HomogeneousState s0{1.0, 1.0, 1.0};
    const auto cl = classical_flow(nil, s0, 1e7);
    std::vector<double> s;
    for (int k = 0; k <= 300; ++k) s.push_back(0.01 * k);
    const auto tr = transform(nil, cl, s);
    const auto direct = conformal_flow_direct(nil, normalize_scalar(nil, s0), s, {}, true);
    double diff = 0.0, drift = 0.0, voldef = 0.0;
    for (std::size_t q = 0; q < tr.size(); ++q) {
        const auto a = direct[q].state.abc(), b = tr[q].state.abc();
        for (int i = 0; i < 3; ++i) diff = std::max(diff, std::abs(a[i] - b[i]) / std::abs(b[i]));
        drift = std::max(drift, std::abs(tr[q].scalar + 1.0));
        // Classical R at t(s), from a separate integration ending there.
        const double r = q == 0 ? frame_curvature(nil, s0).scalar : classical_flow(nil, s0, tr[q].t).back().scalar;
        const double expect = std::pow(std::abs(r), 1.5);
        voldef = std::max(voldef, std::abs(tr[q].volume - expect) / expect);
    }
    int non_increasing = 0;
    for (std::size_t q = 1; q < cl.size(); ++q) non_increasing += !(cl[q].scalar > cl[q - 1].scalar);
    o.require(cl.back().s >= 3.0, "classical s reaches " + fmt("%.3f", cl.back().s));
    o.require(diff <= 1e-6, "transform vs direct max rel " + sci(diff));
    o.require(drift <= 1e-8, "max|R+1| " + sci(drift));
    o.require(voldef <= 1e-8, "vol vs |R|^1.5 rel " + sci(voldef));
    o.require(non_increasing == 0, "classical R strictly increasing over " + std::to_string(cl.size()) + " samples");
    const double t = seconds_since(t0);
    o.require(t < 60.0, "runtime " + fmt("%.2f", t) + " s");
    return o;
}

// ---------------------------------------------------------------------------

Outcome equilibrium() {
    Outcome o;
    const HomogeneousModel iso = HomogeneousModel::named("isotropic");
    std::vector<double> s;
    for (int k = 0; k <= 100; ++k) s.push_back(0.1 * k);
    const auto out = conformal_flow_direct(iso, {6.0, 6.0, 6.0}, s);
    double dev = 0.0, pmax = 0.0;
    for (const auto& c : out) {
        for (double v : c.state.abc()) dev = std::max(dev, std::abs(v - 6.0) / 6.0);
        pmax = std::max(pmax, std::abs(c.pressure));
    }
    o.require(dev <= 1e-10, "max rel deviation " + sci(dev) + " over s in [0, 10]");
    o.require(pmax <= 1e-12, "max|p| " + sci(pmax));
    return o;
}

// ---------------------------------------------------------------------------

Outcome splittings() {
    Outcome o;
    EllipticConfig cfg;
    struct Case {
        const char* name;
        MetricField g;
    };
    const Grid grid = Grid::cube(16, 1.0, 4);
    std::vector<Case> cases{{"perturbed-0.8", perturbed_torus(grid, 0.8, 0.05)},
                            {"perturbed-0.6", perturbed_torus(grid, 0.6, 0.05)},
                            {"near-flat", near_flat_torus(grid, 0.1)},
                            {"random-1", random_smooth_metric(grid, 1)},
                            {"random-2", random_smooth_metric(grid, 2)}};
    double idem = 0.0, dr = 0.0, ric = 0.0, worst_qg = 0.0;
    for (std::size_t c = 0; c < cases.size(); ++c) {
        const YamabeResult y = yamabe_normalize(cases[c].g, cfg);
        const Geometry& geo = y.geometry;
        const SymTensorField h = random_smooth_tensor(grid, kSeed + c);
        for (bool tilde : {true, false}) {
            auto P = [&](const SymTensorField& x) {
                return tilde ? project_tilde(geo, x, cfg) : project_bar(geo, x, cfg);
            };
            const SplitResult once = P(h);
            const SplitResult twice = P(once.tangential);
            SymTensorField d(grid);
            for (std::size_t n = 0; n < d.size(); ++n) d[n] = twice.tangential[n] - once.tangential[n];
            idem = std::max(idem, norm(geo, d) / norm(geo, once.tangential));
            if (tilde) dr = std::max(dr, once.constraint_residual);
            else
                ric = std::max(ric, std::abs(inner(geo, geo.curvature.ricci, once.tangential)) /
                                        (norm(geo, geo.curvature.ricci) * norm(geo, h)));
        }
        // The quasi-gradient identity rests on DR(Ric) = (1/2) Delta R - |Ric|^2;
        // its discrete defect e bounds the residual by 2 sqrt(3) ||e|| since
        // the inverse of 2 Delta + 1 has norm at most 1.
        const ScalarField lhs = linearized_R(geo, geo.curvature.ricci);
        const ScalarField lap = laplacian(geo, geo.curvature.scalar);
        ScalarField e(grid);
        for (std::size_t n = 0; n < e.size(); ++n)
            e[n] = lhs[n] - 0.5 * lap[n] + contract(geo.inverse[n], geo.curvature.ricci[n], geo.curvature.ricci[n]);
        const QuasiGradientReport qg = quasi_gradient_residual(geo, cfg);
        const double tol = 2.0 * std::sqrt(3.0) * norm(geo, e) + 100.0 * cfg.tolerance * qg.rhs_norm;
        worst_qg = std::max(worst_qg, qg.residual / tol);
        std::printf("  %-14s quasi-gradient residual %.3e, combined tolerance %.3e\n", cases[c].name, qg.residual, tol);
        o.require(qg.residual <= tol, std::string(cases[c].name) + " quasi-gradient");
    }
    o.require(idem <= 100.0 * cfg.tolerance, "idempotence max " + sci(idem));
    o.require(dr <= 1e-8, "||DR(P~h)|| rel " + sci(dr));
    o.require(ric <= 1e-6, "<Ric, P-h> rel " + sci(ric));
    o.detail += "; quasi-gradient residual/tolerance max " + fmt("%.3f", worst_qg);
    return o;
}

// ---------------------------------------------------------------------------

Outcome classical_comparison() {
    Outcome o;
    FlowContext ctx;
    ctx.cfg.method = StepMethod::rk4;
    const auto rec = run_classical(near_flat_torus(Grid::cube(16, 1.0, 4), 0.1), ctx, 0.2);
    double defect = 0.0;
    int decreases = 0;
    for (const auto& r : rec) {
        defect = std::max(defect, std::abs(r.volume_defect));
        decreases += r.r_min_decreased;
    }
    o.require(std::abs(rec.back().t - 0.2) < 1e-12, std::to_string(rec.back().step) + " steps to t = 0.2");
    o.require(defect <= 1e-8, "max|vol-1| " + sci(defect));
    o.require(decreases == 0, "R_min decreases while nonpositive: " + std::to_string(decreases) + ", R_min " +
                                  sci(rec.front().r_min) + " -> " + sci(rec.back().r_min));
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    std::setvbuf(stdout, nullptr, _IOLBF, 0);
    std::set<int> only;
    bool report_only = false;
    for (int a = 1; a < argc; ++a) {
        if (!std::strcmp(argv[a], "--report-only")) {
            report_only = true;
        } else if (!std::strcmp(argv[a], "--only") && a + 1 < argc) {
            std::stringstream ss(argv[++a]);
            std::string item;
            while (std::getline(ss, item, ',')) only.insert(std::stoi(item));
        } else {
            std::fprintf(stderr, "usage: acceptance [--only 1,3,...] [--report-only]\n");
            return 2;
        }
    }
    auto wanted = [&](int k) { return only.empty() || only.count(k); };

    DefaultRun run;
    if (wanted(3) || wanted(4)) {
        std::printf("32^3 default flow (K = 10, 8 random boxes)...\n");
        run = default_run();
        std::printf("  %zu records in %.1f s\n", run.records.size(), run.seconds);
    }

    const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
        {1, identity_suite},
        {2, pressure_law},
        {3, [&] { return constraint_maintenance(run); }},
        {4, [&] { return volume_monotonicity(run); }},
        {5, homogeneous_cross_validation},
        {6, equilibrium},
        {7, splittings},
        {8, classical_comparison},
    };
    int failed = 0, errors = 0;
    std::vector<std::string> lines;
    for (const auto& [k, fn] : criteria) {
        if (!wanted(k)) continue;
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("error: ") + e.what();
            ++errors;
        }
        failed += !o.pass;
        char head[64];
        std::snprintf(head, sizeof head, "CRITERION %d %s (%.1f s): ", k, o.pass ? "PASS" : "FAIL", seconds_since(t0));
        lines.push_back(head + o.detail);
        std::printf("%s\n", lines.back().c_str());
    }
    std::printf("\n==== acceptance summary ====\n");
    for (const auto& l : lines) std::printf("%s\n", l.c_str());
    if (report_only) return errors == 0 ? 0 : 1;
    return failed;
}
