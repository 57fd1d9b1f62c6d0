#include "crflow/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>

#include <boost/version.hpp>
#include <fftw3.h>
#include <openssl/crypto.h>

#include "crflow/elliptic.hpp"
#include "crflow/errors.hpp"
#include "crflow/homogeneous.hpp"
#include "crflow/operators.hpp"
#include "crflow/parallel.hpp"
#include "crflow/presets.hpp"
#include "crflow/snapshot.hpp"
#include "crflow/splittings.hpp"
#include "crflow/verify.hpp"

namespace crflow {

namespace fs = std::filesystem;

std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

constexpr const char* kVersion = "0.1.0";

struct Run {
    const RunConfig& cfg;
    std::string config_text;
    std::string hash;
    fs::path dir;

    explicit Run(const RunConfig& c) : cfg(c), config_text(canonical_config(c)), hash(sha256_hex(config_text)) {
        dir = cfg.output;
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw ConfigError("cannot create output directory " + cfg.output + ": " + ec.message(), 0, "run.output");
        std::ofstream(dir / "config.ini") << config_text;
    }

    std::string path(const std::string& name) const { return (dir / name).string(); }

    SnapshotMeta meta(const std::string& field) const {
        return {{"config_sha256", hash}, {"seed", std::to_string(cfg.seed)}, {"field", field}};
    }

    void manifest(const std::vector<std::string>& files, const std::vector<std::string>& extra = {}) const {
        std::ofstream out(dir / "manifest.txt");
        out << "crflow " << kVersion << "\n";
        out << "subcommand = " << cfg.subcommand << "\n";
        out << "config_sha256 = " << hash << "\n";
        out << "config_file = config.ini\n";
        out << "seed = " << cfg.seed << "\n";
        out << "rerun = crflow " << cfg.subcommand << " --config config.ini --output <dir>\n";
        out << "compiler = " << __VERSION__ << "\n";
        out << "fftw = " << fftw_version << "\n";
        out << "boost = " << BOOST_LIB_VERSION << "\n";
        out << "openssl = " << OpenSSL_version(OPENSSL_VERSION) << "\n";
        out << "threads = " << thread_count() << "\n";
        for (const auto& e : extra) out << e << "\n";
        for (const auto& f : files) out << "file = " << f << "\n";
    }
};

class Csv {
  public:
    Csv(const Run& run, const std::string& name, const std::vector<std::string>& columns) : out_(run.path(name)) {
        if (!out_) throw ConfigError("cannot write " + run.path(name), 0, "run.output");
        out_ << "# crflow " << kVersion << " config_sha256=" << run.hash << " seed=" << run.cfg.seed << "\n";
        for (std::size_t q = 0; q < columns.size(); ++q) out_ << (q ? "," : "") << columns[q];
        out_ << "\n";
    }
    void row(const std::vector<double>& values) {
        for (std::size_t q = 0; q < values.size(); ++q) out_ << (q ? "," : "") << csv_number(values[q]);
        out_ << "\n";
    }

  private:
    std::ofstream out_;
};

double default_amplitude(const std::string& preset) {
    if (preset == "near-flat") return 0.1;
    if (preset == "random") return 0.15;
    return 0.8;
}

FlowContext flow_context(const RunConfig& cfg, const Grid& grid) {
    FlowContext ctx;
    ctx.cfg = cfg.integrator;
    ctx.cfg.domains = random_boxes(grid, cfg.random_domains, cfg.seed);
    return ctx;
}

std::vector<double> s_grid(double s_end, double ds) {
    std::vector<double> s;
    for (int q = 0;; ++q) {
        const double v = q * ds;
        if (v > s_end * (1.0 + 1e-12)) break;
        s.push_back(std::min(v, s_end));
    }
    return s;
}

}  // namespace

std::vector<IndexBox> random_boxes(const Grid& grid, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<IndexBox> boxes;
    for (int b = 0; b < count; ++b) {
        IndexBox box;
        for (int a = 0; a < 3; ++a) {
            const int n = grid.n[a];
            std::uniform_int_distribution<int> len(std::max(1, n / 4), std::max(1, n / 2));
            const int l = len(rng);
            std::uniform_int_distribution<int> start(0, n - l);
            box.lo[a] = start(rng);
            box.hi[a] = box.lo[a] + l;
        }
        boxes.push_back(box);
    }
    return boxes;
}

MetricField initial_metric(const RunConfig& cfg) {
    if (!cfg.metric_input.empty()) {
        const SnapshotHeader h = read_snapshot_header(cfg.metric_input);
        if (h.components != 6) throw ConfigError("metric snapshot must have 6 components", 0, "metric.input");
        MetricField g(read_tensor_snapshot(cfg.metric_input));
        g.grid.order = cfg.grid.order;
        for (auto& v : g.data)
            if (!is_positive_definite(v)) throw ConfigError("metric snapshot is not positive definite", 0, "metric.input");
        return g;
    }
    const double a = cfg.metric_amplitude > 0.0 ? cfg.metric_amplitude : default_amplitude(cfg.metric_preset);
    return preset_metric(cfg.metric_preset, cfg.grid, cfg.seed, a);
}

int cmd_verify(const RunConfig& cfg, std::ostream& log) {
    Run run(cfg);
    VerifyOptions opt;
    opt.resolutions = cfg.verify_resolutions;
    opt.order = cfg.grid.order;
    opt.seed = cfg.seed;
    const VerifyReport rep = run_verify(opt);
    const std::string text = "# crflow " + std::string(kVersion) + " config_sha256=" + run.hash +
                             " seed=" + std::to_string(cfg.seed) + "\n" + rep.text();
    std::ofstream(run.path("verify.txt")) << text;
    run.manifest({"config.ini", "verify.txt"});
    log << rep.text();
    if (!rep.passed) {
        log << "verification failed: " << rep.failures() << "\n";
        return exit_verification;
    }
    return exit_ok;
}

int cmd_normalize(const RunConfig& cfg, std::ostream& log) {
    Run run(cfg);
    const MetricField g = initial_metric(cfg);
    const YamabeResult y = yamabe_normalize(g, cfg.integrator.elliptic);
    write_snapshot(run.path("metric.snap"), y.metric, run.meta("metric"));
    write_snapshot(run.path("conformal_factor.snap"), y.u, run.meta("scalar"));
    double du = 0.0;
    for (double u : y.u.data) du = std::max(du, std::abs(u - 1.0));
    const Geometry& geo = y.geometry;
    std::ofstream rep(run.path("normalize.txt"));
    rep << "# crflow " << kVersion << " config_sha256=" << run.hash << " seed=" << cfg.seed << "\n";
    rep << "constraint_residual = " << csv_number(y.constraint_residual) << "\n";
    rep << "max_abs_u_minus_1 = " << csv_number(du) << "\n";
    rep << "newton_iterations = " << y.newton_iterations << "\n";
    rep << "correction_iterations = " << y.correction_iterations << "\n";
    rep << "volume = " << csv_number(volume(geo)) << "\n";
    rep << "yamabe_functional = " << csv_number(yamabe_functional(geo)) << "\n";
    run.manifest({"config.ini", "metric.snap", "conformal_factor.snap", "normalize.txt"});
    log << "normalized: max|R+1| = " << csv_number(y.constraint_residual) << ", max|u-1| = " << csv_number(du)
        << "\n";
    return exit_ok;
}

int cmd_flow(const RunConfig& cfg, std::ostream& log) {
    Run run(cfg);
    const MetricField g0 = initial_metric(cfg);
    const FlowContext ctx = flow_context(cfg, g0.grid);
    std::vector<std::string> cols{"step", "t",     "dt",    "vol",  "dvol_meas", "dvol_pred", "dvol_tol",
                                  "Rmin", "Rmax",  "drift", "pmin", "pmax",      "A",         "yamabe",
                                  "reprojected", "retries"};
    for (std::size_t b = 0; b < ctx.cfg.domains.size(); ++b) cols.push_back("localvol_" + std::to_string(b));
    Csv csv(run, "flow.csv", cols);
    std::vector<std::string> files{"config.ini", "flow.csv"};
    FlowState last;
    auto snap = [&](const FlowState& s) {
        const std::string stem = "state_" + std::to_string(s.step);
        SnapshotMeta m = run.meta("metric");
        m["t"] = csv_number(s.t);
        m["step"] = std::to_string(s.step);
        write_snapshot(run.path(stem + ".metric.snap"), s.metric, m);
        m["field"] = "pressure";
        write_snapshot(run.path(stem + ".pressure.snap"), s.pressure, m);
        files.push_back(stem + ".metric.snap");
        files.push_back(stem + ".pressure.snap");
    };
    const auto records = run_conformal(g0, ctx, cfg.horizon, [&](const FlowState& s) {
        const DiagnosticRecord& r = s.record;
        if (s.step % cfg.record_every == 0) {
            std::vector<double> row{double(r.step), r.t,        r.dt,         r.volume,      r.dvol_dt_measured,
                                    r.dvol_dt_predicted, r.dvol_dt_tolerance, r.r_min, r.r_max, r.drift,
                                    r.p_min,      r.p_max,    r.ricT2_max,  r.yamabe,      r.reprojected ? 1.0 : 0.0,
                                    double(r.retries)};
            row.insert(row.end(), r.local_volumes.begin(), r.local_volumes.end());
            csv.row(row);
        }
        if (s.step == 0 || (cfg.snapshot_every > 0 && s.step % cfg.snapshot_every == 0)) snap(s);
        last = s;
    });
    if (last.step != 0 && !(cfg.snapshot_every > 0 && last.step % cfg.snapshot_every == 0)) snap(last);
    std::vector<std::string> extra;
    for (std::size_t b = 0; b < ctx.cfg.domains.size(); ++b) {
        const auto& d = ctx.cfg.domains[b];
        char buf[128];
        std::snprintf(buf, sizeof buf, "domain_%zu = [%d,%d) x [%d,%d) x [%d,%d)", b, d.lo[0], d.hi[0], d.lo[1],
                      d.hi[1], d.lo[2], d.hi[2]);
        extra.emplace_back(buf);
    }
    run.manifest(files, extra);
    const DiagnosticRecord& f = records.back();
    log << "flow: " << f.step << " steps to t = " << csv_number(f.t) << ", vol " << csv_number(records.front().volume)
        << " -> " << csv_number(f.volume) << ", max|1+R| = " << csv_number(f.drift) << "\n";
    return exit_ok;
}

int cmd_classical(const RunConfig& cfg, std::ostream& log) {
    Run run(cfg);
    const MetricField g0 = initial_metric(cfg);
    FlowContext ctx = flow_context(cfg, g0.grid);
    Csv csv(run, "classical.csv", {"step", "t", "vol", "vol_defect", "Rmin", "Rmax", "Rmean", "Rmin_decreased"});
    MetricField final_metric;
    double final_t = 0.0;
    const auto records = run_classical(g0, ctx, cfg.horizon, [&](double t, const MetricField& g) {
        final_metric = g;
        final_t = t;
    });
    int decreases = 0;
    double defect = 0.0;
    for (std::size_t q = 0; q < records.size(); ++q) {
        const auto& r = records[q];
        decreases += r.r_min_decreased;
        defect = std::max(defect, std::abs(r.volume_defect));
        if (r.step % cfg.record_every == 0 || q + 1 == records.size())
            csv.row({double(r.step), r.t, r.volume, r.volume_defect, r.r_min, r.r_max, r.r_mean,
                     r.r_min_decreased ? 1.0 : 0.0});
    }
    SnapshotMeta m = run.meta("metric");
    m["t"] = csv_number(final_t);
    write_snapshot(run.path("final.metric.snap"), final_metric, m);
    run.manifest({"config.ini", "classical.csv", "final.metric.snap"});
    log << "classical: " << records.back().step << " steps, max|vol-1| = " << csv_number(defect)
        << ", R_min decreases while nonpositive: " << decreases << "\n";
    return exit_ok;
}

int cmd_homogeneous(const RunConfig& cfg, std::ostream& log) {
    Run run(cfg);
    const HomogeneousModel m = HomogeneousModel::named(cfg.model);
    HomogeneousState s0;
    if (m.kind == ModelKind::isotropic) s0.A = s0.B = s0.C = cfg.isotropic_c;
    else std::tie(s0.A, s0.B, s0.C) = std::tuple(cfg.abc[0], cfg.abc[1], cfg.abc[2]);
    OdeOptions opt;
    opt.rtol = cfg.rtol;

    const auto classical = classical_flow(m, s0, cfg.homogeneous_horizon, opt);
    {
        Csv csv(run, "classical.csv", {"t", "s", "A", "B", "C", "R", "vol"});
        for (const auto& c : classical) csv.row({c.t, c.s, c.state.A, c.state.B, c.state.C, c.scalar, c.volume});
    }
    const std::vector<double> s = s_grid(classical.back().s, cfg.ds);
    const auto transformed = transform(m, classical, s, opt);
    {
        Csv csv(run, "conformal.csv", {"s", "t", "A", "B", "C", "R", "p", "vol", "drift"});
        for (const auto& c : transformed)
            csv.row({c.s, c.t, c.state.A, c.state.B, c.state.C, c.scalar, c.pressure, c.volume, c.drift});
    }
    HomogeneousState n0 = normalize_scalar(m, s0);
    n0.t = 0.0;
    const auto direct = conformal_flow_direct(m, n0, s, opt, cfg.renormalize);
    double mismatch = 0.0;
    {
        Csv csv(run, "direct.csv", {"s", "A", "B", "C", "R", "p", "vol", "drift", "rel_diff"});
        for (std::size_t q = 0; q < direct.size(); ++q) {
            const auto& c = direct[q];
            const auto a = c.state.abc(), b = transformed[q].state.abc();
            double d = 0.0;
            for (int i = 0; i < 3; ++i) d = std::max(d, std::abs(a[i] - b[i]) / std::abs(b[i]));
            mismatch = std::max(mismatch, d);
            csv.row({c.s, c.state.A, c.state.B, c.state.C, c.scalar, c.pressure, c.volume, c.drift, d});
        }
    }
    run.manifest({"config.ini", "classical.csv", "conformal.csv", "direct.csv"});
    log << "homogeneous " << m.name() << ": t in [0, " << csv_number(classical.back().t) << "], s in [0, "
        << csv_number(classical.back().s) << "], transform vs direct max rel diff " << csv_number(mismatch) << "\n";
    return exit_ok;
}

int cmd_project(const RunConfig& cfg, std::ostream& log) {
    Run run(cfg);
    const EllipticConfig& ec = cfg.integrator.elliptic;
    const YamabeResult y = yamabe_normalize(initial_metric(cfg), ec);
    const Geometry& geo = y.geometry;
    SymTensorField h;
    if (!cfg.tensor_input.empty()) {
        h = read_tensor_snapshot(cfg.tensor_input);
        if (h.grid.n != geo.grid().n) throw ConfigError("tensor and metric grids differ", 0, "project.tensor");
        h.grid = geo.grid();
    } else {
        h = random_smooth_tensor(geo.grid(), cfg.seed + 1);
    }
    const bool tilde = cfg.project_kind == "tilde";
    auto project = [&](const SymTensorField& x) { return tilde ? project_tilde(geo, x, ec) : project_bar(geo, x, ec); };
    const SplitResult once = project(h);
    const SplitResult twice = project(once.tangential);
    SymTensorField diff(geo.grid());
    for (std::size_t n = 0; n < diff.size(); ++n) diff[n] = twice.tangential[n] - once.tangential[n];
    const double idem = norm(geo, diff) / norm(geo, once.tangential);
    const double ric_pairing =
        std::abs(inner(geo, geo.curvature.ricci, once.tangential)) / (norm(geo, geo.curvature.ricci) * norm(geo, h));

    write_snapshot(run.path("tangential.snap"), once.tangential, run.meta(cfg.project_kind));
    write_snapshot(run.path("multiplier.snap"), once.multiplier, run.meta("scalar"));
    std::ofstream rep(run.path("project.txt"));
    rep << "# crflow " << kVersion << " config_sha256=" << run.hash << " seed=" << cfg.seed << "\n";
    rep << "kind = " << cfg.project_kind << "\n";
    rep << "solver_iterations = " << once.report.iterations << "\n";
    rep << "constraint_residual = " << csv_number(once.constraint_residual) << "\n";
    rep << "reconstruction_residual = " << csv_number(once.reconstruction_residual) << "\n";
    rep << "idempotence_defect = " << csv_number(idem) << "\n";
    rep << "ricci_pairing = " << csv_number(ric_pairing) << "\n";
    run.manifest({"config.ini", "tangential.snap", "multiplier.snap", "project.txt"});
    log << "project " << cfg.project_kind << ": ||DR P h|| rel " << csv_number(once.constraint_residual)
        << ", idempotence " << csv_number(idem) << "\n";
    return exit_ok;
}

int run_command(const RunConfig& cfg, std::ostream& log) {
    try {
        if (cfg.subcommand == "verify") return cmd_verify(cfg, log);
        if (cfg.subcommand == "normalize") return cmd_normalize(cfg, log);
        if (cfg.subcommand == "flow") return cmd_flow(cfg, log);
        if (cfg.subcommand == "classical") return cmd_classical(cfg, log);
        if (cfg.subcommand == "homogeneous") return cmd_homogeneous(cfg, log);
        if (cfg.subcommand == "project") return cmd_project(cfg, log);
        throw ConfigError("unknown subcommand '" + cfg.subcommand + "'");
    } catch (const ConfigError& e) {
        log << "config error";
        if (e.line > 0) log << " at line " << e.line;
        if (!e.field.empty()) log << " [" << e.field << "]";
        log << ": " << e.what() << "\n";
        return exit_config;
    } catch (const SolverError& e) {
        log << "solver failure in " << cfg.subcommand << ": " << e.what() << "\n";
        return exit_solver;
    } catch (const Error& e) {
        log << cfg.subcommand << " failed: " << e.what() << "\n";
        return exit_solver;
    }
}

}  // namespace crflow
