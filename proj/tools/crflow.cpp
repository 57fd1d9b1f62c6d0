// crflow command-line entry point.
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "crflow/commands.hpp"
#include "crflow/config.hpp"
#include "crflow/errors.hpp"
#include "crflow/parallel.hpp"

namespace {

struct Flags {
    std::string config;
    std::vector<std::string> set;
    std::optional<std::string> output, preset, input, model, kind, tensor, dt, scheme;
    std::optional<double> horizon, amplitude;
    std::optional<long long> seed;
    std::optional<int> grid, order, reprojection;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("-c,--config", f.config, "config file (key = value with [sections])");
    sub->add_option("--set", f.set, "override, section.key=value (repeatable, applied last)");
    sub->add_option("-o,--output", f.output, "output directory");
    sub->add_option("--seed", f.seed, "random seed");
}

void add_grid(CLI::App* sub, Flags& f) {
    sub->add_option("--grid", f.grid, "points per axis");
    sub->add_option("--order", f.order, "stencil order, 2 or 4");
}

void add_metric(CLI::App* sub, Flags& f) {
    sub->add_option("--preset", f.preset, "flat, near-flat, perturbed-torus or random");
    sub->add_option("--amplitude", f.amplitude, "preset amplitude");
    sub->add_option("--input", f.input, "metric snapshot to start from");
}

}  // namespace

int main(int argc, char** argv) {
    crflow::configure_threads_from_env();
    CLI::App app{"crflow: conformal Ricci flow laboratory"};
    app.require_subcommand(1);
    Flags f;

    auto* verify = app.add_subcommand("verify", "identity suite at two resolutions");
    add_common(verify, f);
    verify->add_option("--order", f.order, "stencil order, 2 or 4");

    auto* normalize = app.add_subcommand("normalize", "Yamabe normalization onto R = -1");
    add_common(normalize, f);
    add_grid(normalize, f);
    add_metric(normalize, f);

    auto* flow = app.add_subcommand("flow", "split-step conformal Ricci flow");
    add_common(flow, f);
    add_grid(flow, f);
    add_metric(flow, f);
    flow->add_option("--horizon", f.horizon, "flow time");
    flow->add_option("--dt", f.dt, "time step or 'cfl'");
    flow->add_option("--scheme", f.scheme, "lie-trotter or strang");
    flow->add_option("--reprojection", f.reprojection, "re-projection cadence K, 0 disables");

    auto* classical = app.add_subcommand("classical", "volume-normalized Ricci flow");
    add_common(classical, f);
    add_grid(classical, f);
    add_metric(classical, f);
    classical->add_option("--horizon", f.horizon, "flow time");
    classical->add_option("--dt", f.dt, "time step or 'cfl'");

    auto* homogeneous = app.add_subcommand("homogeneous", "locally homogeneous model flows");
    add_common(homogeneous, f);
    homogeneous->add_option("--model", f.model, "nil, sol, sl2r or isotropic");
    homogeneous->add_option("--horizon", f.horizon, "classical flow time");

    auto* project = app.add_subcommand("project", "tangential projections onto ker DR");
    add_common(project, f);
    add_grid(project, f);
    add_metric(project, f);
    project->add_option("--kind", f.kind, "tilde or bar");
    project->add_option("--tensor", f.tensor, "tensor snapshot to project");

    CLI11_PARSE(app, argc, argv);
    const std::string sub = app.get_subcommands().front()->get_name();

    try {
        crflow::ConfigDocument doc;
        if (!f.config.empty()) doc = crflow::load_config_file(f.config);
        auto put = [&](const std::string& key, const std::string& value) {
            crflow::apply_override(doc, key + "=" + value);
        };
        if (f.output) put("run.output", *f.output);
        if (f.seed) put("run.seed", std::to_string(*f.seed));
        if (f.grid) put("grid.n", std::to_string(*f.grid));
        if (f.order) put("grid.order", std::to_string(*f.order));
        if (f.preset) put("metric.preset", *f.preset);
        if (f.amplitude) put("metric.amplitude", crflow::csv_number(*f.amplitude));
        if (f.input) put("metric.input", *f.input);
        if (f.horizon)
            put(sub == "homogeneous" ? "homogeneous.horizon" : "integrator.horizon", crflow::csv_number(*f.horizon));
        if (f.dt) put("integrator.dt", *f.dt);
        if (f.scheme) put("integrator.scheme", *f.scheme);
        if (f.reprojection) put("integrator.reprojection", std::to_string(*f.reprojection));
        if (f.model) put("homogeneous.model", *f.model);
        if (f.kind) put("project.kind", *f.kind);
        if (f.tensor) put("project.tensor", *f.tensor);
        for (const auto& s : f.set) crflow::apply_override(doc, s);
        const crflow::RunConfig cfg = crflow::interpret_config(doc, sub);
        return crflow::run_command(cfg, std::cerr);
    } catch (const crflow::ConfigError& e) {
        std::cerr << "config error";
        if (e.line > 0) std::cerr << " at line " << e.line;
        if (!e.field.empty()) std::cerr << " [" << e.field << "]";
        std::cerr << ": " << e.what() << "\n";
        return crflow::exit_config;
    }
}
