#include "crflow/presets.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "crflow/errors.hpp"
#include "crflow/parallel.hpp"

namespace crflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Mode {
    std::array<int, 3> k;
    double amp;
    double phase;
};

std::vector<Mode> draw_modes(std::mt19937_64& rng, int max_mode, int count) {
    std::uniform_int_distribution<int> kd(-max_mode, max_mode);
    std::uniform_real_distribution<double> ad(-1.0, 1.0);
    std::uniform_real_distribution<double> pd(0.0, kTwoPi);
    std::vector<Mode> modes;
    while (static_cast<int>(modes.size()) < count) {
        Mode m{{kd(rng), kd(rng), kd(rng)}, ad(rng), pd(rng)};
        if (m.k[0] == 0 && m.k[1] == 0 && m.k[2] == 0) continue;
        modes.push_back(m);
    }
    return modes;
}

double evaluate(const std::vector<Mode>& modes, const Grid& grid, const std::array<int, 3>& c) {
    double v = 0.0;
    for (const Mode& m : modes) {
        double arg = m.phase;
        for (int a = 0; a < 3; ++a) arg += kTwoPi * m.k[a] * grid.position(a, c[a]) / grid.period[a];
        v += m.amp * std::cos(arg);
    }
    return v;
}

}  // namespace

MetricField flat_metric(const Grid& grid) { return MetricField(grid); }

MetricField near_flat_torus(const Grid& grid, double e) {
    MetricField g(grid);
    for_each_index(g.size(), [&](std::size_t n) {
        const auto c = grid.coords(n);
        const double x = grid.position(0, c[0]) / grid.period[0];
        const double y = grid.position(1, c[1]) / grid.period[1];
        const double z = grid.position(2, c[2]) / grid.period[2];
        Sym3 m = Sym3::diagonal(1.0 + e * std::sin(kTwoPi * y), 1.0 + e * std::sin(kTwoPi * z),
                                1.0 + e * std::sin(kTwoPi * x));
        m(0, 1) = (e / 3.0) * std::sin(kTwoPi * (x + z));
        g[n] = m;
    });
    g.validate();
    return g;
}

MetricField perturbed_torus(const Grid& grid, double a, double r) {
    MetricField g(grid);
    for_each_index(g.size(), [&](std::size_t n) {
        const auto c = grid.coords(n);
        const double x = grid.position(0, c[0]) / grid.period[0];
        const double y = grid.position(1, c[1]) / grid.period[1];
        const double z = grid.position(2, c[2]) / grid.period[2];
        const double f = a * std::sin(kTwoPi * x);
        Sym3 m = Sym3::diagonal(1.0 + r * std::sin(kTwoPi * y), std::exp(2.0 * f) * (1.0 + r * std::sin(kTwoPi * z)),
                                std::exp(-2.0 * f));
        m(0, 1) = 0.3 * r * std::sin(kTwoPi * z);
        m(1, 2) = 0.5 * r * std::sin(kTwoPi * (x + y));
        g[n] = m;
    });
    g.validate();
    return g;
}

MetricField conformally_flat(const Grid& grid, const ScalarField& f) {
    MetricField g(grid);
    for_each_index(g.size(), [&](std::size_t n) { g[n] = std::exp(2.0 * f[n]) * Sym3::identity(); });
    return g;
}

ScalarField random_smooth_scalar(const Grid& grid, std::uint64_t seed, double amplitude, int max_mode) {
    std::mt19937_64 rng(seed);
    const auto modes = draw_modes(rng, max_mode, 6);
    ScalarField f(grid);
    for_each_index(f.size(), [&](std::size_t n) { f[n] = amplitude * evaluate(modes, grid, grid.coords(n)); });
    return f;
}

SymTensorField random_smooth_tensor(const Grid& grid, std::uint64_t seed, double amplitude, int max_mode) {
    std::mt19937_64 rng(seed);
    std::array<std::vector<Mode>, 6> modes;
    for (auto& m : modes) m = draw_modes(rng, max_mode, 4);
    SymTensorField h(grid);
    for_each_index(h.size(), [&](std::size_t n) {
        const auto c = grid.coords(n);
        for (int s = 0; s < 6; ++s) h[n].c[s] = amplitude * evaluate(modes[s], grid, c) / 4.0;
    });
    return h;
}

MetricField random_smooth_metric(const Grid& grid, std::uint64_t seed, double amplitude, int max_mode) {
    const SymTensorField h = random_smooth_tensor(grid, seed, amplitude, max_mode);
    MetricField g(grid);
    for_each_index(g.size(), [&](std::size_t n) { g[n] = Sym3::identity() + h[n]; });
    g.validate();
    return g;
}

MetricField preset_metric(const std::string& name, const Grid& grid, std::uint64_t seed, double amplitude) {
    if (name == "flat") return flat_metric(grid);
    if (name == "near-flat") return near_flat_torus(grid, amplitude);
    if (name == "perturbed-torus") return perturbed_torus(grid, amplitude);
    if (name == "random") return random_smooth_metric(grid, seed, amplitude);
    throw ConfigError("unknown metric preset '" + name + "'", 0, "metric.preset");
}

}  // namespace crflow
