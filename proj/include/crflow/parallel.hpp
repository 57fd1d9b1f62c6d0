// Point loops over the grid. The parallel versions distribute z-planes over
// OpenMP threads; the serial versions are the reference path used by tests.
#pragma once

#include <cstddef>
#include <vector>

#include "crflow/grid.hpp"

namespace crflow {

/// Threads requested through CRFLOW_THREADS, applied once at startup by the CLI.
void configure_threads_from_env();
int thread_count();

namespace detail {
inline void fill_axis(std::vector<std::array<int, 4>>& out, int n) {
    out.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[i] = {(i - 2 + 2 * n) % n, (i - 1 + n) % n, (i + 1) % n, (i + 2) % n};
}

template <class F>
void plane(const Grid& g, int k, const std::vector<std::array<int, 4>>& wx,
           const std::vector<std::array<int, 4>>& wy, const std::vector<std::array<int, 4>>& wz, F& f) {
    PointIndex p;
    for (int j = 0; j < g.n[1]; ++j) {
        for (int i = 0; i < g.n[0]; ++i) {
            p.idx = g.index(i, j, k);
            for (int s = 0; s < 4; ++s) {
                p.nb[0][s] = g.index(wx[i][s], j, k);
                p.nb[1][s] = g.index(i, wy[j][s], k);
                p.nb[2][s] = g.index(i, j, wz[k][s]);
            }
            f(p);
        }
    }
}
}  // namespace detail

template <class F>
void for_each_point(const Grid& g, F&& f) {
    std::vector<std::array<int, 4>> wx, wy, wz;
    detail::fill_axis(wx, g.n[0]);
    detail::fill_axis(wy, g.n[1]);
    detail::fill_axis(wz, g.n[2]);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < g.n[2]; ++k) detail::plane(g, k, wx, wy, wz, f);
}

template <class F>
void for_each_point_serial(const Grid& g, F&& f) {
    std::vector<std::array<int, 4>> wx, wy, wz;
    detail::fill_axis(wx, g.n[0]);
    detail::fill_axis(wy, g.n[1]);
    detail::fill_axis(wz, g.n[2]);
    for (int k = 0; k < g.n[2]; ++k) detail::plane(g, k, wx, wy, wz, f);
}

template <class F>
void for_each_index(std::size_t n, F&& f) {
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < count; ++i) f(static_cast<std::size_t>(i));
}

/// Sum of term(i) over [0, n). Block partition is fixed, so the result does not
/// depend on the number of threads.
template <class F>
double reduce_sum(std::size_t n, F&& term) {
    constexpr std::size_t kBlocks = 64;
    double partial[kBlocks] = {};
    const std::size_t chunk = (n + kBlocks - 1) / kBlocks;
#pragma omp parallel for schedule(static)
    for (int b = 0; b < static_cast<int>(kBlocks); ++b) {
        const std::size_t lo = b * chunk;
        const std::size_t hi = lo + chunk < n ? lo + chunk : n;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partial[b] = s;
    }
    double total = 0.0;
    for (double s : partial) total += s;
    return total;
}

template <class F>
double reduce_max(std::size_t n, F&& term) {
    double m = -1.0e308;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = term(i);
        if (v > m) m = v;
    }
    return m;
}

}  // namespace crflow
