// Uniform periodic grid on a flat 3-torus and its central-difference stencils.
#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace crflow {

struct Grid {
    std::array<int, 3> n{16, 16, 16};
    std::array<double, 3> period{1.0, 1.0, 1.0};
    int order = 2;  // 2 or 4
    /// Sign applied to the Laplacian and divergences. +1 is the positive-operator
    /// convention; -1 exists only as a negative-control fixture for the verifier.
    double convention_sign = 1.0;

    static Grid cube(int points, double length = 1.0, int stencil_order = 2) {
        Grid g;
        g.n = {points, points, points};
        g.period = {length, length, length};
        g.order = stencil_order;
        return g;
    }

    std::size_t size() const {
        return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]) * static_cast<std::size_t>(n[2]);
    }
    double spacing(int axis) const { return period[axis] / n[axis]; }
    double cell_volume() const { return spacing(0) * spacing(1) * spacing(2); }
    double min_spacing() const;

    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * n[1] + static_cast<std::size_t>(j)) * n[0] + static_cast<std::size_t>(i);
    }
    std::array<int, 3> coords(std::size_t idx) const {
        const int i = static_cast<int>(idx % n[0]);
        const int j = static_cast<int>((idx / n[0]) % n[1]);
        const int k = static_cast<int>(idx / (static_cast<std::size_t>(n[0]) * n[1]));
        return {i, j, k};
    }
    /// Physical coordinate of a node along an axis.
    double position(int axis, int i) const { return i * spacing(axis); }

    /// Throws ConfigError on resolution < 8, non-positive period or unknown order.
    void validate() const;

    bool same_layout(const Grid& o) const { return n == o.n && period == o.period && order == o.order; }
};

/// First-derivative central stencil coefficients: f' ~ (c1 (f+1 - f-1) + c2 (f+2 - f-2)) / h.
struct StencilCoeffs {
    double c1 = 0.5;
    double c2 = 0.0;
    std::array<double, 3> inv_h{};

    static StencilCoeffs of(const Grid& g);
    /// Symbol of the first derivative on the Fourier mode with phase theta = k h:
    /// D e^{ikx} = i * symbol(theta)/h * e^{ikx}.
    double symbol(double theta) const;
};

/// A grid point with its wrapped neighbours along each axis: nb[a] = {-2, -1, +1, +2}.
struct PointIndex {
    std::size_t idx;
    std::array<std::array<std::size_t, 4>, 3> nb;
};

template <class T>
T diff(const std::vector<T>& f, const PointIndex& p, int axis, const StencilCoeffs& s) {
    const auto& nb = p.nb[axis];
    T d = f[nb[2]] - f[nb[1]];
    d *= s.c1;
    if (s.c2 != 0.0) {
        T far = f[nb[3]] - f[nb[0]];
        far *= s.c2;
        d += far;
    }
    d *= s.inv_h[axis];
    return d;
}

}  // namespace crflow
