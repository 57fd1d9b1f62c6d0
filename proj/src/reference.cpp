#include "crflow/reference.hpp"

namespace crflow::reference {

namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

// Central first difference of component `comp` of a strided field along `axis`.
template <class Get>
double central(const Grid& g, int i, int j, int k, int axis, Get get) {
    const double h = g.spacing(axis);
    auto at = [&](int off) {
        int c[3] = {i, j, k};
        c[axis] = wrap(c[axis] + off, g.n[axis]);
        return get(g.index(c[0], c[1], c[2]));
    };
    if (g.order == 4) return (2.0 / 3.0 * (at(1) - at(-1)) - 1.0 / 12.0 * (at(2) - at(-2))) / h;
    return 0.5 * (at(1) - at(-1)) / h;
}

}  // namespace

CovectorField gradient(const Grid& grid, const ScalarField& phi) {
    CovectorField out(grid);
    for (int k = 0; k < grid.n[2]; ++k)
        for (int j = 0; j < grid.n[1]; ++j)
            for (int i = 0; i < grid.n[0]; ++i)
                for (int a = 0; a < 3; ++a)
                    out[grid.index(i, j, k)][a] = central(grid, i, j, k, a, [&](std::size_t q) { return phi[q]; });
    return out;
}

ScalarField laplacian(const Geometry& geo, const ScalarField& phi) {
    const Grid& grid = geo.grid();
    const CovectorField d = gradient(grid, phi);
    CovectorField flux(grid);
    for (std::size_t q = 0; q < grid.size(); ++q) {
        const Sym3& gi = geo.inverse[q];
        for (int a = 0; a < 3; ++a) {
            double s = 0.0;
            for (int b = 0; b < 3; ++b) s += gi(a, b) * d[q][b];
            flux[q][a] = geo.density[q] * s;
        }
    }
    ScalarField out(grid);
    for (int k = 0; k < grid.n[2]; ++k)
        for (int j = 0; j < grid.n[1]; ++j)
            for (int i = 0; i < grid.n[0]; ++i) {
                double s = 0.0;
                for (int a = 0; a < 3; ++a) s += central(grid, i, j, k, a, [&](std::size_t q) { return flux[q][a]; });
                const std::size_t q = grid.index(i, j, k);
                out[q] = -grid.convention_sign * s / geo.density[q];
            }
    return out;
}

double integrate(const Geometry& geo, const ScalarField& f) {
    double s = 0.0;
    for (std::size_t q = 0; q < f.size(); ++q) s += f[q] * geo.density[q];
    return s * geo.grid().cell_volume();
}

}  // namespace crflow::reference
