#include "crflow/operators.hpp"

#include <algorithm>
#include <cmath>

#include "crflow/parallel.hpp"

namespace crflow {

namespace {

double diff_component(const std::vector<Vec3>& f, const PointIndex& p, int axis, const StencilCoeffs& s) {
    const auto& nb = p.nb[axis];
    double d = s.c1 * (f[nb[2]][axis] - f[nb[1]][axis]);
    if (s.c2 != 0.0) d += s.c2 * (f[nb[3]][axis] - f[nb[0]][axis]);
    return d * s.inv_h[axis];
}

/// -(sign/sqrt g) D_a F^a for a densitized vector flux F.
ScalarField conservative_divergence(const Geometry& geo, const Field<Vec3>& flux) {
    const Grid& grid = geo.grid();
    const StencilCoeffs st = StencilCoeffs::of(grid);
    ScalarField out(grid);
    const double sign = grid.convention_sign;
    for_each_point(grid, [&](const PointIndex& p) {
        double s = 0.0;
        for (int a = 0; a < 3; ++a) s += diff_component(flux.data, p, a, st);
        out[p.idx] = -sign * s / geo.density[p.idx];
    });
    return out;
}

}  // namespace

CovectorField gradient(const Geometry& geo, const ScalarField& phi) {
    const Grid& grid = geo.grid();
    const StencilCoeffs st = StencilCoeffs::of(grid);
    CovectorField out(grid);
    for_each_point(grid, [&](const PointIndex& p) {
        for (int a = 0; a < 3; ++a) out[p.idx][a] = diff(phi.data, p, a, st);
    });
    return out;
}

ScalarField divergence(const Geometry& geo, const CovectorField& w) {
    Field<Vec3> flux(geo.grid());
    for_each_index(flux.size(), [&](std::size_t n) { flux[n] = geo.density[n] * raise(geo.inverse[n], w[n]); });
    return conservative_divergence(geo, flux);
}

ScalarField laplacian(const Geometry& geo, const ScalarField& phi) { return divergence(geo, gradient(geo, phi)); }

CovectorField divergence(const Geometry& geo, const SymTensorField& h) {
    const Grid& grid = geo.grid();
    const StencilCoeffs st = StencilCoeffs::of(grid);
    ScalarField tau(grid);
    SymTensorField free(grid);
    for_each_index(h.size(), [&](std::size_t n) {
        tau[n] = trace(geo.inverse[n], h[n]) / 3.0;
        free[n] = h[n] - tau[n] * geo.metric[n];
    });
    CovectorField out(grid);
    const double sign = grid.convention_sign;
    for_each_point(grid, [&](const PointIndex& p) {
        const std::size_t n = p.idx;
        const Sym3& ginv = geo.inverse[n];
        const Christoffel& gam = geo.curvature.christoffel[n];
        const Sym3& hf = free[n];
        std::array<Sym3, 3> dh;
        for (int a = 0; a < 3; ++a) dh[a] = diff(free.data, p, a, st);
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int i = 0; i < 3; ++i)
                for (int k = 0; k < 3; ++k) {
                    double cov = dh[k](i, j);
                    for (int m = 0; m < 3; ++m) cov -= gam[m](k, i) * hf(m, j) + gam[m](k, j) * hf(i, m);
                    s += ginv(i, k) * cov;
                }
            out[n][j] = sign * (-s - diff(tau.data, p, j, st));
        }
    });
    return out;
}

SymTensorField hessian(const Geometry& geo, const ScalarField& phi) {
    const Grid& grid = geo.grid();
    const StencilCoeffs st = StencilCoeffs::of(grid);
    const CovectorField grad = gradient(geo, phi);
    SymTensorField out(grid);
    for_each_point(grid, [&](const PointIndex& p) {
        const std::size_t n = p.idx;
        std::array<Vec3, 3> dgrad;
        for (int a = 0; a < 3; ++a) dgrad[a] = diff(grad.data, p, a, st);
        const Christoffel& gam = geo.curvature.christoffel[n];
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                double v = 0.5 * (dgrad[i][j] + dgrad[j][i]);
                for (int k = 0; k < 3; ++k) v -= gam[k](i, j) * grad[n][k];
                out[n](i, j) = v;
            }
    });
    return out;
}

ScalarField linearized_R(const Geometry& geo, const SymTensorField& h) {
    const ScalarField lap_tr = laplacian(geo, trace(geo, h));
    const ScalarField dd = divergence(geo, divergence(geo, h));
    ScalarField out(geo.grid());
    for_each_index(out.size(), [&](std::size_t n) {
        out[n] = lap_tr[n] + dd[n] - contract(geo.inverse[n], geo.curvature.ricci[n], h[n]);
    });
    return out;
}

SymTensorField adjoint_linearized_R(const Geometry& geo, const ScalarField& phi) {
    const SymTensorField hess = hessian(geo, phi);
    SymTensorField out(geo.grid());
    for_each_index(out.size(), [&](std::size_t n) {
        const double tr = trace(geo.inverse[n], hess[n]);
        out[n] = hess[n] - tr * geo.metric[n] - phi[n] * geo.curvature.ricci[n];
    });
    return out;
}

NormsAndVolume norms_and_volume(const MetricField& g, const SymTensorField& h) {
    g.validate();
    NormsAndVolume r;
    r.norm_sq = ScalarField(g.grid);
    r.density = ScalarField(g.grid);
    for_each_index(g.size(), [&](std::size_t n) {
        r.norm_sq[n] = contract(inverse(g[n]), h[n], h[n]);
        r.density[n] = std::sqrt(det(g[n]));
    });
    r.volume = reduce_sum(g.size(), [&](std::size_t n) { return r.density[n]; }) * g.grid.cell_volume();
    return r;
}

ScalarField trace(const Geometry& geo, const SymTensorField& h) {
    ScalarField out(geo.grid());
    for_each_index(out.size(), [&](std::size_t n) { out[n] = crflow::trace(geo.inverse[n], h[n]); });
    return out;
}

ScalarField dot(const Geometry& geo, const SymTensorField& a, const SymTensorField& b) {
    ScalarField out(geo.grid());
    for_each_index(out.size(), [&](std::size_t n) { out[n] = contract(geo.inverse[n], a[n], b[n]); });
    return out;
}

SymTensorField traceless_ricci(const Geometry& geo) {
    SymTensorField out(geo.grid());
    for_each_index(out.size(), [&](std::size_t n) {
        out[n] = geo.curvature.ricci[n] - (geo.curvature.scalar[n] / 3.0) * geo.metric[n];
    });
    return out;
}

double integrate(const Geometry& geo, const ScalarField& f) {
    return reduce_sum(f.size(), [&](std::size_t n) { return geo.density[n] * f[n]; }) * geo.grid().cell_volume();
}

double volume(const Geometry& geo) {
    return reduce_sum(geo.density.size(), [&](std::size_t n) { return geo.density[n]; }) * geo.grid().cell_volume();
}

double inner(const Geometry& geo, const ScalarField& a, const ScalarField& b) {
    return reduce_sum(a.size(), [&](std::size_t n) { return geo.density[n] * a[n] * b[n]; }) * geo.grid().cell_volume();
}

double inner(const Geometry& geo, const SymTensorField& a, const SymTensorField& b) {
    return reduce_sum(a.size(), [&](std::size_t n) { return geo.density[n] * contract(geo.inverse[n], a[n], b[n]); }) *
           geo.grid().cell_volume();
}

double norm(const Geometry& geo, const ScalarField& a) { return std::sqrt(inner(geo, a, a)); }
double norm(const Geometry& geo, const SymTensorField& a) { return std::sqrt(inner(geo, a, a)); }

SymTensorField scale_metric(const MetricField& g, const ScalarField& phi) {
    SymTensorField out(g.grid);
    for_each_index(out.size(), [&](std::size_t n) { out[n] = phi[n] * g[n]; });
    return out;
}

double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.data) m = std::max(m, std::abs(v));
    return m;
}
double max_value(const ScalarField& f) { return *std::max_element(f.data.begin(), f.data.end()); }
double min_value(const ScalarField& f) { return *std::min_element(f.data.begin(), f.data.end()); }

}  // namespace crflow
