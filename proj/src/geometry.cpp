#include "crflow/geometry.hpp"

#include "crflow/errors.hpp"
#include "crflow/parallel.hpp"

namespace crflow {

namespace {

using MetricDerivative = std::array<Sym3, 3>;  // [a] = D_a g

/// Riemann tensor with every index lowered, built from Ricci; exact in 3D.
void riemann_from_ricci(const Sym3& g, const Sym3& ric, double scalar, Block81& b) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    b[idx4(i, j, k, l)] = ric(i, k) * g(j, l) - ric(i, l) * g(j, k) + ric(j, l) * g(i, k) -
                                          ric(j, k) * g(i, l) - 0.5 * scalar * (g(i, k) * g(j, l) - g(i, l) * g(j, k));
}

void raise_first(const Sym3& ginv, const Block81& lowered, Block81& mixed) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    mixed[idx4(i, j, k, l)] = ginv(i, 0) * lowered[idx4(0, j, k, l)] +
                                              ginv(i, 1) * lowered[idx4(1, j, k, l)] +
                                              ginv(i, 2) * lowered[idx4(2, j, k, l)];
}

/// W = Riem - (Ric o g terms) + R/2 (g o g terms), the n = 3 decomposition.
void weyl_by_subtraction(const Sym3& g, const Sym3& ric, double scalar, const Block81& lowered, Block81& w) {
    Block81 ricci_part;
    riemann_from_ricci(g, ric, scalar, ricci_part);
    for (std::size_t q = 0; q < 81; ++q) w[q] = lowered[q] - ricci_part[q];
}

}  // namespace

SymTensorField inverse_metric(const MetricField& g) {
    g.validate();
    SymTensorField inv(g.grid);
    for_each_index(g.size(), [&](std::size_t i) { inv[i] = inverse(g[i]); });
    return inv;
}

CurvatureBundle curvature(const MetricField& g, CurvatureDetail detail) {
    return make_geometry(g, detail).curvature;
}

Geometry make_geometry(MetricField g, CurvatureDetail detail) {
    const Grid& grid = g.grid;
    Geometry geo;
    geo.inverse = inverse_metric(g);
    geo.density = ScalarField(grid);
    for_each_index(g.size(), [&](std::size_t i) { geo.density[i] = std::sqrt(det(g[i])); });

    const StencilCoeffs st = StencilCoeffs::of(grid);
    Field<MetricDerivative> dg(grid);
    for_each_point(grid, [&](const PointIndex& p) {
        for (int a = 0; a < 3; ++a) dg[p.idx][a] = diff(g.data, p, a, st);
    });

    CurvatureBundle& cb = geo.curvature;
    cb.christoffel = Field<Christoffel>(grid);
    for_each_index(g.size(), [&](std::size_t n) {
        const MetricDerivative& d = dg[n];
        const Sym3& ginv = geo.inverse[n];
        Christoffel lowered;  // lowered[l](i,j) = Gamma_{l,ij}
        for (int l = 0; l < 3; ++l)
            for (int i = 0; i < 3; ++i)
                for (int j = i; j < 3; ++j) lowered[l](i, j) = 0.5 * (d[i](j, l) + d[j](i, l) - d[l](i, j));
        Christoffel& gam = cb.christoffel[n];
        for (int k = 0; k < 3; ++k)
            for (int s = 0; s < 6; ++s)
                gam[k].c[s] = ginv(k, 0) * lowered[0].c[s] + ginv(k, 1) * lowered[1].c[s] + ginv(k, 2) * lowered[2].c[s];
    });

    cb.ricci = SymTensorField(grid);
    cb.scalar = ScalarField(grid);
    const bool full = detail == CurvatureDetail::full;
    if (full) {
        cb.riemann = Field<Block81>(grid);
        cb.weyl = Field<Block81>(grid);
    }
    const auto& gam = cb.christoffel.data;
    for_each_point(grid, [&](const PointIndex& p) {
        const std::size_t n = p.idx;
        const Christoffel& G = gam[n];
        std::array<Christoffel, 3> dG;
        for (int a = 0; a < 3; ++a) dG[a] = diff(gam, p, a, st);

        Block81 raw;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l) {
                        double v = dG[k][i](l, j) - dG[l][i](k, j);
                        for (int m = 0; m < 3; ++m) v += G[i](k, m) * G[m](l, j) - G[i](l, m) * G[m](k, j);
                        raw[idx4(i, j, k, l)] = v;
                    }

        const Sym3& gm = g[n];
        Block81 t;
        for (int a = 0; a < 3; ++a)
            for (int q = 0; q < 27; ++q) t[a * 27 + q] = gm(a, 0) * raw[q] + gm(a, 1) * raw[27 + q] + gm(a, 2) * raw[54 + q];

        // Antisymmetrize the first pair, then symmetrize the pairs; in 3D this
        // is the full projection onto algebraic curvature tensors.
        Block81 b;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l) {
                        const double aijkl = 0.5 * (t[idx4(i, j, k, l)] - t[idx4(j, i, k, l)]);
                        const double aklij = 0.5 * (t[idx4(k, l, i, j)] - t[idx4(l, k, i, j)]);
                        b[idx4(i, j, k, l)] = 0.5 * (aijkl + aklij);
                    }

        const Sym3& ginv = geo.inverse[n];
        Sym3 ric;
        for (int j = 0; j < 3; ++j)
            for (int l = j; l < 3; ++l) {
                double s = 0.0;
                for (int i = 0; i < 3; ++i)
                    for (int k = 0; k < 3; ++k) s += ginv(i, k) * b[idx4(i, j, k, l)];
                ric(j, l) = s;
            }
        const double scalar = trace(ginv, ric);
        cb.ricci[n] = ric;
        cb.scalar[n] = scalar;
        if (full) {
            raise_first(ginv, b, cb.riemann[n]);
            weyl_by_subtraction(gm, ric, scalar, b, cb.weyl[n]);
        }
    });
    geo.metric = std::move(g);
    return geo;
}

Geometry constant_geometry(const Grid& grid, const Sym3& metric, const Sym3& ricci, CurvatureDetail detail) {
    Geometry geo;
    geo.metric = MetricField(grid, metric);
    geo.metric.validate();
    const Sym3 ginv = inverse(metric);
    const double scalar = trace(ginv, ricci);
    geo.inverse = SymTensorField(grid, ginv);
    geo.density = ScalarField(grid, std::sqrt(det(metric)));
    CurvatureBundle& cb = geo.curvature;
    cb.christoffel = Field<Christoffel>(grid);
    cb.ricci = SymTensorField(grid, ricci);
    cb.scalar = ScalarField(grid, scalar);
    if (detail == CurvatureDetail::full) {
        Block81 lowered;
        riemann_from_ricci(metric, ricci, scalar, lowered);
        Block81 mixed;
        raise_first(ginv, lowered, mixed);
        cb.riemann = Field<Block81>(grid, mixed);
        Block81 w;
        weyl_by_subtraction(metric, ricci, scalar, lowered, w);
        cb.weyl = Field<Block81>(grid, w);
    }
    return geo;
}

}  // namespace crflow
