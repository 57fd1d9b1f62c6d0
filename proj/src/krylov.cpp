#include "crflow/krylov.hpp"

#include <algorithm>

#include "crflow/parallel.hpp"

namespace crflow {

double weighted_dot(const Vector& w, const Vector& a, const Vector& b) {
    return reduce_sum(a.size(), [&](std::size_t i) { return w[i] * a[i] * b[i]; });
}

namespace {

void axpy(double s, const Vector& x, Vector& y) {
    for_each_index(y.size(), [&](std::size_t i) { y[i] += s * x[i]; });
}

}  // namespace

SolveReport pcg(const LinearMap& apply, const LinearMap& precond, const Vector& w, const Vector& b, Vector& x,
                const KrylovOptions& opt) {
    const std::size_t n = b.size();
    SolveReport rep;
    const double bnorm = std::sqrt(weighted_dot(w, b, b));
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        rep.converged = true;
        return rep;
    }
    Vector r(n), z(n), p(n), q(n);
    apply(x, q);
    for_each_index(n, [&](std::size_t i) { r[i] = b[i] - q[i]; });
    rep.residual = std::sqrt(weighted_dot(w, r, r)) / bnorm;
    if (rep.residual <= opt.tolerance) {
        rep.converged = true;
        return rep;
    }
    precond(r, z);
    p = z;
    double rz = weighted_dot(w, r, z);
    for (rep.iterations = 1; rep.iterations <= opt.max_iterations; ++rep.iterations) {
        apply(p, q);
        const double pq = weighted_dot(w, p, q);
        if (!(pq > 0.0)) throw NotConverged("conjugate gradients met a non-positive direction", rep);
        const double alpha = rz / pq;
        axpy(alpha, p, x);
        axpy(-alpha, q, r);
        rep.residual = std::sqrt(weighted_dot(w, r, r)) / bnorm;
        if (rep.residual <= opt.tolerance) {
            rep.converged = true;
            return rep;
        }
        precond(r, z);
        const double rz_new = weighted_dot(w, r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for_each_index(n, [&](std::size_t i) { p[i] = z[i] + beta * p[i]; });
    }
    rep.iterations = opt.max_iterations;
    throw NotConverged("conjugate gradients reached the iteration limit", rep);
}

SolveReport gmres(const LinearMap& apply, const LinearMap& precond, const Vector& w, const Vector& b, Vector& x,
                  const KrylovOptions& opt) {
    const std::size_t n = b.size();
    const int m = std::max(1, opt.restart);
    SolveReport rep;
    const double bnorm = std::sqrt(weighted_dot(w, b, b));
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        rep.converged = true;
        return rep;
    }
    std::vector<Vector> v(m + 1, Vector(n));
    std::vector<Vector> zs(m, Vector(n));
    std::vector<std::vector<double>> h(m + 1, std::vector<double>(m, 0.0));
    std::vector<double> cs(m), sn(m), g(m + 1);
    Vector r(n), tmp(n);

    apply(x, tmp);
    for_each_index(n, [&](std::size_t i) { r[i] = b[i] - tmp[i]; });
    double beta = std::sqrt(weighted_dot(w, r, r));
    rep.residual = beta / bnorm;
    while (rep.residual > opt.tolerance) {
        if (rep.iterations >= opt.max_iterations) throw NotConverged("GMRES reached the iteration limit", rep);
        const double cycle_start = rep.residual;
        for_each_index(n, [&](std::size_t i) { v[0][i] = r[i] / beta; });
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;
        int k = 0;
        for (; k < m && rep.iterations < opt.max_iterations; ++k) {
            ++rep.iterations;
            precond(v[k], zs[k]);
            apply(zs[k], v[k + 1]);
            for (int j = 0; j <= k; ++j) {
                h[j][k] = weighted_dot(w, v[k + 1], v[j]);
                axpy(-h[j][k], v[j], v[k + 1]);
            }
            h[k + 1][k] = std::sqrt(weighted_dot(w, v[k + 1], v[k + 1]));
            if (h[k + 1][k] > 0.0) {
                const double inv = 1.0 / h[k + 1][k];
                for_each_index(n, [&](std::size_t i) { v[k + 1][i] *= inv; });
            }
            for (int j = 0; j < k; ++j) {
                const double t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
                h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
                h[j][k] = t;
            }
            const double d = std::hypot(h[k][k], h[k + 1][k]);
            cs[k] = d > 0.0 ? h[k][k] / d : 1.0;
            sn[k] = d > 0.0 ? h[k + 1][k] / d : 0.0;
            h[k][k] = d;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];
            rep.residual = std::abs(g[k + 1]) / bnorm;
            if (rep.residual <= opt.tolerance) {
                ++k;
                break;
            }
        }
        std::vector<double> y(k);
        for (int i = k - 1; i >= 0; --i) {
            double s = g[i];
            for (int j = i + 1; j < k; ++j) s -= h[i][j] * y[j];
            y[i] = h[i][i] != 0.0 ? s / h[i][i] : 0.0;
        }
        for (int j = 0; j < k; ++j) axpy(y[j], zs[j], x);

        apply(x, tmp);
        for_each_index(n, [&](std::size_t i) { r[i] = b[i] - tmp[i]; });
        beta = std::sqrt(weighted_dot(w, r, r));
        rep.residual = beta / bnorm;
        if (rep.residual > opt.tolerance && rep.residual > opt.stagnation_ratio * cycle_start)
            throw NearSingular("GMRES stagnated; the operator appears singular", rep);
    }
    rep.converged = true;
    return rep;
}

}  // namespace crflow
