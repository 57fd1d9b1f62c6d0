#include "crflow/splittings.hpp"

#include <algorithm>
#include <cmath>

#include "crflow/operators.hpp"
#include "crflow/parallel.hpp"

namespace crflow {

namespace {

double max_component(const SymTensorField& h) {
    double m = 0.0;
    for (const Sym3& s : h.data)
        for (double c : s.c) m = std::max(m, std::abs(c));
    return m;
}

void finish(const Geometry& geo, const SymTensorField& h, const SymTensorField& part, const ScalarField& drh,
            SplitResult& r) {
    SymTensorField defect(geo.grid());
    for_each_index(defect.size(), [&](std::size_t i) { defect[i] = r.tangential[i] + part[i] - h[i]; });
    const double hmax = max_component(h);
    r.reconstruction_residual = hmax > 0.0 ? max_component(defect) / hmax : max_component(defect);
    const double base = norm(geo, drh);
    r.constraint_residual = base > 0.0 ? norm(geo, linearized_R(geo, r.tangential)) / base : 0.0;
}

}  // namespace

SplitResult project_tilde(const Geometry& geo, const SymTensorField& h, const EllipticConfig& cfg) {
    const ScalarField drh = linearized_R(geo, h);
    SplitResult r;
    auto [phi, report] = solve_L_general(geo, drh, cfg);
    r.multiplier = std::move(phi);
    r.report = report;
    const SymTensorField part = scale_metric(geo.metric, r.multiplier);
    r.tangential = SymTensorField(geo.grid());
    for_each_index(h.size(), [&](std::size_t i) { r.tangential[i] = h[i] - part[i]; });
    finish(geo, h, part, drh, r);
    return r;
}

SplitResult project_tilde(const MetricField& g, const SymTensorField& h, const EllipticConfig& cfg) {
    return project_tilde(make_geometry(g), h, cfg);
}

SplitResult project_bar(const Geometry& geo, const SymTensorField& h, const EllipticConfig& cfg) {
    const ScalarField drh = linearized_R(geo, h);
    SplitResult r;
    auto [phi, report] = solve_DRDRstar(geo, drh, cfg);
    r.multiplier = std::move(phi);
    r.report = report;
    const SymTensorField part = adjoint_linearized_R(geo, r.multiplier);
    r.tangential = SymTensorField(geo.grid());
    for_each_index(h.size(), [&](std::size_t i) { r.tangential[i] = h[i] - part[i]; });
    finish(geo, h, part, drh, r);
    return r;
}

SplitResult project_bar(const MetricField& g, const SymTensorField& h, const EllipticConfig& cfg) {
    return project_bar(make_geometry(g), h, cfg);
}

double yamabe_functional(const Geometry& geo) {
    return std::pow(volume(geo), -1.0 / 3.0) * integrate(geo, geo.curvature.scalar);
}

double yamabe_functional(const MetricField& g) { return yamabe_functional(make_geometry(g)); }

SymTensorField grad_yamabe(const Geometry& geo) {
    const double vol = volume(geo);
    const double rbar = integrate(geo, geo.curvature.scalar) / vol;
    const double c = -std::pow(vol, -1.0 / 3.0);
    SymTensorField out(geo.grid());
    for_each_index(out.size(), [&](std::size_t i) {
        const Sym3 ein = geo.curvature.ricci[i] - (0.5 * geo.curvature.scalar[i]) * geo.metric[i];
        out[i] = c * (ein + (rbar / 6.0) * geo.metric[i]);
    });
    return out;
}

SymTensorField grad_yamabe(const MetricField& g) { return grad_yamabe(make_geometry(g)); }

QuasiGradientReport quasi_gradient_residual(const Geometry& geo, const EllipticConfig& cfg) {
    const ScalarField p = pressure(geo, cfg).p;
    SymTensorField rhs(geo.grid());
    for_each_index(rhs.size(), [&](std::size_t i) {
        rhs[i] = -2.0 * geo.curvature.ricci[i] - (2.0 / 3.0 + p[i]) * geo.metric[i];
    });
    const SplitResult proj = project_tilde(geo, grad_yamabe(geo), cfg);
    const double c = 2.0 * std::pow(volume(geo), 1.0 / 3.0);
    SymTensorField diff(geo.grid());
    for_each_index(diff.size(), [&](std::size_t i) { diff[i] = rhs[i] - c * proj.tangential[i]; });
    return {norm(geo, diff), norm(geo, rhs)};
}

double quasi_gradient_residual(const MetricField& g, const EllipticConfig& cfg) {
    return quasi_gradient_residual(make_geometry(g), cfg).residual;
}

}  // namespace crflow
