// Locally homogeneous flows on unimodular Lie groups with diagonal
// left-invariant metrics (Milnor frames), and the isotropic hyperbolic model.
// Curvature is exact algebra; the flows are ODEs in (A, B, C).
#pragma once

#include <array>
#include <string>
#include <vector>

#include "crflow/flow.hpp"

namespace crflow {

enum class ModelKind { nil, sol, sl2r, isotropic };

/// [e2,e3] = l1 e1, [e3,e1] = l2 e2, [e1,e2] = l3 e3.
struct HomogeneousModel {
    ModelKind kind = ModelKind::nil;
    std::array<double, 3> lambda{0.0, 0.0, 1.0};
    double covolume = 1.0;

    static HomogeneousModel named(const std::string& name);
    std::string name() const;
};

/// g = diag(A, B, C) in the Milnor frame. The isotropic model uses A = B = C = c
/// times a hyperbolic metric of sectional curvature -1.
struct HomogeneousState {
    double A = 1.0, B = 1.0, C = 1.0;
    double t = 0.0;  // t or s depending on the flow
    std::array<double, 3> abc() const { return {A, B, C}; }
};

struct FrameCurvature {
    std::array<double, 3> ricci{};  // Ric(e_i, e_i), frame components
    double scalar = 0.0;
    double ricci_norm2 = 0.0;
    double traceless_norm2 = 0.0;
    double sectional_min = 0.0, sectional_max = 0.0;
};

/// Levi-Civita connection by the Koszul formula on an orthonormal left-invariant
/// frame, then R(X,Y)Z = D_X D_Y Z - D_Y D_X Z - D_[X,Y] Z.
FrameCurvature frame_curvature(const HomogeneousModel& m, const HomogeneousState& s);

double homogeneous_volume(const HomogeneousModel& m, const HomogeneousState& s);

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 0.0;  // relative control only; the coefficients span many decades
    double initial_step = 1e-4;
};

struct ClassicalSample {
    double t = 0.0;
    double s = 0.0;  // int_0^t |R| dt'
    HomogeneousState state;
    double scalar = 0.0;
    double volume = 0.0;
};

/// dA/dt = -2 Ric_A + (2/3) R A (and cyclic) from the unit-volume rescaling of
/// s0, sampled at every accepted step of an adaptive Dormand-Prince pair.
/// Throws OdeFailure if the volume element drifts beyond the tolerance.
std::vector<ClassicalSample> classical_flow(const HomogeneousModel& m, const HomogeneousState& s0, double horizon,
                                            const OdeOptions& opt = {});

struct ConformalSample {
    double s = 0.0;
    double t = 0.0;  // classical time, transform only
    HomogeneousState state;
    double scalar = 0.0;
    double pressure = 0.0;
    double volume = 0.0;
    double drift = 0.0;  // |R + 1|
};

/// s(t) = int |R|, t(s) by monotone cubic interpolation of the logged table,
/// g_bar(s) = |R(g(t(s)))| g(t(s)). Evaluates at the requested s values, which
/// must lie in the range of the table. Throws NonNegativeScalarCurvature.
std::vector<ConformalSample> transform(const HomogeneousModel& m, const std::vector<ClassicalSample>& classical,
                                       const std::vector<double>& s_values, const OdeOptions& opt = {});

/// dA/ds = -2 Ric_A - (2/3 + p) A, p = 2(|Ric|^2 - 1/3), from a state with
/// R = -1. Sampled at s_values. renormalize applies (A,B,C) <- |R| (A,B,C)
/// at every sample. Throws ConfigError if |R(s0) + 1| > 1e-10, OdeFailure, and
/// ConstraintBlowup when the drift exceeds drift_abort.
std::vector<ConformalSample> conformal_flow_direct(const HomogeneousModel& m, const HomogeneousState& s0,
                                                   const std::vector<double>& s_values, const OdeOptions& opt = {},
                                                   bool renormalize = false, double drift_abort = 1e-1);

/// (A,B,C) <- |R| (A,B,C), so that R = -1.
HomogeneousState normalize_scalar(const HomogeneousModel& m, const HomogeneousState& s);

/// Constant diagonal field on the grid with the frame curvature of the model.
MetricField embed(const Grid& grid, const HomogeneousState& s);
GeometryProvider embedded_geometry(const HomogeneousModel& m);
FlowContext embedded_context(const HomogeneousModel& m, IntegratorConfig cfg);

}  // namespace crflow
