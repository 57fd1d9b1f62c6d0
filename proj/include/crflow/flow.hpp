// Split-step integration of the conformal Ricci flow
//   dg/dt + 2 (Ric + g/n) = -p g,   R(g) = -1,
// the volume-normalized classical Ricci flow, and per-step diagnostics.
#pragma once

#include <array>
#include <functional>
#include <vector>

#include "crflow/elliptic.hpp"
#include "crflow/geometry.hpp"

namespace crflow {

enum class Scheme { lie_trotter, strang };
/// A: (-p g, -2(Ric + g/n)).  B: (-(p + 2/n) g, -2 Ric).
enum class Pairing { A, B };
enum class StepMethod { euler, rk4 };

/// Half-open box [lo, hi) of grid indices.
struct IndexBox {
    std::array<int, 3> lo{0, 0, 0};
    std::array<int, 3> hi{0, 0, 0};
};

struct IntegratorConfig {
    double dt = 0.0;  // 0: CFL-limited step
    Scheme scheme = Scheme::lie_trotter;
    Pairing pairing = Pairing::A;
    StepMethod method = StepMethod::euler;
    bool deturck = true;
    int reprojection_cadence = 10;  // K; 0 disables re-projection
    double cfl_safety = 2.0;
    int max_retries = 6;
    EllipticConfig elliptic;
    std::vector<IndexBox> domains;
};

/// Curvature of a metric. The grid kernel by default; homogeneous models
/// embedded as constant fields supply their frame curvature instead.
using GeometryProvider = std::function<Geometry(const MetricField&)>;
GeometryProvider grid_geometry();

struct DiagnosticRecord {
    int step = 0;
    double t = 0.0;
    double dt = 0.0;
    double volume = 0.0;
    double dvol_dt_measured = 0.0;   // flow part only, re-projection excluded
    double dvol_dt_predicted = 0.0;  // -(n/2) int p dmu, trapezoid over the step
    double dvol_dt_tolerance = 0.0;  // 10x nominal local error of the rate
    double r_min = 0.0, r_max = 0.0;
    double p_min = 0.0, p_max = 0.0;
    double ricT2_min = 0.0, ricT2_max = 0.0;  // |Ric^T|^2; A(t) = ricT2_max
    double drift = 0.0;                       // max|1 + R|
    double yamabe = 0.0;
    std::vector<double> local_volumes;
    bool reprojected = false;
    bool static_state = false;
    int retries = 0;
    double velocity_norm2_max = 0.0;  // max |ricci_velocity|^2_g over the step
};

struct FlowState {
    double t = 0.0;
    int step = 0;
    MetricField metric;
    Geometry geometry;
    ScalarField pressure;  // current for `metric` when pressure_current
    bool pressure_current = false;
    DiagnosticRecord record;
};

struct FlowContext {
    IntegratorConfig cfg;
    GeometryProvider geometry = grid_geometry();
    /// Spatially constant fields with frame curvature. Normalization onto
    /// R = -1 is then the homothety g <- |R| g.
    bool embedded = false;
};

/// State at g with curvature and pressure evaluated and diagnostics filled.
FlowState make_flow_state(const MetricField& g, const FlowContext& ctx, double t = 0.0);

/// g <- e^{-p dt} g (pairing A) or e^{-(p + 2/n) dt} g (pairing B), p frozen.
FlowState conformal_substep(const FlowState& s, double dt, Pairing pairing, const FlowContext& ctx);

/// Right-hand side of the curvature substep at a geometry, with the DeTurck
/// term L_W g, W^k = g^ij Gamma^k_ij (flat reference), when requested.
SymTensorField ricci_velocity(const Geometry& geo, Pairing pairing, bool deturck);

/// Explicit Euler or RK4 step of ricci_velocity. Throws StepRejected if the
/// metric leaves the positive cone.
FlowState ricci_substep(const FlowState& s, double dt, Pairing pairing, bool deturck, const FlowContext& ctx);

/// CFL step: safety * h_min^2 / (2 n max eigenvalue of g^{-1}).
double cfl_step(const FlowState& s, const IntegratorConfig& cfg);

/// One composed step with curvature, pressure, re-projection every K steps and
/// diagnostics. Halves dt on StepRejected up to max_retries. Throws
/// ConstraintBlowup if the drift exceeds the abort threshold after re-projection.
FlowState step(const FlowState& s, const FlowContext& ctx);

/// Integrates from the Yamabe normalization of g0 up to the horizon. The
/// callback, if set, sees every state including the initial one.
std::vector<DiagnosticRecord> run_conformal(const MetricField& g0, const FlowContext& ctx, double horizon,
                                            const std::function<void(const FlowState&)>& on_state = {});

struct ClassicalRecord {
    int step = 0;
    double t = 0.0;
    double volume = 0.0;
    double volume_defect = 0.0;  // vol - 1
    double r_min = 0.0, r_max = 0.0;
    double r_mean = 0.0;  // R_total / vol
    bool r_min_decreased = false;  // flagged only while R_min <= 0
};

/// dg/dt = -2 Ric + (2/n) (R_total / vol) g after rescaling g0 to unit volume.
/// Uses ctx.cfg.method (RK4 recommended), dt and DeTurck settings.
std::vector<ClassicalRecord> run_classical(const MetricField& g0, const FlowContext& ctx, double horizon,
                                           const std::function<void(double t, const MetricField&)>& on_state = {});

/// int_D dmu_g over each box. Throws EmptyDomain for empty or out-of-range boxes.
std::vector<double> local_volumes(const Geometry& geo, const std::vector<IndexBox>& domains);
std::vector<double> local_volumes(const FlowState& s, const std::vector<IndexBox>& domains);

}  // namespace crflow
