#pragma once

#include "warpstab/functionals.hpp"
#include "warpstab/hypersurface.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace warpstab {

enum class FlowKind { Constrained, IMCF };

const char* to_string(FlowKind kind);
FlowKind flow_kind_from_string(const std::string& name);

struct FlowControls {
    FlowKind flow_kind = FlowKind::Constrained;
    double dt_init = 1e-3;
    double dt_min = 1e-9;
    double dt_max = 0.05;
    double cfl = 0.15;
    double t_max = 5.0;
    double tol_umbilic = 1e-6;
    bool stop_when_umbilic = true;
    int monitor_every = 10;
    int max_steps = 1000000;
    double guard_eps = 1e-8;
    /// Deficit recorded per snapshot; also selects the dissipation integrand.
    std::optional<Theorem> theorem;
    int table_samples = 1024;

    void validate() const;
};

enum class Termination { Umbilic, TMax, GuardTripped };

const char* to_string(Termination t);

struct FlowSnapshot {
    double t = 0.0;
    int step = 0;
    double area = 0.0;
    double volume = 0.0;
    double int_H1 = 0.0;
    double ricci_term = 0.0;      // (1/n) int over the enclosed region of Ric(d_r, d_r)
    double monotone_B = 0.0;      // int_H1 + ricci_term
    double deficit = 0.0;         // NaN when no theorem is configured or it cannot be evaluated
    double dissipation = 0.0;     // instantaneous dissipation integral
    double cumulative_dissipation = 0.0;
    double discount = 1.0;                // (|S_0|/|S_t|)^((n-1)/n) for T3 under IMCF, else 1
    double discounted_dissipation = 0.0;  // int discount * dissipation dt
    double sup_aring = 0.0;
    double aring_lp = 0.0;
    double convexity_margin = 0.0;
    double min_H = 0.0;
    double max_speed = 0.0;       // sup |speed| on this surface
    double displacement = 0.0;    // max over nodes of int |speed| dt (normal path length)
    double radial_displacement = 0.0;  // sup |r_t - r_0|
    double dist_estimate = 0.0;   // min of the two upper bounds on the Hausdorff distance to the initial surface
    double displacement_bound = 0.0;   // max_{[0,t]} sup|speed| * t
    double ricci_normal_margin = 0.0;  // min Ric(nu, nu) + n c with Ric >= -n c sampled over the space
    double areal_radius = 0.0;    // static models
    double W = 0.0, Q_initial = 0.0, Q_current = 0.0;  // static models under IMCF
};

struct FlowTrace {
    FlowKind flow_kind = FlowKind::Constrained;
    std::optional<Theorem> theorem;
    std::vector<FlowSnapshot> snapshots;
    Termination termination = Termination::TMax;
    std::string reason;
    int steps = 0;
    int rejected = 0;
    double initial_area = 0.0;

    const FlowSnapshot& front() const { return snapshots.front(); }
    const FlowSnapshot& back() const { return snapshots.back(); }
    std::vector<double> times() const;
};

/// lambda' H1 / H2 - u per node. Throws GuardError where H2 <= eps.
std::vector<double> speed_constrained(const GeometryFields& g, double eps = 1e-8);
/// 1 / H per node. Throws GuardError where H <= eps.
std::vector<double> speed_imcf(const GeometryFields& g, double eps = 1e-8);
std::vector<double> flow_speed(FlowKind kind, const GeometryFields& g, double eps = 1e-8);

/// Right-hand side of the graph equation d r / dt = speed v.
std::vector<double> graph_velocity(FlowKind kind, const GraphSurface& surface, double eps = 1e-8);

/// Linear diffusion coefficient of the graph equation per unit sphere metric, sup over nodes.
double diffusion_coefficient(FlowKind kind, const GeometryFields& g);

/// Stable time step cfl * h^2 / D for the current surface, h the grid spacing.
double stable_dt(FlowKind kind, const GraphSurface& surface, const GeometryFields& g, double cfl);

struct StepResult {
    bool accepted = false;
    std::optional<GraphSurface> surface;
    std::string reason;  // rejection reason
};

/// One classical RK4 step of the graph equation. Rejects (without throwing) when dt exceeds
/// stable_dt(..., cfl_limit), a stage leaves the domain or trips a guard, or the spectral tail of
/// r jumps.
StepResult step(FlowKind kind, const GraphSurface& surface, double dt, double eps = 1e-8, double cfl_limit = 1.0);

/// Instantaneous dissipation integrand for a theorem (see FlowTrace docs in the README).
double dissipation_integral(FlowKind kind, std::optional<Theorem> theorem, const GraphSurface& surface,
                            const GeometryFields& g, double initial_area);

using FlowMonitor = std::function<void(const FlowSnapshot&, const GraphSurface&)>;

/// Integrates until umbilic, t_max or a guard. Never throws on numerical trouble; the reason is
/// recorded in the trace. Throws ConfigError on invalid controls and HypothesisError when the
/// initial surface violates the flow's convexity precondition.
FlowTrace run(const GraphSurface& initial, const FlowControls& controls, const FlowMonitor& monitor = {},
              GraphSurface* final_surface = nullptr);

} // namespace warpstab
