#pragma once

#include <utility>
#include <vector>

#include "shocklab/solver.hpp"
#include "shocklab/system.hpp"

namespace shocklab {

/// Parameters of the tracking velocity functional
///   V(u) = min{ F(u, u_ref)/eta(u | u_ref), lambda_-(u) } - eps,
/// with the ratio replaced by its limit bound lambda_-(u_ref) when
/// eta(u | u_ref) < eta_floor, and the min dropped to the ratio branch on
/// the singular set (where lambda_- is unreliable).
struct VelocityParams {
    double eps = 0.0;
    double eta_floor = 1e-12;
    Vec u_left_ref;
};

/// A discrete Lipschitz path x(t) advanced in lockstep with the solver.
/// Sample k carries the velocity and one-sided traces evaluated from the
/// solution at time t[k]; the last sample stays pending until the next
/// advance (or finalize) provides that field.
struct ShiftPath {
    std::vector<double> t, x, v;
    std::vector<Vec> u_minus, u_plus;
    double window = 0.0;
    int k_cells = 4;
    int layer_skip = 3;
    double max_windowed_speed = 0.0;

    int finalized() const { return static_cast<int>(v.size()); }
    int size() const { return static_cast<int>(t.size()); }
};

/// The tracking velocity of a single state. Total on the domain closure.
double velocity_functional(const SystemSpec& sys, const Vec& u,
                           const VelocityParams& params);

/// Overlap-weighted average of the tracking velocity over (x, x + window).
/// Lipschitz in x; throws OutOfDomain if the window leaves the grid.
double windowed_velocity(const SystemSpec& sys, const Field& field, double x,
                         double window, const VelocityParams& params);

/// One-sided cell averages about x: k_cells cells per side, stepping over
/// layer_skip cells next to x to clear the captured jump layer.
std::pair<Vec, Vec> extract_traces(const Field& field, double x, int k_cells,
                                   int layer_skip);

/// Starts a path at x0 with a pending first sample.
ShiftPath init_shift(double x0, double window, int k_cells, int layer_skip);

/// Completes the pending sample from `field` (the solution at the path's
/// current time) and, for dt > 0, appends the forward-Euler step
/// x <- x + dt v as the new pending sample. dt must equal the solver step
/// taken from this field.
void advance_shift(ShiftPath& path, const SystemSpec& sys, const Field& field, double dt,
                   const VelocityParams& params);

/// Completes the pending sample at the end of a run.
void finalize_shift(ShiftPath& path, const SystemSpec& sys, const Field& field,
                    const VelocityParams& params);

/// Per-sample sandwich audit V_min(t) <= x'(t) <= V_max(t), where V_min is
/// -infinity whenever a trace lies in the singular set. The slack defaults
/// to window * Lip_est + 1e-6 with Lip_est measured from the trace
/// velocities along the path (a reporting convention; the continuum
/// statement has no slack).
struct FilippovReport {
    std::vector<double> vmin, vmax; // per sample (vmin may be -inf)
    int samples = 0;
    int violations = 0;
    double violation_fraction = 0.0;
    double slack = 0.0;
};

FilippovReport filippov_check(const ShiftPath& path, const SystemSpec& sys,
                              const VelocityParams& params, double slack = -1.0);

/// Jump-relation and entropy-inequality residuals of the trace pairs along
/// the path, measured both against the path velocity x' (which carries the
/// built-in -eps drift) and against the least-squares speed of the traces.
struct TraceJumpAudit {
    int jump_samples = 0;
    double mean_rh_vs_xprime = 0.0, max_rh_vs_xprime = 0.0;
    double mean_rh_vs_sigma = 0.0, max_rh_vs_sigma = 0.0;
    double max_entropy_excess_vs_sigma = 0.0;  // positive part, trace speed
    double max_entropy_excess_vs_xprime = 0.0; // positive part, path speed
    std::vector<double> rh_vs_xprime; // per sample; NaN at continuity samples
};

TraceJumpAudit trace_jump_audit(const ShiftPath& path, const SystemSpec& sys,
                                double jump_tol, double t_min = 0.0);

} // namespace shocklab
