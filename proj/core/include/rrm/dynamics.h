#pragma once

#include <vector>

#include "rrm/manifold.h"
#include "rrm/methods.h"
#include "rrm/objective.h"

namespace rrm {

struct FlowIntegrator {
  /// Inner step; must be in (0, 1e-2].
  double dt = 1e-3;
};

/// Position after time h of the Riemannian gradient flow x' = -grad f(x).
/// Each sub-step combines RK4 stages in T_x (stage values transported back to
/// x along the stage geodesic) and exp-maps the result.
Point flow(const Manifold& m, const Objective& f, const Point& x, double h,
           const FlowIntegrator& integrator = {});

/// Largest n with tau_n <= t (n counted from traj.start_index).
long tinv(const Trajectory& traj, double t);

/// alpha(t) = exp_{x_n}((t - tau_n) v_hat_n) with n = tinv(t). Requires
/// recorded surrogates and tau_first <= t <= tau_last.
Point geodesic_interpolation(const Manifold& m, const Trajectory& traj,
                             double t);

/// sup over an equispaced grid of h in [0, T] of
/// dist(alpha(t + h), flow(alpha(t), h)).
double apt_deviation(const Manifold& m, const Objective& f,
                     const Trajectory& traj, double t, double window,
                     int probe_grid = 64, const FlowIntegrator& integrator = {});

struct AptReport {
  double window = 1.0;
  std::vector<long> probe_indices;
  std::vector<double> probe_times;
  std::vector<double> deviations;
};

/// Deviation at t = tau_n for each requested n; indices whose window does not
/// fit in the trajectory are skipped.
AptReport apt_report(const Manifold& m, const Objective& f,
                     const Trajectory& traj, const std::vector<long>& indices,
                     double window, int probe_grid = 64,
                     const FlowIntegrator& integrator = {});

/// Per step |Lambda(x_n, gamma_n v_hat_n)| / gamma_n^2.
std::vector<double> offset_scaling_probe(const Manifold& m,
                                         const Objective& f,
                                         const Trajectory& traj);

}  // namespace rrm
