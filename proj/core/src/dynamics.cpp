#include "rrm/dynamics.h"

#include <algorithm>
#include <cmath>

namespace rrm {

namespace {

Vec drift(const Manifold& m, const Objective& f, const Vec& x) {
  return -m.riemannian_gradient(x, f.gradient(x));
}

// One RK4 step of length dt; stage velocities are pulled back to T_x.
Vec rk4_step(const Manifold& m, const Objective& f, const Vec& x, double dt) {
  const Vec k1 = drift(m, f, x);
  const Vec s2 = 0.5 * dt * k1;
  const Vec k2 = m.transport_from_endpoint(x, s2, drift(m, f, m.exp(x, s2)));
  const Vec s3 = 0.5 * dt * k2;
  const Vec k3 = m.transport_from_endpoint(x, s3, drift(m, f, m.exp(x, s3)));
  const Vec s4 = dt * k3;
  const Vec k4 = m.transport_from_endpoint(x, s4, drift(m, f, m.exp(x, s4)));
  return m.exp(x, (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

}  // namespace

Point flow(const Manifold& m, const Objective& f, const Point& x, double h,
           const FlowIntegrator& integrator) {
  if (!(h >= 0.0)) throw ContractViolation("flow time must be >= 0");
  if (!(integrator.dt > 0.0 && integrator.dt <= 1e-2)) {
    throw ContractViolation("flow integrator dt must be in (0, 1e-2]");
  }
  if (h == 0.0) return x;
  const long steps = static_cast<long>(std::ceil(h / integrator.dt - 1e-9));
  const double dt = h / static_cast<double>(std::max(1L, steps));
  Vec y = x.coords;
  for (long i = 0; i < std::max(1L, steps); ++i) y = rk4_step(m, f, y, dt);
  return Point{std::move(y)};
}

long tinv(const Trajectory& traj, double t) {
  const auto& tau = traj.effective_times;
  if (tau.empty()) throw ContractViolation("empty trajectory");
  if (t < tau.front()) throw ContractViolation("t precedes the first iterate");
  const auto it = std::upper_bound(tau.begin(), tau.end(), t);
  return traj.start_index + static_cast<long>(it - tau.begin()) - 1;
}

Point geodesic_interpolation(const Manifold& m, const Trajectory& traj,
                             double t) {
  const auto& tau = traj.effective_times;
  if (tau.empty() || t < tau.front() || t > tau.back()) {
    throw ContractViolation("interpolation time outside the trajectory");
  }
  if (traj.points.size() != tau.size()) {
    throw ContractViolation("interpolation needs a fully recorded trajectory");
  }
  const std::size_t idx = static_cast<std::size_t>(tinv(traj, t) - traj.start_index);
  if (idx + 1 == traj.points.size()) return traj.points[idx];
  if (idx >= traj.step_records.size()) {
    throw ContractViolation("interpolation needs recorded surrogates");
  }
  const Point& x = traj.points[idx];
  const double s = t - tau[idx];
  if (s == 0.0) return x;
  return Point{m.exp(x.coords, s * traj.step_records[idx].value.vec)};
}

double apt_deviation(const Manifold& m, const Objective& f,
                     const Trajectory& traj, double t, double window,
                     int probe_grid, const FlowIntegrator& integrator) {
  if (!(window > 0.0)) throw ContractViolation("APT window must be positive");
  if (probe_grid < 2) throw ContractViolation("APT probe grid needs >= 2 points");
  if (traj.effective_times.empty() || t + window > traj.effective_times.back()) {
    throw ContractViolation("APT window runs past the trajectory");
  }
  const double dh = window / static_cast<double>(probe_grid - 1);
  Point flowed = geodesic_interpolation(m, traj, t);
  double worst = 0.0;
  // Phi_{h+dh}(y) = Phi_dh(Phi_h(y)), so the flow advances grid cell by cell.
  for (int j = 1; j < probe_grid; ++j) {
    flowed = flow(m, f, flowed, dh, integrator);
    const double h = j == probe_grid - 1 ? window : j * dh;
    const Point path = geodesic_interpolation(m, traj, t + h);
    worst = std::max(worst, m.dist(path.coords, flowed.coords));
  }
  return worst;
}

AptReport apt_report(const Manifold& m, const Objective& f,
                     const Trajectory& traj, const std::vector<long>& indices,
                     double window, int probe_grid,
                     const FlowIntegrator& integrator) {
  AptReport report;
  report.window = window;
  const auto& tau = traj.effective_times;
  for (long n : indices) {
    const long idx = n - traj.start_index;
    if (idx < 0 || idx >= static_cast<long>(tau.size())) continue;
    const double t = tau[static_cast<std::size_t>(idx)];
    if (t + window > tau.back()) continue;
    report.probe_indices.push_back(n);
    report.probe_times.push_back(t);
    report.deviations.push_back(
        apt_deviation(m, f, traj, t, window, probe_grid, integrator));
  }
  return report;
}

std::vector<double> offset_scaling_probe(const Manifold& m, const Objective&,
                                         const Trajectory& traj) {
  if (!m.has_ambient_embedding()) {
    throw UnsupportedOperation("offset probe needs an ambient embedding");
  }
  if (traj.step_records.size() != traj.step_sizes.size()) {
    throw ContractViolation("offset probe needs recorded surrogates");
  }
  std::vector<double> out;
  out.reserve(traj.step_sizes.size());
  for (std::size_t k = 0; k < traj.step_sizes.size(); ++k) {
    const double g = traj.step_sizes[k];
    const SurrogateGradient& s = traj.step_records[k];
    const Tangent step{s.base, g * s.value.vec};
    out.push_back(geodesic_offset(m, s.base, step).norm() / (g * g));
  }
  return out;
}

}  // namespace rrm
