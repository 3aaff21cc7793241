#pragma once

#include <optional>

#include "rrm/manifold.h"

namespace rrm {

/// Angle coordinates on the embedded torus: theta is the minor (tube) angle,
/// zero on the outer equator; phi is the major angle around the z-axis.
struct TorusAngles {
  double theta = 0.0;
  double phi = 0.0;
};

struct TorusOptions {
  /// Upper bound on the arc length covered by one RK4 step of the geodesic
  /// and transport ODEs.
  double arc_step = 1e-3;
  int shooting_max_iters = 100;
  double shooting_tol = 1e-10;
};

/// Torus of revolution ((R + r cos t) cos p, (R + r cos t) sin p, r sin t)
/// with the induced metric. Geodesics, logarithms and parallel transport are
/// computed numerically in (theta, phi) coordinates.
class Torus final : public Manifold {
 public:
  Torus(double major_radius, double minor_radius, TorusOptions options = {});

  ManifoldKind kind() const override { return ManifoldKind::TorusEmbedded; }
  std::string name() const override;
  int intrinsic_dim() const override { return 2; }
  int coord_dim() const override { return 3; }
  /// Heuristic guard pi * r * (1 - r / R) / 2, well inside the true radius.
  double injectivity_lower_bound() const override;

  double membership_residual(const Vec& x) const override;
  double tangency_residual(const Vec& x, const Vec& v) const override;
  Vec project_tangent(const Vec& x, const Vec& v) const override;
  Vec riemannian_gradient(const Vec& x, const Vec& egrad) const override;

  double inner(const Vec& x, const Vec& u, const Vec& v) const override;
  Vec exp(const Vec& x, const Vec& v) const override;
  Vec log(const Vec& x, const Vec& y) const override;
  Vec transport(const Vec& x, const Vec& y, const Vec& v) const override;
  double dist(const Vec& x, const Vec& y) const override;
  Vec retract(const Vec& x, const Vec& v, RetractionKind kind) const override;
  Vec transport_from_endpoint(const Vec& x, const Vec& step,
                              const Vec& u) const override;
  /// Normalized coordinate vectors d/dtheta, d/dphi.
  Mat tangent_frame(const Vec& x) const override;

  double major_radius() const { return R_; }
  double minor_radius() const { return r_; }
  const TorusOptions& options() const { return options_; }

  TorusAngles angles(const Vec& x) const;
  Vec embed(const TorusAngles& a) const;
  Vec unit_normal(const Vec& x) const;

  /// Geodesic from x with initial velocity v, sampled at unit time. Returns the
  /// endpoint and the endpoint velocity (both ambient).
  std::pair<Vec, Vec> geodesic_endpoint(const Vec& x, const Vec& v) const;

  /// Shooting solve for the initial velocity of a geodesic from x to y,
  /// starting from the given coordinate velocity guess (dtheta, dphi).
  /// No injectivity guard; empty on non-convergence.
  std::optional<Vec> shoot(const Vec& x, const Vec& y,
                           const Eigen::Vector2d& guess) const;

 private:
  std::optional<Vec> shoot_with(const Vec& x, const Vec& y,
                                const Eigen::Vector2d& guess, double arc_step,
                                double tol, int max_iters) const;

  double R_;
  double r_;
  TorusOptions options_;
};

}  // namespace rrm
