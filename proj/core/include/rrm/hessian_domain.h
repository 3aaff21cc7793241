#pragma once

#include "rrm/manifold.h"

namespace rrm {

/// Legendre function h generating the metric G(x) = hess h(x).
///   NegativeEntropy: h = sum x_i log x_i on the open simplex, G = diag(1/x).
///   LogBarrier:      h = -sum log x_i on the open orthant, G = diag(1/x^2).
///   Euclidean:       h = |x|^2 / 2 on R^d, G = I (flat reference case).
enum class LegendreKind { NegativeEntropy, LogBarrier, Euclidean };

std::string to_string(LegendreKind kind);

/// Open convex domain with a Hessian-Riemannian metric.
///
/// Geodesics are available in closed form for all three Legendre kinds: the
/// simplex with G = diag(1/x) is isometric to the positive orthant of the
/// radius-2 sphere via s = 2 sqrt(x); the log-barrier metric is flat in
/// log x. Exponential steps that leave the domain raise DomainEscape.
class HessianDomain final : public Manifold {
 public:
  HessianDomain(LegendreKind legendre, int dim);

  ManifoldKind kind() const override { return ManifoldKind::HessianRiemannian; }
  std::string name() const override;
  int intrinsic_dim() const override;
  int coord_dim() const override { return dim_; }
  double injectivity_lower_bound() const override;
  bool has_ambient_embedding() const override { return false; }

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
  Mat tangent_frame(const Vec& x) const override;

  LegendreKind legendre() const { return legendre_; }

  /// Diagonal of G(x).
  Vec metric_diagonal(const Vec& x) const;
  /// Tangent (primal) vector to dual vector: G(x) v.
  Vec to_dual(const Vec& x, const Vec& v) const;
  /// P_x(y) = grad h*(grad h(x) + y).
  Vec prox(const Vec& x, const Vec& y) const;

 private:
  LegendreKind legendre_;
  int dim_;
};

/// Checked prox-mapping; throws ContractViolation if `m` is not a
/// Hessian-Riemannian domain.
Point prox_mapping(const Manifold& m, const Point& x, const Vec& dual);

}  // namespace rrm
