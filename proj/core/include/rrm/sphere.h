#pragma once

#include "rrm/manifold.h"

namespace rrm {

/// Unit sphere S^{n-1} in R^n with the induced metric. All primitives are
/// closed form.
class Sphere final : public Manifold {
 public:
  explicit Sphere(int ambient_dim);

  ManifoldKind kind() const override { return ManifoldKind::Sphere; }
  std::string name() const override;
  int intrinsic_dim() const override { return ambient_dim_ - 1; }
  int coord_dim() const override { return ambient_dim_; }
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
  /// Gram-Schmidt over the projected ambient basis, visiting coordinate axes
  /// in order of increasing |x_i| (ties by index).
  Mat tangent_frame(const Vec& x) const override;

 private:
  int ambient_dim_;
};

}  // namespace rrm
