#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rrm/manifold.h"
#include "rrm/types.h"

namespace rrm {

/// A labelled starting guess for critical-point refinement.
struct CriticalCandidate {
  Vec coords;
  std::string label;
};

/// Smooth objective f, evaluated in the manifold's coordinate convention.
/// `gradient` is the coordinate (Euclidean) gradient; manifolds turn it into
/// the Riemannian one.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual std::string name() const = 0;
  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;
  /// Known critical points on `m` (may be empty).
  virtual std::vector<CriticalCandidate> critical_candidates(
      const Manifold& m) const {
    (void)m;
    return {};
  }
};

using ObjectivePtr = std::shared_ptr<const Objective>;

/// f(x) = x^T A x + b^T x + c with symmetric A.
class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(Mat a, Vec b, double c, std::string name);

  std::string name() const override { return name_; }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  /// On a sphere with b = 0: the signed unit eigenvectors of A, labelled
  /// "+e1", "-e1", ... when A is diagonal and "+q1", ... otherwise.
  std::vector<CriticalCandidate> critical_candidates(
      const Manifold& m) const override;

  const Mat& matrix() const { return a_; }
  const Vec& linear() const { return b_; }

 private:
  Mat a_;
  Vec b_;
  double c_;
  std::string name_;
};

/// Height function f(p) = p_x on the embedded torus. Its four critical points
/// sit at (theta, phi) in {0, pi}^2.
class TorusHeight final : public Objective {
 public:
  std::string name() const override { return "torus_height"; }
  double value(const Vec& x) const override { return x(0); }
  Vec gradient(const Vec& x) const override;
  std::vector<CriticalCandidate> critical_candidates(
      const Manifold& m) const override;
};

/// f = (1/N) sum_i f_i.
class FiniteSumObjective final : public Objective {
 public:
  explicit FiniteSumObjective(std::vector<ObjectivePtr> components);

  std::string name() const override { return "finite_sum"; }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  const std::vector<ObjectivePtr>& components() const { return components_; }

 private:
  std::vector<ObjectivePtr> components_;
};

/// x^T diag(d) x.
ObjectivePtr make_rayleigh(const Vec& diag);
ObjectivePtr make_linear(const Vec& c);
ObjectivePtr make_constant(int dim, double value);
/// |x|^2 / 2.
ObjectivePtr make_half_squared_norm(int dim);
ObjectivePtr make_torus_height();

}  // namespace rrm
