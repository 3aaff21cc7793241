#include "rrm/objective.h"

#include <Eigen/Eigenvalues>
#include <numbers>

#include "rrm/torus.h"

namespace rrm {

QuadraticObjective::QuadraticObjective(Mat a, Vec b, double c, std::string name)
    : a_(std::move(a)), b_(std::move(b)), c_(c), name_(std::move(name)) {
  if (a_.rows() != a_.cols() || a_.rows() != b_.size()) {
    throw ContractViolation("quadratic objective: inconsistent dimensions");
  }
  if ((a_ - a_.transpose()).lpNorm<Eigen::Infinity>() > 1e-12) {
    throw ContractViolation("quadratic objective: matrix must be symmetric");
  }
}

double QuadraticObjective::value(const Vec& x) const {
  return x.dot(a_ * x) + b_.dot(x) + c_;
}

Vec QuadraticObjective::gradient(const Vec& x) const {
  return 2.0 * (a_ * x) + b_;
}

std::vector<CriticalCandidate> QuadraticObjective::critical_candidates(
    const Manifold& m) const {
  std::vector<CriticalCandidate> out;
  if (m.kind() != ManifoldKind::Sphere || b_.lpNorm<Eigen::Infinity>() != 0.0) {
    return out;
  }
  const Mat off_diag = a_ - Mat(a_.diagonal().asDiagonal());
  const bool diagonal = off_diag.lpNorm<Eigen::Infinity>() == 0.0;
  const int n = static_cast<int>(a_.rows());
  Mat vecs = Mat::Identity(n, n);
  if (!diagonal) {
    Eigen::SelfAdjointEigenSolver<Mat> solver(a_);
    vecs = solver.eigenvectors();
  }
  const char stem = diagonal ? 'e' : 'q';
  for (int i = 0; i < n; ++i) {
    const std::string idx = std::string(1, stem) + std::to_string(i + 1);
    out.push_back({vecs.col(i), "+" + idx});
    out.push_back({-vecs.col(i), "-" + idx});
  }
  return out;
}

Vec TorusHeight::gradient(const Vec& x) const {
  Vec g = Vec::Zero(x.size());
  g(0) = 1.0;
  return g;
}

std::vector<CriticalCandidate> TorusHeight::critical_candidates(
    const Manifold& m) const {
  const auto* torus = dynamic_cast<const Torus*>(&m);
  if (torus == nullptr) return {};
  constexpr double pi = std::numbers::pi;
  return {
      {torus->embed({0.0, 0.0}), "(0,0)"},
      {torus->embed({pi, 0.0}), "(pi,0)"},
      {torus->embed({0.0, pi}), "(0,pi)"},
      {torus->embed({pi, pi}), "(pi,pi)"},
  };
}

FiniteSumObjective::FiniteSumObjective(std::vector<ObjectivePtr> components)
    : components_(std::move(components)) {
  if (components_.empty()) {
    throw ContractViolation("finite-sum objective needs at least one component");
  }
}

double FiniteSumObjective::value(const Vec& x) const {
  double total = 0.0;
  for (const auto& c : components_) total += c->value(x);
  return total / static_cast<double>(components_.size());
}

Vec FiniteSumObjective::gradient(const Vec& x) const {
  Vec total = Vec::Zero(x.size());
  for (const auto& c : components_) total += c->gradient(x);
  return total / static_cast<double>(components_.size());
}

ObjectivePtr make_rayleigh(const Vec& diag) {
  return std::make_shared<QuadraticObjective>(
      Mat(diag.asDiagonal()), Vec::Zero(diag.size()), 0.0, "rayleigh");
}

ObjectivePtr make_linear(const Vec& c) {
  return std::make_shared<QuadraticObjective>(Mat::Zero(c.size(), c.size()), c,
                                              0.0, "linear");
}

ObjectivePtr make_constant(int dim, double value) {
  return std::make_shared<QuadraticObjective>(Mat::Zero(dim, dim),
                                              Vec::Zero(dim), value, "constant");
}

ObjectivePtr make_half_squared_norm(int dim) {
  return std::make_shared<QuadraticObjective>(0.5 * Mat::Identity(dim, dim),
                                              Vec::Zero(dim), 0.0,
                                              "half_squared_norm");
}

ObjectivePtr make_torus_height() { return std::make_shared<TorusHeight>(); }

}  // namespace rrm
