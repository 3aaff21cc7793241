#include "rrm/hessian_domain.h"

#include <limits>
#include <numbers>

namespace rrm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Unit-sphere primitives used through the simplex's sphere chart.
Vec unit_sphere_exp(const Vec& u, const Vec& du) {
  const double t = du.norm();
  if (t == 0.0) return u;
  return std::cos(t) * u + (std::sin(t) / t) * du;
}

Vec unit_sphere_log(const Vec& u, const Vec& w) {
  const double c = u.dot(w);
  const Vec p = w - c * u;
  const double s = p.norm();
  if (s == 0.0) return Vec::Zero(u.size());
  return (std::atan2(s, c) / s) * p;
}

void require_interior(const Vec& x, const char* what) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x(i) > 0.0)) throw DomainEscape(std::string(what) + " left the domain");
  }
}

}  // namespace

std::string to_string(LegendreKind kind) {
  switch (kind) {
    case LegendreKind::NegativeEntropy:
      return "NegativeEntropy";
    case LegendreKind::LogBarrier:
      return "LogBarrier";
    case LegendreKind::Euclidean:
      return "Euclidean";
  }
  return "?";
}

HessianDomain::HessianDomain(LegendreKind legendre, int dim)
    : legendre_(legendre), dim_(dim) {
  const int min_dim = legendre == LegendreKind::NegativeEntropy ? 2 : 1;
  if (dim < min_dim) {
    throw ContractViolation("Hessian domain dimension too small for " +
                            to_string(legendre));
  }
}

std::string HessianDomain::name() const {
  return "Hessian(" + to_string(legendre_) + "," + std::to_string(dim_) + ")";
}

int HessianDomain::intrinsic_dim() const {
  return legendre_ == LegendreKind::NegativeEntropy ? dim_ - 1 : dim_;
}

double HessianDomain::injectivity_lower_bound() const {
  // The simplex chart covers an open octant of the radius-2 sphere, whose
  // diameter is pi; the other two metrics are flat in suitable coordinates.
  return legendre_ == LegendreKind::NegativeEntropy ? std::numbers::pi : kInf;
}

double HessianDomain::membership_residual(const Vec& x) const {
  if (legendre_ == LegendreKind::Euclidean) return 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x(i) > 0.0)) return kInf;
  }
  if (legendre_ == LegendreKind::NegativeEntropy) return std::abs(x.sum() - 1.0);
  return 0.0;
}

double HessianDomain::tangency_residual(const Vec&, const Vec& v) const {
  return legendre_ == LegendreKind::NegativeEntropy ? std::abs(v.sum()) : 0.0;
}

Vec HessianDomain::metric_diagonal(const Vec& x) const {
  switch (legendre_) {
    case LegendreKind::NegativeEntropy:
      return x.cwiseInverse();
    case LegendreKind::LogBarrier:
      return x.cwiseProduct(x).cwiseInverse();
    case LegendreKind::Euclidean:
      break;
  }
  return Vec::Ones(x.size());
}

Vec HessianDomain::to_dual(const Vec& x, const Vec& v) const {
  return metric_diagonal(x).cwiseProduct(v);
}

Vec HessianDomain::project_tangent(const Vec& x, const Vec& v) const {
  // The G-normal of {sum v = 0} is G^{-1} 1 = x.
  if (legendre_ == LegendreKind::NegativeEntropy) return v - v.sum() * x;
  return v;
}

Vec HessianDomain::riemannian_gradient(const Vec& x, const Vec& egrad) const {
  const Vec raw = metric_diagonal(x).cwiseInverse().cwiseProduct(egrad);
  return project_tangent(x, raw);
}

double HessianDomain::inner(const Vec& x, const Vec& u, const Vec& v) const {
  return u.dot(metric_diagonal(x).cwiseProduct(v));
}

Vec HessianDomain::exp(const Vec& x, const Vec& v) const {
  switch (legendre_) {
    case LegendreKind::Euclidean:
      return x + v;
    case LegendreKind::LogBarrier:
      return x.cwiseProduct(v.cwiseQuotient(x).array().exp().matrix());
    case LegendreKind::NegativeEntropy: {
      const Vec sq = x.cwiseSqrt();
      const Vec u = sq;  // s / 2 on the unit sphere
      const Vec du = v.cwiseQuotient(sq) / 2.0;
      const Vec w = unit_sphere_exp(u, du);
      for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (!(w(i) > 0.0)) throw DomainEscape("entropy geodesic left the simplex");
      }
      const Vec y = w.cwiseProduct(w);
      return y / y.sum();
    }
  }
  return x;
}

Vec HessianDomain::log(const Vec& x, const Vec& y) const {
  switch (legendre_) {
    case LegendreKind::Euclidean:
      return y - x;
    case LegendreKind::LogBarrier:
      return x.cwiseProduct(y.cwiseQuotient(x).array().log().matrix());
    case LegendreKind::NegativeEntropy: {
      const Vec u = x.cwiseSqrt();
      const Vec w = y.cwiseSqrt();
      const Vec du = unit_sphere_log(u, w);
      return project_tangent(x, 2.0 * u.cwiseProduct(du));
    }
  }
  return Vec::Zero(x.size());
}

Vec HessianDomain::transport(const Vec& x, const Vec& y, const Vec& v) const {
  switch (legendre_) {
    case LegendreKind::Euclidean:
      return v;
    case LegendreKind::LogBarrier:
      return v.cwiseProduct(y.cwiseQuotient(x));
    case LegendreKind::NegativeEntropy: {
      const Vec u = x.cwiseSqrt();
      const Vec w = y.cwiseSqrt();
      const Vec du = v.cwiseQuotient(u) / 2.0;
      const double denom = 1.0 + u.dot(w);
      const Vec dw = du - (w.dot(du) / denom) * (u + w);
      return project_tangent(y, 2.0 * w.cwiseProduct(dw));
    }
  }
  return v;
}

double HessianDomain::dist(const Vec& x, const Vec& y) const {
  switch (legendre_) {
    case LegendreKind::Euclidean:
      return (y - x).norm();
    case LegendreKind::LogBarrier:
      return (y.array().log() - x.array().log()).matrix().norm();
    case LegendreKind::NegativeEntropy: {
      const Vec u = x.cwiseSqrt();
      const Vec w = y.cwiseSqrt();
      const double c = u.dot(w);
      return 2.0 * std::atan2((w - c * u).norm(), c);
    }
  }
  return 0.0;
}

Vec HessianDomain::prox(const Vec& x, const Vec& y) const {
  switch (legendre_) {
    case LegendreKind::Euclidean:
      return x + y;
    case LegendreKind::LogBarrier: {
      const Vec denom = Vec::Ones(x.size()) - x.cwiseProduct(y);
      for (Eigen::Index i = 0; i < denom.size(); ++i) {
        if (!(denom(i) > 0.0)) {
          throw DomainEscape("log-barrier prox: x_i y_i >= 1");
        }
      }
      return x.cwiseQuotient(denom);
    }
    case LegendreKind::NegativeEntropy: {
      const double shift = y.maxCoeff();
      const Vec w =
          x.cwiseProduct((y.array() - shift).exp().matrix());
      return w / w.sum();
    }
  }
  return x;
}

Vec HessianDomain::retract(const Vec& x, const Vec& v,
                           RetractionKind kind) const {
  switch (kind) {
    case RetractionKind::Exponential:
      return exp(x, v);
    case RetractionKind::Prox:
      return prox(x, to_dual(x, v));
    case RetractionKind::Projection: {
      Vec y = x + v;
      if (legendre_ != LegendreKind::Euclidean) require_interior(y, "linear step");
      return y;
    }
  }
  return x;
}

Mat HessianDomain::tangent_frame(const Vec& x) const {
  const int d = intrinsic_dim();
  Mat frame(dim_, d);
  int found = 0;
  for (int i = 0; i < dim_ && found < d; ++i) {
    Vec w = Vec::Zero(dim_);
    w(i) = 1.0;
    w = project_tangent(x, w);
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < found; ++k) {
        w -= inner(x, frame.col(k), w) * frame.col(k);
      }
    }
    const double n = norm(x, w);
    if (n < 1e-8) continue;
    frame.col(found++) = w / n;
  }
  if (found != d) throw Error("Hessian-domain frame construction failed");
  return frame;
}

Point prox_mapping(const Manifold& m, const Point& x, const Vec& dual) {
  const auto* domain = dynamic_cast<const HessianDomain*>(&m);
  if (domain == nullptr) {
    throw ContractViolation("prox mapping needs a Hessian-Riemannian domain");
  }
  if (!dual.allFinite()) throw NonFiniteInput("non-finite dual vector");
  if (dual.size() != m.coord_dim()) {
    throw ContractViolation("dual vector has the wrong dimension");
  }
  return Point{domain->prox(x.coords, dual)};
}

}  // namespace rrm
