#include "rrm/sphere.h"

#include <numbers>
#include <numeric>

namespace rrm {

Sphere::Sphere(int ambient_dim) : ambient_dim_(ambient_dim) {
  if (ambient_dim < 2) {
    throw ContractViolation("sphere needs ambient dimension >= 2");
  }
}

std::string Sphere::name() const {
  return "S^" + std::to_string(ambient_dim_ - 1);
}

double Sphere::injectivity_lower_bound() const { return std::numbers::pi; }

double Sphere::membership_residual(const Vec& x) const {
  return std::abs(x.norm() - 1.0);
}

double Sphere::tangency_residual(const Vec& x, const Vec& v) const {
  return std::abs(x.dot(v));
}

Vec Sphere::project_tangent(const Vec& x, const Vec& v) const {
  return v - (x.dot(v) / x.squaredNorm()) * x;
}

Vec Sphere::riemannian_gradient(const Vec& x, const Vec& egrad) const {
  return project_tangent(x, egrad);
}

double Sphere::inner(const Vec&, const Vec& u, const Vec& v) const {
  return u.dot(v);
}

Vec Sphere::exp(const Vec& x, const Vec& v) const {
  const double t = v.norm();
  if (t == 0.0) return x;
  const Vec y = std::cos(t) * x + (std::sin(t) / t) * v;
  return y / y.norm();
}

Vec Sphere::log(const Vec& x, const Vec& y) const {
  const double c = x.dot(y);
  Vec u = y - c * x;
  const double s = u.norm();
  const double angle = std::atan2(s, c);
  if (angle >= injectivity_lower_bound() * (1.0 - 1e-12) || (s == 0.0 && c < 0.0)) {
    throw OutsideInjectivityRadius("sphere log: points are antipodal");
  }
  if (s == 0.0) return Vec::Zero(x.size());
  return (angle / s) * u;
}

Vec Sphere::transport(const Vec& x, const Vec& y, const Vec& v) const {
  const double denom = 1.0 + x.dot(y);
  if (denom <= 1e-12) {
    throw OutsideInjectivityRadius("sphere transport: points are antipodal");
  }
  return v - (y.dot(v) / denom) * (x + y);
}

double Sphere::dist(const Vec& x, const Vec& y) const {
  const double c = x.dot(y);
  return std::atan2((y - c * x).norm(), c);
}

Vec Sphere::retract(const Vec& x, const Vec& v, RetractionKind kind) const {
  switch (kind) {
    case RetractionKind::Exponential:
      return exp(x, v);
    case RetractionKind::Projection: {
      Vec p = x + v;
      return p / p.norm();
    }
    case RetractionKind::Prox:
      break;
  }
  throw UnsupportedRetraction("prox retraction is defined on "
                              "Hessian-Riemannian domains only");
}

Vec Sphere::transport_from_endpoint(const Vec& x, const Vec& step,
                                    const Vec& u) const {
  const double t = step.norm();
  if (t == 0.0) return u;
  if (t >= injectivity_lower_bound()) {
    throw OutsideInjectivityRadius("sphere transport: step reaches cut locus");
  }
  // Rotation in the plane span{x, e}: the geodesic's end frame (y, e_y) maps
  // back onto (x, e); components orthogonal to the plane are unchanged.
  const Vec e = step / t;
  const Vec y = std::cos(t) * x + std::sin(t) * e;
  const Vec ey = -std::sin(t) * x + std::cos(t) * e;
  const double along = ey.dot(u);
  const double normal = y.dot(u);
  return u - along * ey - normal * y + along * e;
}

Mat Sphere::tangent_frame(const Vec& x) const {
  std::vector<int> order(ambient_dim_);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(x(a)) < std::abs(x(b));
  });

  const int d = ambient_dim_ - 1;
  Mat frame(ambient_dim_, d);
  int found = 0;
  for (int idx : order) {
    if (found == d) break;
    Vec w = Vec::Zero(ambient_dim_);
    w(idx) = 1.0;
    w -= x.dot(w) * x;
    for (int k = 0; k < found; ++k) w -= frame.col(k).dot(w) * frame.col(k);
    // second pass for numerical orthogonality
    w -= x.dot(w) * x;
    for (int k = 0; k < found; ++k) w -= frame.col(k).dot(w) * frame.col(k);
    const double n = w.norm();
    if (n < 1e-6) continue;
    frame.col(found++) = w / n;
  }
  if (found != d) throw Error("sphere frame construction failed");
  return frame;
}

}  // namespace rrm
