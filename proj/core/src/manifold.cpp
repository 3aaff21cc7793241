#include "rrm/manifold.h"

#include <Eigen/Eigenvalues>

#include "rrm/objective.h"

namespace rrm {

std::string to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::Sphere:
      return "Sphere";
    case ManifoldKind::TorusEmbedded:
      return "TorusEmbedded";
    case ManifoldKind::HessianRiemannian:
      return "HessianRiemannian";
  }
  return "?";
}

std::string to_string(RetractionKind kind) {
  switch (kind) {
    case RetractionKind::Exponential:
      return "Exponential";
    case RetractionKind::Projection:
      return "Projection";
    case RetractionKind::Prox:
      return "Prox";
  }
  return "?";
}

Vec Manifold::retract(const Vec& x, const Vec& v, RetractionKind kind) const {
  if (kind == RetractionKind::Exponential) return exp(x, v);
  throw UnsupportedRetraction(to_string(kind) + " retraction on " + name());
}

Vec Manifold::transport_from_endpoint(const Vec& x, const Vec& step,
                                      const Vec& u) const {
  return transport(exp(x, step), x, u);
}

namespace {

void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw NonFiniteInput(std::string("non-finite ") + what);
}

void require_dim(const Manifold& m, const Vec& v, const char* what) {
  if (v.size() != m.coord_dim()) {
    throw ContractViolation(std::string(what) + " has dimension " +
                            std::to_string(v.size()) + ", expected " +
                            std::to_string(m.coord_dim()));
  }
}

void require_base(const Point& x, const Tangent& v) {
  if (!same_base(x, v.base)) {
    throw ContractViolation("tangent vector is based at a different point");
  }
}

}  // namespace

bool same_base(const Point& a, const Point& b) {
  if (a.coords.size() != b.coords.size()) return false;
  const double scale = 1.0 + a.coords.lpNorm<Eigen::Infinity>();
  return (a.coords - b.coords).lpNorm<Eigen::Infinity>() <= 1e-12 * scale;
}

Point make_point(const Manifold& m, Vec coords, const GeometryTolerances& tol) {
  require_dim(m, coords, "point");
  require_finite(coords, "point");
  const double res = m.membership_residual(coords);
  if (!(res <= tol.membership)) {
    throw ContractViolation("point is not on " + m.name() +
                            " (residual " + std::to_string(res) + ")");
  }
  return Point{std::move(coords)};
}

Tangent make_tangent(const Manifold& m, const Point& x, Vec vec,
                     const GeometryTolerances& tol) {
  require_dim(m, vec, "tangent");
  require_finite(vec, "tangent");
  const double res = m.tangency_residual(x.coords, vec);
  if (!(res <= tol.tangency * std::max(1.0, vec.norm()))) {
    throw ContractViolation("vector is not tangent to " + m.name() +
                            " (residual " + std::to_string(res) + ")");
  }
  return Tangent{x, std::move(vec)};
}

Tangent zero_tangent(const Manifold& m, const Point& x) {
  return Tangent{x, Vec::Zero(m.coord_dim())};
}

double inner(const Manifold& m, const Point& x, const Tangent& u,
             const Tangent& v) {
  require_base(x, u);
  require_base(x, v);
  return m.inner(x.coords, u.vec, v.vec);
}

double norm(const Manifold& m, const Tangent& v) {
  return m.norm(v.base.coords, v.vec);
}

Point exp_map(const Manifold& m, const Point& x, const Tangent& v) {
  require_base(x, v);
  require_finite(x.coords, "point");
  require_finite(v.vec, "tangent");
  return Point{m.exp(x.coords, v.vec)};
}

Tangent log_map(const Manifold& m, const Point& x, const Point& y) {
  require_dim(m, y.coords, "point");
  require_finite(x.coords, "point");
  require_finite(y.coords, "point");
  return Tangent{x, m.log(x.coords, y.coords)};
}

Tangent transport(const Manifold& m, const Point& x, const Point& y,
                  const Tangent& v) {
  require_base(x, v);
  require_finite(v.vec, "tangent");
  return Tangent{y, m.transport(x.coords, y.coords, v.vec)};
}

double dist(const Manifold& m, const Point& x, const Point& y) {
  return m.dist(x.coords, y.coords);
}

Point retract(const Manifold& m, const Point& x, const Tangent& v,
              RetractionKind kind) {
  require_base(x, v);
  require_finite(v.vec, "tangent");
  return Point{m.retract(x.coords, v.vec, kind)};
}

Tangent riemannian_gradient(const Manifold& m, const Objective& f,
                            const Point& x) {
  return Tangent{x, m.riemannian_gradient(x.coords, f.gradient(x.coords))};
}

HessianSpectrum hessian_spectrum(const Manifold& m, const Objective& f,
                                 const Point& x, double criticality_tol,
                                 double fd_step) {
  return hessian_spectrum(m, f, x, m.tangent_frame(x.coords), criticality_tol,
                          fd_step);
}

HessianSpectrum hessian_spectrum(const Manifold& m, const Objective& f,
                                 const Point& x, const Mat& frame,
                                 double criticality_tol, double fd_step) {
  const int d = static_cast<int>(frame.cols());
  const double h = fd_step;
  auto g = [&](const Vec& s) { return f.value(m.exp(x.coords, frame * s)); };

  const double f0 = f.value(x.coords);
  Mat hess(d, d);
  for (int i = 0; i < d; ++i) {
    Vec ei = Vec::Zero(d);
    ei(i) = h;
    hess(i, i) = (g(ei) - 2.0 * f0 + g(-ei)) / (h * h);
    for (int j = 0; j < i; ++j) {
      Vec ej = Vec::Zero(d);
      ej(j) = h;
      const double mixed =
          (g(ei + ej) - g(ei - ej) - g(-ei + ej) + g(-ei - ej)) / (4.0 * h * h);
      hess(i, j) = mixed;
      hess(j, i) = mixed;
    }
  }

  HessianSpectrum out;
  Eigen::SelfAdjointEigenSolver<Mat> solver(hess, Eigen::EigenvaluesOnly);
  out.eigenvalues.assign(solver.eigenvalues().data(),
                         solver.eigenvalues().data() + d);
  out.gradient_norm =
      m.norm(x.coords, m.riemannian_gradient(x.coords, f.gradient(x.coords)));
  out.noncritical_warning = out.gradient_norm > criticality_tol;
  return out;
}

Vec geodesic_offset(const Manifold& m, const Point& x, const Tangent& v) {
  if (!m.has_ambient_embedding()) {
    throw UnsupportedOperation("geodesic offset needs an ambient embedding; " +
                               m.name() + " has none");
  }
  require_base(x, v);
  return m.exp(x.coords, v.vec) - x.coords - v.vec;
}

}  // namespace rrm
