#include "rrm/saddle_analysis.h"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace rrm {

std::string to_string(CriticalKind kind) {
  switch (kind) {
    case CriticalKind::LocalMin:
      return "LocalMin";
    case CriticalKind::StrictSaddle:
      return "StrictSaddle";
    case CriticalKind::Degenerate:
      return "Degenerate";
  }
  return "?";
}

namespace {

double grad_norm(const Manifold& m, const Objective& f, const Vec& x) {
  return m.norm(x, m.riemannian_gradient(x, f.gradient(x)));
}

// Hessian of f o exp_x at 0 in frame coordinates, by central differences.
Mat pullback_hessian(const Manifold& m, const Objective& f, const Vec& x,
                     const Mat& frame, double h) {
  const Eigen::Index d = frame.cols();
  auto value = [&](const Vec& c) { return f.value(m.exp(x, frame * c)); };
  const double f0 = f.value(x);
  Mat hess(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    Vec e = Vec::Zero(d);
    e(i) = h;
    hess(i, i) = (value(e) - 2.0 * f0 + value(-e)) / (h * h);
    for (Eigen::Index j = 0; j < i; ++j) {
      Vec a = Vec::Zero(d);
      a(i) = h;
      Vec b = Vec::Zero(d);
      b(j) = h;
      const double v = (value(a + b) - value(a - b) - value(b - a) +
                        value(-a - b)) /
                       (4.0 * h * h);
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }
  return hess;
}

CriticalKind kind_from_spectrum(const std::vector<double>& spectrum,
                                double eig_tol) {
  if (spectrum.empty()) return CriticalKind::Degenerate;
  if (spectrum.front() < -eig_tol) return CriticalKind::StrictSaddle;
  if (spectrum.front() > eig_tol) return CriticalKind::LocalMin;
  return CriticalKind::Degenerate;
}

CriticalPoint make_critical(const Point& x, const HessianSpectrum& hs,
                            const CriticalTolerances& tol) {
  CriticalPoint out;
  out.location = x;
  out.spectrum = hs.eigenvalues;
  out.classification = kind_from_spectrum(out.spectrum, tol.eig);
  return out;
}

}  // namespace

Point refine_critical(const Manifold& m, const Objective& f, const Point& x0,
                      int max_iters, double tol) {
  Vec x = x0.coords;
  double gn = grad_norm(m, f, x);
  for (int it = 0; it < max_iters && !(gn <= tol); ++it) {
    const Mat frame = m.tangent_frame(x);
    const Vec grad = m.riemannian_gradient(x, f.gradient(x));
    Vec g(frame.cols());
    for (Eigen::Index i = 0; i < frame.cols(); ++i) {
      g(i) = m.inner(x, frame.col(i), grad);
    }
    const Mat hess = pullback_hessian(m, f, x, frame, 1e-4);
    Eigen::SelfAdjointEigenSolver<Mat> solver(hess);
    const Vec& lam = solver.eigenvalues();
    const double cutoff = 1e-8 * std::max(1.0, lam.cwiseAbs().maxCoeff());
    Vec coeffs = solver.eigenvectors().transpose() * g;
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
      coeffs(i) = std::abs(lam(i)) > cutoff ? -coeffs(i) / lam(i) : -coeffs(i);
    }
    Vec dir = frame * (solver.eigenvectors() * coeffs);
    const double bound = 0.5 * m.injectivity_lower_bound();
    const double len = m.norm(x, dir);
    if (std::isfinite(bound) && len > bound) dir *= bound / len;

    double scale = 1.0;
    bool accepted = false;
    for (int k = 0; k < 40; ++k, scale *= 0.5) {
      Vec trial;
      try {
        trial = m.exp(x, scale * dir);
      } catch (const Error&) {
        continue;
      }
      const double tn = grad_norm(m, f, trial);
      if (tn < gn) {
        x = std::move(trial);
        gn = tn;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (!(gn <= tol)) {
    throw NotCritical("critical-point refinement stalled at gradient norm " +
                      std::to_string(gn));
  }
  return Point{std::move(x)};
}

CriticalPoint classify(const Manifold& m, const Objective& f, const Point& x,
                       const CriticalTolerances& tol) {
  const double gn = grad_norm(m, f, x.coords);
  if (!(gn <= tol.grad)) {
    throw NotCritical("gradient norm " + std::to_string(gn) +
                      " exceeds the criticality tolerance");
  }
  return make_critical(x, hessian_spectrum(m, f, x, tol.grad), tol);
}

CriticalPoint classify(const Manifold& m, const Objective& f, const Point& x,
                       const Mat& frame, const CriticalTolerances& tol) {
  const double gn = grad_norm(m, f, x.coords);
  if (!(gn <= tol.grad)) {
    throw NotCritical("gradient norm " + std::to_string(gn) +
                      " exceeds the criticality tolerance");
  }
  return make_critical(x, hessian_spectrum(m, f, x, frame, tol.grad), tol);
}

double dist_to_set(const Manifold& m, const Point& x,
                   const std::vector<Point>& set) {
  if (set.empty()) throw ContractViolation("distance to an empty set");
  double best = std::numeric_limits<double>::infinity();
  for (const Point& s : set) best = std::min(best, m.dist(x.coords, s.coords));
  return best;
}

CriticalCatalog build_catalog(const Manifold& m, const Objective& f,
                              const std::vector<CriticalCandidate>& candidates,
                              const CriticalTolerances& tol) {
  CriticalCatalog catalog;
  catalog.manifold_id = m.name();
  catalog.objective_id = f.name();
  std::vector<Point> seen;
  for (const auto& c : candidates) {
    const Point refined =
        refine_critical(m, f, make_point(m, c.coords), 100, tol.grad * 1e-2);
    if (!seen.empty() && dist_to_set(m, refined, seen) <= 2.0 * tol.merge) {
      continue;
    }
    CriticalPoint cp = classify(m, f, refined, tol);
    cp.label = c.label;
    catalog.points.push_back(std::move(cp));
    seen.push_back(refined);
  }
  return catalog;
}

}  // namespace rrm
