#pragma once

#include <string>
#include <vector>

#include "rrm/manifold.h"
#include "rrm/objective.h"

namespace rrm {

enum class CriticalKind { LocalMin, StrictSaddle, Degenerate };

std::string to_string(CriticalKind kind);

struct CriticalTolerances {
  double grad = 1e-8;
  double eig = 1e-4;
  double merge = 1e-6;
};

struct CriticalPoint {
  Point location;
  CriticalKind classification = CriticalKind::Degenerate;
  std::vector<double> spectrum;
  std::string label;
};

struct CriticalCatalog {
  std::vector<CriticalPoint> points;
  std::string manifold_id;
  std::string objective_id;
};

/// Newton iteration on grad f in normal coordinates at the current point,
/// with backtracking on the gradient norm. Throws NotCritical if the
/// gradient norm does not fall below `tol` within `max_iters`.
Point refine_critical(const Manifold& m, const Objective& f, const Point& x0,
                      int max_iters = 100, double tol = 1e-10);

/// Requires |grad f(x)| <= tol.grad (NotCritical otherwise).
CriticalPoint classify(const Manifold& m, const Objective& f, const Point& x,
                       const CriticalTolerances& tol = {});
CriticalPoint classify(const Manifold& m, const Objective& f, const Point& x,
                       const Mat& frame, const CriticalTolerances& tol = {});

double dist_to_set(const Manifold& m, const Point& x,
                   const std::vector<Point>& set);

/// Refines and classifies each candidate, dropping candidates that land
/// within 2 * tol.merge of an earlier entry.
CriticalCatalog build_catalog(const Manifold& m, const Objective& f,
                              const std::vector<CriticalCandidate>& candidates,
                              const CriticalTolerances& tol = {});

}  // namespace rrm
