#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "rrm/errors.h"
#include "rrm/types.h"

namespace rrm {

class Objective;

enum class ManifoldKind { Sphere, TorusEmbedded, HessianRiemannian };

/// Exponential: exp_x itself. Projection: metric projection of x + v back onto
/// the manifold (identity inside an open domain). Prox: mirror-descent prox
/// map P_x(G(x) v), Hessian-Riemannian domains only.
enum class RetractionKind { Exponential, Projection, Prox };

std::string to_string(ManifoldKind kind);
std::string to_string(RetractionKind kind);

/// Membership and tangency tolerances used by the checked free functions.
struct GeometryTolerances {
  double membership = 1e-10;
  double tangency = 1e-10;
};

/// Abstract manifold. Descriptors are immutable after construction and may be
/// shared across threads.
///
/// The virtual kernels work on raw coordinate vectors and assume their inputs
/// were validated; the free functions below (inner, exp_map, ...) are the
/// checked entry points that operate on Point/Tangent.
class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual ManifoldKind kind() const = 0;
  virtual std::string name() const = 0;
  virtual int intrinsic_dim() const = 0;
  /// Length of the coordinate vectors used for points and tangents.
  virtual int coord_dim() const = 0;
  /// Lower bound on the injectivity radius; may be +infinity.
  virtual double injectivity_lower_bound() const = 0;
  /// True when points live in an ambient Euclidean space where
  /// exp_x(v) - x - v makes sense.
  virtual bool has_ambient_embedding() const { return true; }
  /// False when exp is only a stand-in for the true geodesic map.
  virtual bool exp_is_exact() const { return true; }

  /// Zero on the manifold; +infinity outside an open domain.
  virtual double membership_residual(const Vec& x) const = 0;
  virtual double tangency_residual(const Vec& x, const Vec& v) const = 0;
  /// Metric-orthogonal projection of a coordinate vector onto T_x.
  virtual Vec project_tangent(const Vec& x, const Vec& v) const = 0;
  /// Converts a coordinate (Euclidean) gradient into the Riemannian gradient.
  virtual Vec riemannian_gradient(const Vec& x, const Vec& egrad) const = 0;

  virtual double inner(const Vec& x, const Vec& u, const Vec& v) const = 0;
  virtual Vec exp(const Vec& x, const Vec& v) const = 0;
  virtual Vec log(const Vec& x, const Vec& y) const = 0;
  /// Parallel transport of v from T_x to T_y along the minimizing geodesic.
  virtual Vec transport(const Vec& x, const Vec& y, const Vec& v) const = 0;
  virtual double dist(const Vec& x, const Vec& y) const = 0;
  virtual Vec retract(const Vec& x, const Vec& v, RetractionKind kind) const;

  /// Transport of u from T_{exp_x(step)} back to T_x along t -> exp_x(t step).
  /// Avoids a logarithm when the connecting geodesic is already known.
  virtual Vec transport_from_endpoint(const Vec& x, const Vec& step,
                                      const Vec& u) const;

  /// Columns form an orthonormal basis of T_x (in the Riemannian metric).
  virtual Mat tangent_frame(const Vec& x) const = 0;

  double norm(const Vec& x, const Vec& v) const {
    return std::sqrt(std::max(0.0, inner(x, v, v)));
  }
};

using ManifoldPtr = std::shared_ptr<const Manifold>;

// Checked construction -------------------------------------------------------

/// Validates membership (tolerance 1e-10) and returns the point.
Point make_point(const Manifold& m, Vec coords,
                 const GeometryTolerances& tol = {});
/// Validates tangency at x and returns the tangent.
Tangent make_tangent(const Manifold& m, const Point& x, Vec vec,
                     const GeometryTolerances& tol = {});
Tangent zero_tangent(const Manifold& m, const Point& x);

bool same_base(const Point& a, const Point& b);

// Geometry primitives --------------------------------------------------------

double inner(const Manifold& m, const Point& x, const Tangent& u,
             const Tangent& v);
double norm(const Manifold& m, const Tangent& v);
Point exp_map(const Manifold& m, const Point& x, const Tangent& v);
/// Throws OutsideInjectivityRadius when dist(x, y) >= injectivity bound.
Tangent log_map(const Manifold& m, const Point& x, const Point& y);
Tangent transport(const Manifold& m, const Point& x, const Point& y,
                  const Tangent& v);
double dist(const Manifold& m, const Point& x, const Point& y);
Point retract(const Manifold& m, const Point& x, const Tangent& v,
              RetractionKind kind);

/// grad f(x). The drift used by the methods is its negative.
Tangent riemannian_gradient(const Manifold& m, const Objective& f,
                            const Point& x);

struct HessianSpectrum {
  std::vector<double> eigenvalues;  // ascending, length intrinsic_dim
  double gradient_norm = 0.0;
  bool noncritical_warning = false;
};

/// Riemannian Hessian eigenvalues from central differences of f o exp_x over
/// an orthonormal tangent frame. Meaningful at critical points only; a
/// non-critical x sets `noncritical_warning`.
HessianSpectrum hessian_spectrum(const Manifold& m, const Objective& f,
                                 const Point& x, double criticality_tol = 1e-6,
                                 double fd_step = 1e-4);
HessianSpectrum hessian_spectrum(const Manifold& m, const Objective& f,
                                 const Point& x, const Mat& frame,
                                 double criticality_tol = 1e-6,
                                 double fd_step = 1e-4);

/// exp_x(v) - x - v in ambient coordinates. Second order in |v|.
Vec geodesic_offset(const Manifold& m, const Point& x, const Tangent& v);

}  // namespace rrm
