#include "rrm/torus.h"

#include <array>
#include <cmath>
#include <numbers>

namespace rrm {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double a) {
  // into (-pi, pi]
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

// (theta, phi, theta', phi', V^theta, V^phi)
using State = Eigen::Matrix<double, 6, 1>;

struct Rhs {
  double R;
  double r;
  bool with_transport;

  State operator()(const State& s) const {
    const double th = s(0);
    const double dth = s(2);
    const double dph = s(3);
    const double sin_t = std::sin(th);
    const double rho = R + r * std::cos(th);
    // Christoffel symbols of g = diag(r^2, rho^2).
    const double g_t_pp = rho * sin_t / r;   // Gamma^theta_{phi phi}
    const double g_p_tp = -r * sin_t / rho;  // Gamma^phi_{theta phi}
    State out;
    out(0) = dth;
    out(1) = dph;
    out(2) = -g_t_pp * dph * dph;
    out(3) = -2.0 * g_p_tp * dth * dph;
    if (with_transport) {
      out(4) = -g_t_pp * dph * s(5);
      out(5) = -g_p_tp * (dth * s(5) + dph * s(4));
    } else {
      out(4) = 0.0;
      out(5) = 0.0;
    }
    return out;
  }
};

}  // namespace

Torus::Torus(double major_radius, double minor_radius, TorusOptions options)
    : R_(major_radius), r_(minor_radius), options_(options) {
  if (!(minor_radius > 0.0) || !(major_radius > minor_radius)) {
    throw ContractViolation("torus requires R > r > 0");
  }
  if (!(options_.arc_step > 0.0)) {
    throw ContractViolation("torus arc_step must be positive");
  }
}

std::string Torus::name() const {
  return "T^2(R=" + std::to_string(R_) + ",r=" + std::to_string(r_) + ")";
}

double Torus::injectivity_lower_bound() const {
  return kPi * r_ * (1.0 - r_ / R_) / 2.0;
}

TorusAngles Torus::angles(const Vec& x) const {
  const double rho = std::hypot(x(0), x(1));
  return TorusAngles{std::atan2(x(2), rho - R_), std::atan2(x(1), x(0))};
}

Vec Torus::embed(const TorusAngles& a) const {
  const double rho = R_ + r_ * std::cos(a.theta);
  Vec p(3);
  p << rho * std::cos(a.phi), rho * std::sin(a.phi), r_ * std::sin(a.theta);
  return p;
}

Vec Torus::unit_normal(const Vec& x) const {
  const TorusAngles a = angles(x);
  Vec n(3);
  n << std::cos(a.theta) * std::cos(a.phi), std::cos(a.theta) * std::sin(a.phi),
      std::sin(a.theta);
  return n;
}

namespace {

struct Basis {
  Eigen::Vector3d e_theta;
  Eigen::Vector3d e_phi;
  double rho;
};

Basis coordinate_basis(double R, double r, double th, double ph) {
  const double rho = R + r * std::cos(th);
  Basis b;
  b.rho = rho;
  b.e_theta << -r * std::sin(th) * std::cos(ph), -r * std::sin(th) * std::sin(ph),
      r * std::cos(th);
  b.e_phi << -rho * std::sin(ph), rho * std::cos(ph), 0.0;
  return b;
}

// Coordinate components of an ambient tangent vector.
Eigen::Vector2d to_coords(const Basis& b, double r, const Vec& v) {
  return {b.e_theta.dot(v) / (r * r), b.e_phi.dot(v) / (b.rho * b.rho)};
}

Vec to_ambient(const Basis& b, double c_theta, double c_phi) {
  return c_theta * b.e_theta + c_phi * b.e_phi;
}

}  // namespace

double Torus::membership_residual(const Vec& x) const {
  const double rho = std::hypot(x(0), x(1));
  return std::abs(std::hypot(rho - R_, x(2)) - r_);
}

double Torus::tangency_residual(const Vec& x, const Vec& v) const {
  return std::abs(unit_normal(x).dot(v));
}

Vec Torus::project_tangent(const Vec& x, const Vec& v) const {
  const Vec n = unit_normal(x);
  return v - n.dot(v) * n;
}

Vec Torus::riemannian_gradient(const Vec& x, const Vec& egrad) const {
  return project_tangent(x, egrad);
}

double Torus::inner(const Vec&, const Vec& u, const Vec& v) const {
  return u.dot(v);
}

namespace {

// Integrates over unit time with RK4; the step count bounds the arc length per
// step by `arc_step`.
State integrate(const Rhs& rhs, State s, double speed, double arc_step) {
  const int steps = std::max(1, static_cast<int>(std::ceil(speed / arc_step)));
  const double h = 1.0 / steps;
  for (int i = 0; i < steps; ++i) {
    const State k1 = rhs(s);
    const State k2 = rhs(s + 0.5 * h * k1);
    const State k3 = rhs(s + 0.5 * h * k2);
    const State k4 = rhs(s + h * k3);
    s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return s;
}

}  // namespace

std::pair<Vec, Vec> Torus::geodesic_endpoint(const Vec& x, const Vec& v) const {
  const TorusAngles a = angles(x);
  const Basis b0 = coordinate_basis(R_, r_, a.theta, a.phi);
  const Eigen::Vector2d c = to_coords(b0, r_, v);
  State s;
  s << a.theta, a.phi, c(0), c(1), 0.0, 0.0;
  const State e = integrate(Rhs{R_, r_, false}, s, v.norm(), options_.arc_step);
  const Basis b1 = coordinate_basis(R_, r_, e(0), e(1));
  return {embed({e(0), e(1)}), to_ambient(b1, e(2), e(3))};
}

Vec Torus::exp(const Vec& x, const Vec& v) const {
  if (v.norm() == 0.0) return x;
  return geodesic_endpoint(x, v).first;
}

std::optional<Vec> Torus::shoot(const Vec& x, const Vec& y,
                                const Eigen::Vector2d& guess) const {
  return shoot_with(x, y, guess, options_.arc_step, options_.shooting_tol,
                    options_.shooting_max_iters);
}

std::optional<Vec> Torus::shoot_with(const Vec& x, const Vec& y,
                                     const Eigen::Vector2d& guess,
                                     double arc_step, double tol,
                                     int max_iters) const {
  const TorusAngles a = angles(x);
  const TorusAngles target_raw = angles(y);
  const Basis bx = coordinate_basis(R_, r_, a.theta, a.phi);
  const double rho_y = R_ + r_ * std::cos(target_raw.theta);
  // Unwrapped target consistent with the guess.
  const double tgt_th =
      a.theta + guess(0) + wrap_angle(target_raw.theta - a.theta - guess(0));
  const double tgt_ph =
      a.phi + guess(1) + wrap_angle(target_raw.phi - a.phi - guess(1));

  const Rhs rhs{R_, r_, false};
  auto speed_of = [&](const Eigen::Vector2d& c) {
    return to_ambient(bx, c(0), c(1)).norm();
  };
  auto residual = [&](const Eigen::Vector2d& c) -> Eigen::Vector2d {
    State s;
    s << a.theta, a.phi, c(0), c(1), 0.0, 0.0;
    const State e = integrate(rhs, s, speed_of(c), arc_step);
    // Metric-weighted so the norm approximates a distance on the surface.
    return {r_ * (e(0) - tgt_th), rho_y * (e(1) - tgt_ph)};
  };

  // Geodesics longer than two full turns around the torus are never wanted.
  const double max_speed = 4.0 * kPi * (R_ + r_);
  Eigen::Vector2d c = guess;
  if (speed_of(c) > max_speed) return std::nullopt;
  Eigen::Vector2d res = residual(c);
  for (int it = 0; it < max_iters; ++it) {
    if (res.norm() <= tol) return to_ambient(bx, c(0), c(1));
    Eigen::Matrix2d jac;
    for (int k = 0; k < 2; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(c(k)));
      Eigen::Vector2d cp = c, cm = c;
      cp(k) += h;
      cm(k) -= h;
      jac.col(k) = (residual(cp) - residual(cm)) / (2.0 * h);
    }
    const Eigen::Vector2d delta = jac.fullPivLu().solve(-res);
    if (!delta.allFinite()) return std::nullopt;
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      const Eigen::Vector2d trial = c + alpha * delta;
      if (speed_of(trial) > max_speed) {
        alpha *= 0.5;
        continue;
      }
      const Eigen::Vector2d trial_res = residual(trial);
      if (trial_res.norm() < res.norm()) {
        c = trial;
        res = trial_res;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
  }
  if (res.norm() <= tol) return to_ambient(bx, c(0), c(1));
  return std::nullopt;
}

namespace {

Eigen::Vector2d wrapped_guess(const TorusAngles& from, const TorusAngles& to) {
  return {wrap_angle(to.theta - from.theta), wrap_angle(to.phi - from.phi)};
}

}  // namespace

Vec Torus::log(const Vec& x, const Vec& y) const {
  if ((x - y).norm() == 0.0) return Vec::Zero(3);
  const std::optional<Vec> v = shoot(x, y, wrapped_guess(angles(x), angles(y)));
  if (!v) {
    throw OutsideInjectivityRadius("torus log: shooting did not converge");
  }
  if (v->norm() >= injectivity_lower_bound()) {
    throw OutsideInjectivityRadius("torus log: distance " +
                                   std::to_string(v->norm()) +
                                   " exceeds injectivity guard");
  }
  return *v;
}

namespace {

// Transports coordinate components (vt, vp) along the geodesic from state s.
Eigen::Vector2d transport_coords(double R, double r, double arc_step,
                                 double th, double ph, double dth, double dph,
                                 double speed, double vt, double vp,
                                 double* th_end, double* ph_end) {
  State s;
  s << th, ph, dth, dph, vt, vp;
  const State e = integrate(Rhs{R, r, true}, s, speed, arc_step);
  *th_end = e(0);
  *ph_end = e(1);
  return {e(4), e(5)};
}

}  // namespace

Vec Torus::transport(const Vec& x, const Vec& y, const Vec& v) const {
  const Vec w = log(x, y);
  if (w.norm() == 0.0) return project_tangent(y, v);
  const TorusAngles a = angles(x);
  const Basis bx = coordinate_basis(R_, r_, a.theta, a.phi);
  const Eigen::Vector2d cw = to_coords(bx, r_, w);
  const Eigen::Vector2d cv = to_coords(bx, r_, v);
  double th1 = 0.0, ph1 = 0.0;
  const Eigen::Vector2d out =
      transport_coords(R_, r_, options_.arc_step, a.theta, a.phi, cw(0), cw(1),
                       w.norm(), cv(0), cv(1), &th1, &ph1);
  const Basis by = coordinate_basis(R_, r_, th1, ph1);
  return project_tangent(y, to_ambient(by, out(0), out(1)));
}

Vec Torus::transport_from_endpoint(const Vec& x, const Vec& step,
                                   const Vec& u) const {
  if (step.norm() == 0.0) return project_tangent(x, u);
  const TorusAngles a = angles(x);
  const Basis bx = coordinate_basis(R_, r_, a.theta, a.phi);
  const Eigen::Vector2d c = to_coords(bx, r_, step);
  State s;
  s << a.theta, a.phi, c(0), c(1), 0.0, 0.0;
  const State e =
      integrate(Rhs{R_, r_, false}, s, step.norm(), options_.arc_step);
  const Basis be = coordinate_basis(R_, r_, e(0), e(1));
  const Eigen::Vector2d cu = to_coords(be, r_, u);
  // Retrace the geodesic backwards while transporting u.
  double th0 = 0.0, ph0 = 0.0;
  const Eigen::Vector2d out =
      transport_coords(R_, r_, options_.arc_step, e(0), e(1), -e(2), -e(3),
                       step.norm(), cu(0), cu(1), &th0, &ph0);
  return project_tangent(x, to_ambient(bx, out(0), out(1)));
}

double Torus::dist(const Vec& x, const Vec& y) const {
  if ((x - y).norm() == 0.0) return 0.0;
  const TorusAngles a = angles(x);
  const TorusAngles b = angles(y);
  const Eigen::Vector2d g = wrapped_guess(a, b);
  // The metric dominates diag(r^2, (R - r)^2), which bounds any path with a
  // given winding from below.
  auto lower_bound = [&](const Eigen::Vector2d& d) {
    return std::hypot(r_ * d(0), (R_ - r_) * d(1));
  };
  const double iota = injectivity_lower_bound();
  if (lower_bound(g) < iota) {
    const std::optional<Vec> first = shoot(x, y, g);
    // A geodesic shorter than the injectivity radius is minimizing.
    if (first && first->norm() < iota) return first->norm();
  }

  // Upper bounds: meridian then parallel, parallel then meridian, and the
  // route along the inner equator.
  const double dphi = std::abs(g(1));
  double best = std::min(r_ * std::abs(g(0)) + (R_ + r_ * std::cos(b.theta)) * dphi,
                         (R_ + r_ * std::cos(a.theta)) * dphi + r_ * std::abs(g(0)));
  best = std::min(best, r_ * std::abs(wrap_angle(kPi - a.theta)) +
                            (R_ - r_) * dphi +
                            r_ * std::abs(wrap_angle(kPi - b.theta)));
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      const Eigen::Vector2d guess{g(0) + 2.0 * kPi * i, g(1) + 2.0 * kPi * j};
      if (lower_bound(guess) >= best) continue;
      // Global candidates only need distance accuracy, so integrate coarsely.
      const std::optional<Vec> v = shoot_with(x, y, guess, 2e-2, 1e-7, 25);
      if (v) best = std::min(best, v->norm());
    }
  }
  return best;
}

Vec Torus::retract(const Vec& x, const Vec& v, RetractionKind kind) const {
  switch (kind) {
    case RetractionKind::Exponential:
      return exp(x, v);
    case RetractionKind::Projection: {
      const Vec p = x + v;
      const double rho = std::hypot(p(0), p(1));
      if (rho == 0.0) {
        throw DomainEscape("torus projection undefined on the symmetry axis");
      }
      Vec center(3);
      center << R_ * p(0) / rho, R_ * p(1) / rho, 0.0;
      const Vec d = p - center;
      const double dn = d.norm();
      if (dn == 0.0) {
        throw DomainEscape("torus projection undefined on the core circle");
      }
      return center + (r_ / dn) * d;
    }
    case RetractionKind::Prox:
      break;
  }
  throw UnsupportedRetraction("prox retraction is defined on "
                              "Hessian-Riemannian domains only");
}

Mat Torus::tangent_frame(const Vec& x) const {
  const TorusAngles a = angles(x);
  const Basis b = coordinate_basis(R_, r_, a.theta, a.phi);
  Mat frame(3, 2);
  frame.col(0) = b.e_theta / r_;
  frame.col(1) = b.e_phi / b.rho;
  return frame;
}

}  // namespace rrm
