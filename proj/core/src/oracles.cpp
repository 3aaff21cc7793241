#include "rrm/oracles.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace rrm {

double NoiseModel::magnitude() const {
  if (const auto* u = std::get_if<UniformSphereFrame>(&variant)) return u->sigma;
  if (const auto* r = std::get_if<RademacherFrame>(&variant)) return r->sigma;
  return std::numeric_limits<double>::quiet_NaN();
}

NoiseModel uniform_sphere_noise(double sigma, std::uint64_t seed) {
  return NoiseModel{UniformSphereFrame{sigma}, seed};
}

NoiseModel rademacher_noise(double sigma, std::uint64_t seed) {
  return NoiseModel{RademacherFrame{sigma}, seed};
}

namespace {

Vec frame_noise(const NoiseModel& noise, const Mat& frame, RngStream& rng) {
  const Eigen::Index d = frame.cols();
  Vec coeffs(d);
  if (const auto* u = std::get_if<UniformSphereFrame>(&noise.variant)) {
    if (u->sigma == 0.0) return Vec::Zero(frame.rows());
    std::normal_distribution<double> normal;
    double n = 0.0;
    do {
      for (Eigen::Index i = 0; i < d; ++i) coeffs(i) = normal(rng);
      n = coeffs.norm();
    } while (n == 0.0);
    coeffs *= u->sigma / n;
  } else {
    const auto& r = std::get<RademacherFrame>(noise.variant);
    if (r.sigma == 0.0) return Vec::Zero(frame.rows());
    const double scale = r.sigma / std::sqrt(static_cast<double>(d));
    for (Eigen::Index i = 0; i < d; ++i) {
      coeffs(i) = (rng() >> 63) != 0 ? scale : -scale;
    }
  }
  return frame * coeffs;
}

// -grad of the minibatch mean minus -grad of the full mean.
Vec minibatch_noise(const FiniteSumMinibatch& mb, const Manifold& m,
                    const Vec& x, RngStream& rng) {
  const int n = static_cast<int>(mb.components.size());
  const int b = std::clamp(mb.batch_size, 1, n);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  // partial Fisher-Yates: first b entries form the batch
  for (int i = 0; i < b; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  Vec batch = Vec::Zero(x.size());
  for (int i = 0; i < b; ++i) batch += mb.components[idx[i]]->gradient(x);
  batch /= static_cast<double>(b);
  Vec full = Vec::Zero(x.size());
  for (const auto& c : mb.components) full += c->gradient(x);
  full /= static_cast<double>(n);
  return -(m.riemannian_gradient(x, batch) - m.riemannian_gradient(x, full));
}

}  // namespace

Tangent draw_noise(const NoiseModel& noise, const Manifold& m, const Point& x,
                   RngStream& rng) {
  if (const auto* mb = std::get_if<FiniteSumMinibatch>(&noise.variant)) {
    return Tangent{x, minibatch_noise(*mb, m, x.coords, rng)};
  }
  if (noise.magnitude() == 0.0) return zero_tangent(m, x);
  return Tangent{x, frame_noise(noise, m.tangent_frame(x.coords), rng)};
}

Tangent draw_noise(const NoiseModel& noise, const Manifold& m, const Point& x,
                   const Mat& frame, RngStream& rng) {
  if (const auto* mb = std::get_if<FiniteSumMinibatch>(&noise.variant)) {
    return Tangent{x, minibatch_noise(*mb, m, x.coords, rng)};
  }
  return Tangent{x, frame_noise(noise, frame, rng)};
}

SurrogateGradient query(const NoiseModel& noise, const Manifold& m,
                        const Objective& f, const Point& x, RngStream& rng) {
  const Vec drift = -m.riemannian_gradient(x.coords, f.gradient(x.coords));
  Tangent u = draw_noise(noise, m, x, rng);
  SurrogateGradient out{x, Tangent{x, drift + u.vec}, Tangent{x, drift},
                        std::move(u), zero_tangent(m, x)};
  return out;
}

namespace {

ExcitabilityEstimate excitability_impl(const NoiseModel& noise,
                                       const Manifold& m, const Point& x,
                                       const Tangent& direction,
                                       const Mat* frame, long samples,
                                       RngStream& rng) {
  if (samples < 2) throw ContractViolation("excitability needs >= 2 samples");
  const double vn = m.norm(x.coords, direction.vec);
  if (std::abs(vn - 1.0) > 1e-8) {
    throw ContractViolation("excitability direction must be a unit vector");
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long i = 0; i < samples; ++i) {
    const Tangent u = frame ? draw_noise(noise, m, x, *frame, rng)
                            : draw_noise(noise, m, x, rng);
    const double p = std::max(0.0, m.inner(x.coords, u.vec, direction.vec));
    sum += p;
    sum_sq += p * p;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

}  // namespace

ExcitabilityEstimate estimate_excitability(const NoiseModel& noise,
                                           const Manifold& m, const Point& x,
                                           const Tangent& direction,
                                           long samples, RngStream& rng) {
  return excitability_impl(noise, m, x, direction, nullptr, samples, rng);
}

ExcitabilityEstimate estimate_excitability(const NoiseModel& noise,
                                           const Manifold& m, const Point& x,
                                           const Tangent& direction,
                                           const Mat& frame, long samples,
                                           RngStream& rng) {
  return excitability_impl(noise, m, x, direction, &frame, samples, rng);
}

OffsetEstimate estimate_offset(const StepClosure& closure, const Manifold& m,
                               const Objective& f, const Point& x, double gamma,
                               long samples, RngStream& rng) {
  if (samples < 2) throw ContractViolation("offset estimate needs >= 2 samples");
  const Vec drift = -m.riemannian_gradient(x.coords, f.gradient(x.coords));
  const Eigen::Index d = x.coords.size();
  Vec sum = Vec::Zero(d);
  Vec sum_sq = Vec::Zero(d);
  for (long i = 0; i < samples; ++i) {
    RngStream draw = rng.split(static_cast<std::uint64_t>(i));
    const SurrogateGradient s = closure(x, gamma, draw);
    Vec centered = s.value.vec;
    if (s.noise_part) centered -= s.noise_part->vec;
    const Vec b = centered - drift;
    sum += b;
    sum_sq += b.cwiseProduct(b);
  }
  const double n = static_cast<double>(samples);
  const Vec mean = sum / n;
  const Vec var =
      ((sum_sq - n * mean.cwiseProduct(mean)) / (n - 1.0)).cwiseMax(0.0);
  return OffsetEstimate{Tangent{x, mean},
                        std::sqrt(var.maxCoeff() / n)};
}

}  // namespace rrm
