#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "rrm/manifold.h"
#include "rrm/objective.h"
#include "rrm/rng.h"

namespace rrm {

/// Noise U = sigma * (unit vector uniform on the sphere of T_x), expressed in
/// an orthonormal tangent frame. |U|_x = sigma on every draw.
struct UniformSphereFrame {
  double sigma = 0.0;
};

/// U = sigma / sqrt(d) * sum_i s_i e_i with independent random signs s_i.
struct RademacherFrame {
  double sigma = 0.0;
};

/// The oracle returns -grad of the mean over a minibatch drawn without
/// replacement from the components; the objective is their average.
struct FiniteSumMinibatch {
  std::vector<ObjectivePtr> components;
  int batch_size = 1;
};

struct NoiseModel {
  std::variant<UniformSphereFrame, RademacherFrame, FiniteSumMinibatch> variant;
  std::uint64_t rng_seed = 0;

  /// Sup-norm bound on U for the frame models; NaN for minibatches.
  double magnitude() const;
};

NoiseModel uniform_sphere_noise(double sigma, std::uint64_t seed = 0);
NoiseModel rademacher_noise(double sigma, std::uint64_t seed = 0);

/// One realized surrogate v_hat with optional bookkeeping for
/// v_hat = v(x) + U + b, where v = -grad f.
struct SurrogateGradient {
  Point base;
  Tangent value;
  std::optional<Tangent> mean_estimate;
  std::optional<Tangent> noise_part;
  std::optional<Tangent> offset_part;
};

struct OracleStats {
  double sup_noise_norm = 0.0;  // M
  double excitability = 0.0;    // c
  double bias_over_step = 0.0;  // B
};

/// Draws the noise vector U at x, advancing `rng`. The frame overload uses
/// the given orthonormal columns instead of the manifold's default frame.
Tangent draw_noise(const NoiseModel& noise, const Manifold& m, const Point& x,
                   RngStream& rng);
Tangent draw_noise(const NoiseModel& noise, const Manifold& m, const Point& x,
                   const Mat& frame, RngStream& rng);

/// Stochastic first-order oracle: value = -grad f(x) + U, with
/// noise_part = U, offset_part = 0 and mean_estimate = -grad f(x).
SurrogateGradient query(const NoiseModel& noise, const Manifold& m,
                        const Objective& f, const Point& x, RngStream& rng);

struct ExcitabilityEstimate {
  double mean = 0.0;  // estimate of E[<U, v>_+]
  double standard_error = 0.0;
};

/// Monte-Carlo estimate of E[(<U, v>_x)_+] for a unit tangent v.
ExcitabilityEstimate estimate_excitability(const NoiseModel& noise,
                                           const Manifold& m, const Point& x,
                                           const Tangent& direction,
                                           long samples, RngStream& rng);
ExcitabilityEstimate estimate_excitability(const NoiseModel& noise,
                                           const Manifold& m, const Point& x,
                                           const Tangent& direction,
                                           const Mat& frame, long samples,
                                           RngStream& rng);

/// One realization of a method's surrogate at (x, gamma). `noise_part` must be
/// filled with the zero-mean part of the draw.
using StepClosure =
    std::function<SurrogateGradient(const Point& x, double gamma, RngStream&)>;

struct OffsetEstimate {
  Tangent offset;
  double standard_error = 0.0;  // of the offset norm, per coordinate max
};

/// Estimates b = E[v_hat] - v(x) by averaging (v_hat - U) over fresh draws.
/// Subtracting the realized zero-mean noise U is a control variate: it leaves
/// the mean unchanged and removes the O(sigma / sqrt(samples)) noise floor.
OffsetEstimate estimate_offset(const StepClosure& closure, const Manifold& m,
                               const Objective& f, const Point& x, double gamma,
                               long samples, RngStream& rng);

}  // namespace rrm
