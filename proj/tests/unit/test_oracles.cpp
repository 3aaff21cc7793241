#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "rrm/methods.h"
#include "rrm/oracles.h"
#include "rrm/sphere.h"
#include "rrm/torus.h"

namespace rrm {
namespace {

Vec v3(double a, double b, double c) { return Eigen::Vector3d(a, b, c); }

TEST(OracleTest, NoiselessQueryIsNegativeGradient) {
  Sphere s(3);
  const auto f = make_rayleigh(v3(1, 2, 3));
  const Point x = make_point(s, v3(1, 1, 1).normalized());
  RngStream rng(1);
  const SurrogateGradient g = query(uniform_sphere_noise(0.0), s, *f, x, rng);
  EXPECT_EQ(g.value.vec, (-riemannian_gradient(s, *f, x).vec).eval());
}

TEST(OracleTest, FrameNoiseHasExactMagnitude) {
  Sphere s(3);
  Torus t(2, 1);
  const auto f = make_rayleigh(v3(1, 2, 3));
  RngStream rng(2);
  const Point xs = make_point(s, v3(0.6, 0.0, 0.8));
  const Point xt = make_point(t, t.embed({0.4, 1.1}));
  for (const NoiseModel& noise : {uniform_sphere_noise(0.5), rademacher_noise(0.5)}) {
    for (int i = 0; i < 1000; ++i) {
      EXPECT_NEAR(norm(s, query(noise, s, *f, xs, rng).noise_part.value()), 0.5, 1e-14);
      EXPECT_NEAR(norm(t, draw_noise(noise, t, xt, rng)), 0.5, 1e-14);
    }
  }
}

TEST(OracleTest, DecompositionIdentity) {
  Sphere s(3);
  const auto f = make_rayleigh(v3(1, 2, 3));
  const Point x = make_point(s, v3(0.36, 0.48, 0.8));
  RngStream rng(3);
  for (int i = 0; i < 100; ++i) {
    const SurrogateGradient g = query(uniform_sphere_noise(0.3), s, *f, x, rng);
    const Vec drift = -riemannian_gradient(s, *f, x).vec;
    EXPECT_LT((g.value.vec - g.noise_part->vec - g.offset_part->vec - drift).norm(), 1e-12);
  }
}

TEST(OracleTest, ZeroMeanNoise) {
  Sphere s(3);
  const Point x = make_point(s, v3(0, 0, 1));
  RngStream rng(4);
  const double sigma = 0.7;
  const long n = 100000;
  Vec sum = Vec::Zero(3);
  for (long i = 0; i < n; ++i) sum += draw_noise(uniform_sphere_noise(sigma), s, x, rng).vec;
  EXPECT_LE((sum / n).norm(), 5.0 * sigma / std::sqrt(static_cast<double>(n)) * 3.0);
}

TEST(OracleTest, ReproducibleDraws) {
  Sphere s(4);
  const Point x = make_point(s, Eigen::Vector4d(0.5, 0.5, 0.5, 0.5));
  RngStream a(99);
  RngStream b(99);
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(draw_noise(uniform_sphere_noise(1.0), s, x, a).vec,
              draw_noise(uniform_sphere_noise(1.0), s, x, b).vec);
  }
  EXPECT_NE(RngStream(1).split(2).key(), RngStream(1).split(3).key());
}

TEST(OracleTest, FullMinibatchMatchesMeanGradient) {
  Sphere s(3);
  std::vector<ObjectivePtr> parts = {make_linear(v3(1, 0, 0)), make_linear(v3(0, 2, 0)),
                                     make_linear(v3(0, 0, 3))};
  const FiniteSumObjective sum(parts);
  NoiseModel noise{FiniteSumMinibatch{parts, 3}, 0};
  const Point x = make_point(s, v3(0.6, 0.8, 0.0));
  RngStream rng(5);
  const SurrogateGradient g = query(noise, s, sum, x, rng);
  const Vec expected = -s.riemannian_gradient(x.coords, v3(1, 2, 3) / 3.0);
  EXPECT_LT((g.value.vec - expected).norm(), 1e-15);
  EXPECT_LT(g.noise_part->vec.norm(), 1e-15);
}

TEST(OracleTest, MinibatchNoiseIsZeroMean) {
  Sphere s(3);
  std::vector<ObjectivePtr> parts = {make_linear(v3(1, 0, 0)), make_linear(v3(0, 2, 0)),
                                     make_linear(v3(0, 0, 3)), make_linear(v3(-1, 1, 0))};
  NoiseModel noise{FiniteSumMinibatch{parts, 2}, 0};
  const Point x = make_point(s, v3(0.6, 0.0, 0.8));
  RngStream rng(6);
  Vec sum = Vec::Zero(3);
  const long n = 20000;
  for (long i = 0; i < n; ++i) sum += draw_noise(noise, s, x, rng).vec;
  EXPECT_LT((sum / n).norm(), 0.05);
}

TEST(OracleTest, ExcitabilityCircleAndSphere) {
  Sphere s2(3);
  const Point x = make_point(s2, v3(0, 0, 1));
  const Tangent dir = make_tangent(s2, x, v3(1, 0, 0));
  RngStream rng(7);
  const auto e2 = estimate_excitability(uniform_sphere_noise(1.0), s2, x, dir, 100000, rng);
  EXPECT_NEAR(e2.mean, 1.0 / std::numbers::pi, 3.0 * e2.standard_error);

  Sphere s3(4);
  const Point y = make_point(s3, Eigen::Vector4d(0, 0, 0, 1));
  const Tangent d3 = make_tangent(s3, y, Eigen::Vector4d(0, 1, 0, 0));
  const auto e3 = estimate_excitability(uniform_sphere_noise(1.0), s3, y, d3, 100000, rng);
  EXPECT_NEAR(e3.mean, 0.25, 3.0 * e3.standard_error);

  const auto e0 = estimate_excitability(uniform_sphere_noise(0.0), s2, x, dir, 10000, rng);
  EXPECT_EQ(e0.mean, 0.0);
}

TEST(OracleTest, ExcitabilityIsFrameIndependent) {
  Sphere s(3);
  const Point x = make_point(s, v3(0, 0, 1));
  const Tangent dir = make_tangent(s, x, v3(0.6, 0.8, 0));
  const double c = std::cos(0.7);
  const double sn = std::sin(0.7);
  Mat rotated(3, 2);
  rotated << c, -sn, sn, c, 0, 0;
  RngStream r1(8);
  RngStream r2(9);
  const auto a = estimate_excitability(uniform_sphere_noise(1.0), s, x, dir, 100000, r1);
  const auto b =
      estimate_excitability(uniform_sphere_noise(1.0), s, x, dir, rotated, 100000, r2);
  EXPECT_NEAR(a.mean, b.mean,
              3.0 * std::hypot(a.standard_error, b.standard_error));
}

TEST(OracleTest, ExcitabilityNeedsUnitDirection) {
  Sphere s(3);
  const Point x = make_point(s, v3(0, 0, 1));
  RngStream rng(1);
  EXPECT_THROW(estimate_excitability(uniform_sphere_noise(1.0), s, x,
                                     make_tangent(s, x, v3(2, 0, 0)), 100, rng),
               ContractViolation);
}

TEST(OracleTest, OffsetOfRsgdVanishes) {
  Sphere s(3);
  const auto f = make_rayleigh(v3(1, 2, 3));
  MethodConfig cfg;
  cfg.method = MethodKind::RSGD;
  cfg.noise = uniform_sphere_noise(0.5);
  const Point x = make_point(s, v3(0.36, 0.48, 0.8));
  RngStream rng(10);
  const OffsetEstimate e = estimate_offset(make_step_closure(s, *f, cfg), s, *f, x, 0.1, 1000, rng);
  EXPECT_LT(e.offset.vec.norm(), 1e-12);
}

TEST(OracleTest, OffsetOfProjectionResgdScalesWithStep) {
  Sphere s(3);
  const auto f = make_rayleigh(v3(1, 2, 3));
  MethodConfig cfg;
  cfg.method = MethodKind::ReSGD;
  cfg.retraction = RetractionKind::Projection;
  cfg.noise = uniform_sphere_noise(0.2);
  const StepClosure closure = make_step_closure(s, *f, cfg);
  const Point x = make_point(s, v3(0.36, 0.48, 0.8));
  std::vector<double> ratios;
  for (double gamma : {1e-1, 1e-2, 1e-3}) {
    RngStream rng(11);
    ratios.push_back(estimate_offset(closure, s, *f, x, gamma, 1000, rng).offset.vec.norm() / gamma);
  }
  for (double r : ratios) {
    EXPECT_GT(r, 0.0);
    EXPECT_LT(r, 10.0 * ratios.front());
  }
}

TEST(OracleTest, OffsetOfConstantObjectiveIsZero) {
  Sphere s(3);
  const auto f = make_constant(3, 1.0);
  for (MethodKind k : {MethodKind::RSGD, MethodKind::ReSGD, MethodKind::ROG, MethodKind::RSEG}) {
    MethodConfig cfg;
    cfg.method = k;
    cfg.noise = uniform_sphere_noise(0.0);
    const Point x = make_point(s, v3(0, 0.6, 0.8));
    RngStream rng(12);
    const OffsetEstimate e = estimate_offset(make_step_closure(s, *f, cfg), s, *f, x, 0.1, 1000, rng);
    EXPECT_LT(e.offset.vec.norm(), 1e-15) << to_string(k);
  }
}

}  // namespace
}  // namespace rrm
