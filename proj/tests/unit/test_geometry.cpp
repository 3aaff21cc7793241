#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "rrm/hessian_domain.h"
#include "rrm/objective.h"
#include "rrm/rng.h"
#include "rrm/sphere.h"
#include "rrm/torus.h"

namespace rrm {
namespace {

constexpr double kPi = std::numbers::pi;

Vec v3(double a, double b, double c) { return Eigen::Vector3d(a, b, c); }
Vec v2(double a, double b) { return Eigen::Vector2d(a, b); }

Tangent tan_at(const Manifold& m, const Point& x, const Vec& v) {
  return make_tangent(m, x, v);
}

Vec random_unit_tangent(const Manifold& m, const Vec& x, RngStream& rng) {
  std::normal_distribution<double> normal;
  const Mat frame = m.tangent_frame(x);
  Vec c(frame.cols());
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = normal(rng);
  return frame * c.normalized();
}

TEST(SphereTest, InnerOfUnitTangent) {
  Sphere s(3);
  const Point x = make_point(s, v3(1, 0, 0));
  const Tangent u = tan_at(s, x, v3(0, 1, 0));
  EXPECT_DOUBLE_EQ(inner(s, x, u, u), 1.0);
  EXPECT_DOUBLE_EQ(inner(s, x, zero_tangent(s, x), u), 0.0);
}

TEST(SphereTest, InnerRejectsForeignBase) {
  Sphere s(3);
  const Point x = make_point(s, v3(1, 0, 0));
  const Point y = make_point(s, v3(0, 1, 0));
  const Tangent u = tan_at(s, y, v3(1, 0, 0));
  EXPECT_THROW(inner(s, x, u, u), ContractViolation);
}

TEST(SphereTest, MakePointRejectsOffManifold) {
  Sphere s(3);
  EXPECT_THROW(make_point(s, v3(1, 1, 0)), ContractViolation);
  EXPECT_THROW(make_point(s, v3(NAN, 0, 0)), Error);
}

TEST(SphereTest, ExpQuarterCircle) {
  Sphere s(3);
  const Point x = make_point(s, v3(1, 0, 0));
  const Point y = exp_map(s, x, tan_at(s, x, v3(0, kPi / 2, 0)));
  EXPECT_LT((y.coords - v3(0, 1, 0)).norm(), 1e-10);
  EXPECT_EQ(exp_map(s, x, zero_tangent(s, x)).coords, x.coords);
}

TEST(SphereTest, LogQuarterCircleAndAntipode) {
  Sphere s(3);
  const Point x = make_point(s, v3(1, 0, 0));
  const Tangent v = log_map(s, x, make_point(s, v3(0, 1, 0)));
  EXPECT_LT((v.vec - v3(0, kPi / 2, 0)).norm(), 1e-12);
  EXPECT_LT(log_map(s, x, x).vec.norm(), 1e-15);
  EXPECT_THROW(log_map(s, x, make_point(s, v3(-1, 0, 0))),
               OutsideInjectivityRadius);
}

TEST(SphereTest, TransportExamples) {
  Sphere s(3);
  const Point x = make_point(s, v3(1, 0, 0));
  const Point y = make_point(s, v3(0, 1, 0));
  EXPECT_LT((transport(s, x, y, tan_at(s, x, v3(0, 0, 1))).vec - v3(0, 0, 1)).norm(), 1e-12);
  EXPECT_LT((transport(s, x, y, tan_at(s, x, v3(0, 2.5, 0))).vec - v3(-2.5, 0, 0)).norm(), 1e-12);
  EXPECT_LT(transport(s, x, y, zero_tangent(s, x)).vec.norm(), 1e-15);
}

TEST(SphereTest, DistExamples) {
  Sphere s(3);
  const Point x = make_point(s, v3(1, 0, 0));
  EXPECT_NEAR(dist(s, x, make_point(s, v3(0, 1, 0))), kPi / 2, 1e-14);
  EXPECT_EQ(dist(s, x, x), 0.0);
}

TEST(SphereTest, RoundtripAndIsometry) {
  Sphere s(3);
  RngStream rng(7);
  std::normal_distribution<double> normal;
  const double bound = 0.9 * s.injectivity_lower_bound();
  for (int k = 0; k < 1000; ++k) {
    Vec x = v3(normal(rng), normal(rng), normal(rng)).normalized();
    const Point p = make_point(s, x);
    const Vec v = (bound * rng.uniform()) * random_unit_tangent(s, x, rng);
    const Point q = exp_map(s, p, tan_at(s, p, v));
    EXPECT_LT((log_map(s, p, q).vec - v).norm(), 1e-8);
    const Vec w = random_unit_tangent(s, x, rng);
    const Tangent tw = transport(s, p, q, tan_at(s, p, w));
    EXPECT_LT(std::abs(norm(s, tw) - 1.0), 1e-8);
  }
}

TEST(SphereTest, ProjectionRetraction) {
  Sphere s(3);
  const Point x = make_point(s, v3(1, 0, 0));
  const Point y = retract(s, x, tan_at(s, x, v3(0, 1, 0)), RetractionKind::Projection);
  EXPECT_LT((y.coords - v3(1, 1, 0) / std::sqrt(2.0)).norm(), 1e-15);
  EXPECT_EQ(retract(s, x, zero_tangent(s, x), RetractionKind::Projection).coords, x.coords);
  EXPECT_THROW(retract(s, x, tan_at(s, x, v3(0, 1, 0)), RetractionKind::Prox),
               UnsupportedRetraction);
}

TEST(SphereTest, RetractionSecondOrderAgreement) {
  Sphere s(3);
  const Point x = make_point(s, v3(0.6, 0.0, 0.8));
  const Tangent v = tan_at(s, x, v3(0.8, 0.3, -0.6));
  double prev = std::numeric_limits<double>::infinity();
  for (double t : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const Tangent tv = tan_at(s, x, t * v.vec);
    const double ratio =
        dist(s, retract(s, x, tv, RetractionKind::Projection), exp_map(s, x, tv)) / (t * t);
    EXPECT_LT(ratio, 1.0);
    EXPECT_LE(ratio, prev * 1.01 + 1e-6);
    prev = ratio;
  }
}

TEST(SphereTest, RiemannianGradientExamples) {
  Sphere s(3);
  const Point x = make_point(s, v3(1, 0, 0));
  const auto f = make_linear(v3(0, 0, 1));
  EXPECT_LT((riemannian_gradient(s, *f, x).vec - v3(0, 0, 1)).norm(), 1e-15);
  EXPECT_LT(riemannian_gradient(s, *make_constant(3, 2.0), x).vec.norm(), 1e-15);
}

TEST(SphereTest, HessianSpectrumOfRayleigh) {
  Sphere s(3);
  const auto f = make_rayleigh(v3(1, 2, 3));
  const HessianSpectrum saddle = hessian_spectrum(s, *f, make_point(s, v3(0, 1, 0)));
  ASSERT_EQ(saddle.eigenvalues.size(), 2u);
  EXPECT_NEAR(saddle.eigenvalues[0], -2.0, 1e-4);
  EXPECT_NEAR(saddle.eigenvalues[1], 2.0, 1e-4);
  EXPECT_FALSE(saddle.noncritical_warning);

  const HessianSpectrum min = hessian_spectrum(s, *f, make_point(s, v3(1, 0, 0)));
  EXPECT_NEAR(min.eigenvalues[0], 2.0, 1e-4);
  EXPECT_NEAR(min.eigenvalues[1], 4.0, 1e-4);

  const HessianSpectrum flat =
      hessian_spectrum(s, *make_constant(3, 1.0), make_point(s, v3(0, 0, 1)));
  for (double e : flat.eigenvalues) EXPECT_NEAR(e, 0.0, 1e-8);

  const Point off = make_point(s, v3(1, 1, 0).normalized());
  EXPECT_TRUE(hessian_spectrum(s, *f, off).noncritical_warning);
}

TEST(SphereTest, GeodesicOffset) {
  Sphere s(3);
  const Point x = make_point(s, v3(1, 0, 0));
  const Vec off = geodesic_offset(s, x, tan_at(s, x, v3(0, 0.1, 0)));
  EXPECT_NEAR(off(0), std::cos(0.1) - 1.0, 1e-15);
  EXPECT_NEAR(off(1), std::sin(0.1) - 0.1, 1e-15);
  EXPECT_NEAR(off(2), 0.0, 1e-15);
  EXPECT_EQ(geodesic_offset(s, x, zero_tangent(s, x)).norm(), 0.0);
  for (double t : {1e-1, 1e-2, 1e-3}) {
    const double ratio = geodesic_offset(s, x, tan_at(s, x, v3(0, 0, t))).norm() / (t * t);
    EXPECT_NEAR(ratio, 0.5, 0.005);
  }
}

TEST(TorusTest, RequiresEmbeddedRadii) {
  EXPECT_THROW(Torus(1.0, 1.0), ContractViolation);
  EXPECT_THROW(Torus(2.0, 0.0), ContractViolation);
  Torus t(2, 1);
  EXPECT_NEAR(t.injectivity_lower_bound(), kPi / 4, 1e-15);
  EXPECT_EQ(t.intrinsic_dim(), 2);
}

TEST(TorusTest, MinorCircleDistance) {
  Torus t(2, 1);
  EXPECT_NEAR(t.dist(v3(3, 0, 0), v3(1, 0, 0)), kPi, 1e-6);
  EXPECT_EQ(t.dist(v3(3, 0, 0), v3(3, 0, 0)), 0.0);
}

TEST(TorusTest, SmallRoundtripAlongTube) {
  Torus t(2, 1);
  const Point x = make_point(t, v3(3, 0, 0));
  for (double s : {1e-3, 1e-2, 1e-1, 0.5}) {
    const Tangent v = tan_at(t, x, v3(0, 0, s));
    const Tangent back = log_map(t, x, exp_map(t, x, v));
    EXPECT_LT((back.vec - v.vec).norm(), 1e-5 * s);
  }
}

TEST(TorusTest, RoundtripIsometryAndSpeed) {
  Torus t(2, 1);
  RngStream rng(11);
  const double bound = 0.9 * t.injectivity_lower_bound();
  for (int k = 0; k < 100; ++k) {
    const Vec x = t.embed({2 * kPi * rng.uniform(), 2 * kPi * rng.uniform()});
    const Point p = make_point(t, x);
    const Vec v = (bound * rng.uniform()) * random_unit_tangent(t, x, rng);
    const auto [y, vel] = t.geodesic_endpoint(x, v);
    EXPECT_LT(std::abs(t.norm(y, vel) - v.norm()), 1e-6 * std::max(v.norm(), 1e-12));
    const Point q = make_point(t, y, {1e-9, 1e-9});
    EXPECT_LT((log_map(t, p, q).vec - v).norm(), 1e-5);
    const Vec w = random_unit_tangent(t, x, rng);
    EXPECT_LT(std::abs(norm(t, transport(t, p, q, tan_at(t, p, w))) - 1.0), 1e-8);
  }
}

TEST(TorusTest, ProjectionRetractionIsFirstOrder) {
  Torus t(2, 1);
  const Vec x = t.embed({0.7, 1.3});
  const Point p = make_point(t, x);
  const Vec v = t.tangent_frame(x) * v2(0.6, 0.8);
  for (double s : {1e-1, 1e-2, 1e-3}) {
    const Tangent tv = tan_at(t, p, s * v);
    const double ratio =
        dist(t, retract(t, p, tv, RetractionKind::Projection), exp_map(t, p, tv)) / (s * s);
    EXPECT_LT(ratio, 1.0);
  }
  EXPECT_THROW(retract(t, p, tan_at(t, p, v), RetractionKind::Prox), UnsupportedRetraction);
}

TEST(TorusTest, TangentFrameIsOrthonormal) {
  Torus t(2, 1);
  const Vec x = t.embed({2.1, -0.4});
  const Mat e = t.tangent_frame(x);
  EXPECT_NEAR(t.inner(x, e.col(0), e.col(0)), 1.0, 1e-14);
  EXPECT_NEAR(t.inner(x, e.col(1), e.col(1)), 1.0, 1e-14);
  EXPECT_NEAR(t.inner(x, e.col(0), e.col(1)), 0.0, 1e-14);
  EXPECT_LT(t.tangency_residual(x, e.col(0)), 1e-14);
}

TEST(TorusTest, OffsetRatioBounded) {
  Torus t(2, 1);
  const Point p = make_point(t, t.embed({0.3, 0.2}));
  const Vec v = t.tangent_frame(p.coords) * v2(0.8, 0.6);
  std::vector<double> ratios;
  for (double s : {1e-1, 1e-2, 1e-3}) {
    ratios.push_back(geodesic_offset(t, p, tan_at(t, p, s * v)).norm() / (s * s));
  }
  for (double r : ratios) {
    EXPECT_LT(r, 1.0);
    EXPECT_NEAR(r / ratios.back(), 1.0, 0.05);
  }
}

TEST(HessianDomainTest, EntropyInner) {
  HessianDomain d(LegendreKind::NegativeEntropy, 2);
  const Point x = make_point(d, v2(0.5, 0.5));
  const Tangent u = tan_at(d, x, v2(1, -1));
  EXPECT_DOUBLE_EQ(inner(d, x, u, u), 4.0);
  EXPECT_EQ(d.intrinsic_dim(), 1);
  EXPECT_THROW(make_tangent(d, x, v2(1, 0)), ContractViolation);
  EXPECT_THROW(make_point(d, v2(0.7, 0.7)), ContractViolation);
}

TEST(HessianDomainTest, EntropyProx) {
  HessianDomain d(LegendreKind::NegativeEntropy, 2);
  const Point x = make_point(d, v2(0.5, 0.5));
  const Point y = prox_mapping(d, x, v2(std::log(2.0), 0.0));
  EXPECT_NEAR(y.coords(0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(y.coords(1), 1.0 / 3.0, 1e-15);
  EXPECT_LT((prox_mapping(d, x, v2(0, 0)).coords - x.coords).norm(), 1e-15);
  Sphere s(3);
  EXPECT_THROW(prox_mapping(s, make_point(s, v3(1, 0, 0)), v3(0, 0, 0)), ContractViolation);
}

TEST(HessianDomainTest, EntropyProxRetraction) {
  HessianDomain d(LegendreKind::NegativeEntropy, 2);
  const Point x = make_point(d, v2(0.5, 0.5));
  // G(x) v = (log 2, 0) has no tangent solution; its tangent part shifts the
  // dual vector by a constant, which the prox ignores.
  const Vec dual = v2(std::log(2.0), 0.0);
  const Vec v = d.project_tangent(x.coords, dual.cwiseProduct(x.coords));
  const Point y = retract(d, x, tan_at(d, x, v), RetractionKind::Prox);
  EXPECT_NEAR(y.coords(0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(y.coords(1), 1.0 / 3.0, 1e-15);
}

TEST(HessianDomainTest, LogBarrierProxAndEscape) {
  HessianDomain d(LegendreKind::LogBarrier, 1);
  const Point x = make_point(d, Vec::Constant(1, 1.0));
  EXPECT_NEAR(prox_mapping(d, x, Vec::Constant(1, 0.5)).coords(0), 2.0, 1e-15);
  EXPECT_THROW(prox_mapping(d, x, Vec::Constant(1, 1.0)), DomainEscape);
  EXPECT_THROW(prox_mapping(d, x, Vec::Constant(1, 2.0)), DomainEscape);
}

TEST(HessianDomainTest, ReplicatorGradient) {
  HessianDomain d(LegendreKind::NegativeEntropy, 2);
  const Point x = make_point(d, v2(0.5, 0.5));
  const Tangent g = riemannian_gradient(d, *make_linear(v2(1, 0)), x);
  EXPECT_NEAR(g.vec(0), 0.25, 1e-15);
  EXPECT_NEAR(g.vec(1), -0.25, 1e-15);
}

TEST(HessianDomainTest, ProxIsRetractionVelocity) {
  for (auto kind : {LegendreKind::NegativeEntropy, LegendreKind::LogBarrier}) {
    HessianDomain d(kind, 3);
    const Point x = make_point(d, Eigen::Vector3d(0.2, 0.3, 0.5));
    Vec v = d.project_tangent(x.coords, Eigen::Vector3d(0.4, -0.1, 0.2));
    double prev = std::numeric_limits<double>::infinity();
    for (double t : {1e-1, 1e-2, 1e-3, 1e-4}) {
      const Point y = retract(d, x, tan_at(d, x, t * v), RetractionKind::Prox);
      const double err = ((y.coords - x.coords) / t - v).norm();
      EXPECT_LT(err, 2.0 * t);
      EXPECT_LT(err, prev);
      prev = err;
    }
  }
}

TEST(HessianDomainTest, ExactGeodesicsRoundtrip) {
  for (auto kind : {LegendreKind::NegativeEntropy, LegendreKind::LogBarrier,
                    LegendreKind::Euclidean}) {
    HessianDomain d(kind, 3);
    const Point x = make_point(d, Eigen::Vector3d(0.2, 0.3, 0.5));
    const Tangent v = tan_at(d, x, d.project_tangent(x.coords, Eigen::Vector3d(0.05, -0.02, 0.01)));
    const Point y = exp_map(d, x, v);
    EXPECT_LT((log_map(d, x, y).vec - v.vec).norm(), 1e-10);
    EXPECT_NEAR(dist(d, x, y), norm(d, v), 1e-10);
    const Tangent w = transport(d, x, y, v);
    EXPECT_NEAR(norm(d, w), norm(d, v), 1e-10 * norm(d, v));
  }
}

TEST(HessianDomainTest, EuclideanIsFlat) {
  HessianDomain d(LegendreKind::Euclidean, 1);
  const Point x = make_point(d, Vec::Constant(1, 1.0));
  const Point y = exp_map(d, x, tan_at(d, x, Vec::Constant(1, -0.25)));
  EXPECT_DOUBLE_EQ(y.coords(0), 0.75);
  EXPECT_THROW(geodesic_offset(d, x, tan_at(d, x, Vec::Constant(1, 0.1))),
               UnsupportedOperation);
}

}  // namespace
}  // namespace rrm
