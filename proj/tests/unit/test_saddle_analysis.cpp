#include <cmath>
#include <map>
#include <numbers>

#include <gtest/gtest.h>

#include "rrm/saddle_analysis.h"
#include "rrm/sphere.h"
#include "rrm/torus.h"

namespace rrm {
namespace {

constexpr double kPi = std::numbers::pi;

Vec v3(double a, double b, double c) { return Eigen::Vector3d(a, b, c); }

TEST(SaddleTest, RefineRayleighSaddle) {
  Sphere s(3);
  const auto f = make_rayleigh(v3(1, 2, 3));
  const Point x0 = make_point(s, v3(1e-3, 1.0, -1e-3).normalized());
  const Point x = refine_critical(s, *f, x0);
  EXPECT_LT(std::min((x.coords - v3(0, 1, 0)).norm(), (x.coords + v3(0, 1, 0)).norm()), 1e-10);

  const Point e2 = make_point(s, v3(0, 1, 0));
  EXPECT_EQ(refine_critical(s, *f, e2).coords, e2.coords);
}

TEST(SaddleTest, RefineTorusSaddle) {
  Torus t(2, 1);
  const auto f = make_torus_height();
  const Point x0 = make_point(t, t.embed({kPi - 0.05, 0.03}));
  const Point x = refine_critical(t, *f, x0);
  EXPECT_LT((x.coords - t.embed({kPi, 0.0})).norm(), 1e-8);
}

TEST(SaddleTest, RefineFailsWithoutCriticalPoint) {
  Sphere s(3);
  const auto f = make_linear(v3(1, 0, 0));
  // The only critical points of a linear function are +-e1; a cap of zero
  // iterations cannot reach them.
  EXPECT_THROW(refine_critical(s, *f, make_point(s, v3(0, 1, 0)), 0), NotCritical);
}

TEST(SaddleTest, ClassifyRayleigh) {
  Sphere s(3);
  const auto f = make_rayleigh(v3(1, 2, 3));
  const CriticalPoint saddle = classify(s, *f, make_point(s, v3(0, 1, 0)));
  EXPECT_EQ(saddle.classification, CriticalKind::StrictSaddle);
  EXPECT_NEAR(saddle.spectrum[0], -2.0, 1e-4);
  EXPECT_NEAR(saddle.spectrum[1], 2.0, 1e-4);

  const CriticalPoint min = classify(s, *f, make_point(s, v3(1, 0, 0)));
  EXPECT_EQ(min.classification, CriticalKind::LocalMin);
  EXPECT_NEAR(min.spectrum[0], 2.0, 1e-4);
  EXPECT_NEAR(min.spectrum[1], 4.0, 1e-4);

  const CriticalPoint flat = classify(s, *make_constant(3, 1.0), make_point(s, v3(0, 0, 1)));
  EXPECT_EQ(flat.classification, CriticalKind::Degenerate);
  for (double e : flat.spectrum) EXPECT_NEAR(e, 0.0, 1e-8);

  EXPECT_THROW(classify(s, *f, make_point(s, v3(1, 1, 0).normalized())), NotCritical);
}

TEST(SaddleTest, ClassifyIsFrameInvariant) {
  Sphere s(3);
  const auto f = make_rayleigh(v3(1, 2, 3));
  const Point x = make_point(s, v3(0, 1, 0));
  for (double angle : {0.3, 1.1}) {
    Mat frame(3, 2);
    frame << std::cos(angle), -std::sin(angle), 0, 0, std::sin(angle), std::cos(angle);
    const CriticalPoint a = classify(s, *f, x);
    const CriticalPoint b = classify(s, *f, x, frame);
    EXPECT_EQ(a.classification, b.classification);
    for (std::size_t i = 0; i < a.spectrum.size(); ++i) {
      EXPECT_NEAR(a.spectrum[i], b.spectrum[i], 1e-4);
    }
  }
}

TEST(SaddleTest, DistToSet) {
  Sphere s(3);
  const Point x = make_point(s, v3(1, 0, 0));
  const Point y = make_point(s, v3(0, 1, 0));
  EXPECT_EQ(dist_to_set(s, x, {y, x}), 0.0);
  EXPECT_NEAR(dist_to_set(s, x, {y}), kPi / 2, 1e-15);
  EXPECT_EQ(dist_to_set(s, x, {y, y, y}), dist_to_set(s, x, {y}));
  EXPECT_THROW(dist_to_set(s, x, {}), ContractViolation);
}

TEST(SaddleTest, TorusHeightCensus) {
  Torus t(2, 1);
  const auto f = make_torus_height();
  const CriticalCatalog cat = build_catalog(t, *f, f->critical_candidates(t));
  ASSERT_EQ(cat.points.size(), 4u);
  std::map<long, CriticalKind> by_value;
  for (const auto& cp : cat.points) {
    by_value[std::lround(f->value(cp.location.coords))] = cp.classification;
  }
  EXPECT_EQ(by_value.at(3), CriticalKind::StrictSaddle);
  EXPECT_EQ(by_value.at(1), CriticalKind::StrictSaddle);
  EXPECT_EQ(by_value.at(-1), CriticalKind::StrictSaddle);
  EXPECT_EQ(by_value.at(-3), CriticalKind::LocalMin);
}

TEST(SaddleTest, CatalogMergesDuplicates) {
  Sphere s(3);
  const auto f = make_rayleigh(v3(1, 2, 3));
  std::vector<CriticalCandidate> cands = f->critical_candidates(s);
  ASSERT_EQ(cands.size(), 6u);
  cands.push_back({v3(1e-9, 1.0, 0.0).normalized(), "dup"});
  const CriticalCatalog cat = build_catalog(s, *f, cands);
  EXPECT_EQ(cat.points.size(), 6u);
  for (std::size_t i = 0; i < cat.points.size(); ++i) {
    for (std::size_t j = i + 1; j < cat.points.size(); ++j) {
      EXPECT_GT(s.dist(cat.points[i].location.coords, cat.points[j].location.coords), 2e-6);
    }
  }
}

}  // namespace
}  // namespace rrm
