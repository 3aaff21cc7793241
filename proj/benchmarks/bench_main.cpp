#include <benchmark/benchmark.h>

#include "rrm/dynamics.h"
#include "rrm/hessian_domain.h"
#include "rrm/methods.h"
#include "rrm/sphere.h"
#include "rrm/torus.h"

namespace {

using namespace rrm;

Vec v3(double a, double b, double c) { return Eigen::Vector3d(a, b, c); }

void BM_SphereExpLog(benchmark::State& state) {
  Sphere s(3);
  const Vec x = v3(0.36, 0.48, 0.8);
  const Vec v = s.project_tangent(x, v3(0.3, -0.2, 0.1));
  for (auto _ : state) {
    const Vec y = s.exp(x, v);
    benchmark::DoNotOptimize(s.log(x, y));
  }
}
BENCHMARK(BM_SphereExpLog);

void BM_TorusExp(benchmark::State& state) {
  Torus t(2, 1);
  const Vec x = t.embed({0.9, 2.3});
  const Vec v = t.tangent_frame(x) * Eigen::Vector2d(0.3, 0.4) * (state.range(0) / 100.0);
  for (auto _ : state) benchmark::DoNotOptimize(t.exp(x, v));
}
BENCHMARK(BM_TorusExp)->Arg(1)->Arg(10)->Arg(100);

void BM_TorusLog(benchmark::State& state) {
  Torus t(2, 1);
  const Vec x = t.embed({0.9, 2.3});
  const Vec y = t.exp(x, t.tangent_frame(x) * Eigen::Vector2d(0.3, 0.4));
  for (auto _ : state) benchmark::DoNotOptimize(t.log(x, y));
}
BENCHMARK(BM_TorusLog);

void BM_TorusDistFar(benchmark::State& state) {
  Torus t(2, 1);
  const Vec x = t.embed({0.0, 0.0});
  const Vec y = t.embed({3.0, 2.5});
  for (auto _ : state) benchmark::DoNotOptimize(t.dist(x, y));
}
BENCHMARK(BM_TorusDistFar)->Unit(benchmark::kMillisecond);

void BM_EntropyProx(benchmark::State& state) {
  HessianDomain d(LegendreKind::NegativeEntropy, static_cast<int>(state.range(0)));
  const Vec x = Vec::Constant(state.range(0), 1.0 / static_cast<double>(state.range(0)));
  const Vec y = Vec::LinSpaced(state.range(0), -1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(d.prox(x, y));
}
BENCHMARK(BM_EntropyProx)->Arg(3)->Arg(100);

template <MethodKind Kind>
void BM_SphereStep(benchmark::State& state) {
  Sphere s(3);
  const auto f = make_rayleigh(v3(1, 2, 3));
  MethodConfig cfg;
  cfg.method = Kind;
  cfg.noise = uniform_sphere_noise(0.2, 1);
  MethodState st = initial_state(Point{v3(0.36, 0.48, 0.8)}, cfg.noise);
  for (auto _ : state) {
    StepOutcome out = step(s, *f, st, cfg, 1e-2);
    st = std::move(out.state);
  }
}
BENCHMARK(BM_SphereStep<MethodKind::RSGD>);
BENCHMARK(BM_SphereStep<MethodKind::RSEG>);
BENCHMARK(BM_SphereStep<MethodKind::ROG>);
BENCHMARK(BM_SphereStep<MethodKind::RPPM>);

template <MethodKind Kind>
void BM_TorusStep(benchmark::State& state) {
  Torus t(2, 1);
  const auto f = make_torus_height();
  MethodConfig cfg;
  cfg.method = Kind;
  cfg.noise = uniform_sphere_noise(0.1, 1);
  const Point x0{t.embed({3.0, 0.2})};
  MethodState st = initial_state(x0, cfg.noise);
  for (auto _ : state) {
    StepOutcome out = step(t, *f, st, cfg, 1e-2);
    st = std::move(out.state);
  }
}
BENCHMARK(BM_TorusStep<MethodKind::RSGD>);
BENCHMARK(BM_TorusStep<MethodKind::RSEG>);

void BM_SphereFlow(benchmark::State& state) {
  Sphere s(3);
  const auto f = make_rayleigh(v3(1, 2, 3));
  const Point x{v3(0.36, 0.48, 0.8)};
  for (auto _ : state) benchmark::DoNotOptimize(flow(s, *f, x, 1.0));
}
BENCHMARK(BM_SphereFlow)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
