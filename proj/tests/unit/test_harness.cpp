#include <cmath>
#include <numbers>
#include <string>

#include <gtest/gtest.h>

#include "rrm/harness.h"
#include "rrm/torus.h"

namespace rrm {
namespace {

const char* kSphereConfig = R"({
  "manifold": {"type": "sphere", "dim": 3},
  "objective": {"type": "rayleigh", "diag": [1, 2, 3]},
  "method": {"name": "RSGD", "max_iters": 300},
  "schedule": {"type": "power", "c": 0.5, "p": 0.6},
  "noise": {"type": "uniform_sphere", "sigma": 0.2},
  "trials": 6,
  "master_seed": 17,
  "init": {"near": "strict_saddles", "radius": 1e-3}
})";

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

std::string config_error_path(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<none>";
}

TEST(ConfigTest, ParsesSphereConfig) {
  const ExperimentConfig cfg = parse_config(kSphereConfig);
  EXPECT_EQ(cfg.manifold.type, "sphere");
  EXPECT_EQ(cfg.method.method, MethodKind::RSGD);
  EXPECT_EQ(cfg.method.max_iters, 300);
  EXPECT_EQ(cfg.trials, 6);
  EXPECT_EQ(cfg.master_seed, 17u);
  EXPECT_DOUBLE_EQ(cfg.noise.sigma, 0.2);
  EXPECT_DOUBLE_EQ(cfg.init.radius, 1e-3);
  EXPECT_DOUBLE_EQ(cfg.classification.r_min, 1e-2);
  EXPECT_FALSE(cfg.apt.enabled);
}

TEST(ConfigTest, ReportsFieldPaths) {
  std::string text = kSphereConfig;
  EXPECT_EQ(config_error_path(std::string(text).replace(text.find("\"dim\""), 5, "\"dimm\"")),
            "manifold.dimm");
  EXPECT_EQ(config_error_path(std::string(text).replace(text.find("\"trials\": 6"), 11, "\"trials\": 0")),
            "trials");
  EXPECT_EQ(config_error_path(std::string(text).replace(text.find("\"RSGD\""), 6, "\"RSGX\"")),
            "method.name");
  EXPECT_EQ(config_error_path(std::string(text).replace(text.find("0.6"), 3, "1.6")),
            "schedule.type");
  EXPECT_EQ(config_error_path(std::string(text).replace(text.find("\"sigma\": 0.2"), 12, "\"sigma\": \"a\"")),
            "noise.sigma");
  EXPECT_EQ(config_error_path("{"), "");
  EXPECT_EQ(config_error_path(R"({"manifold": {"type": "sphere"}})"), "objective");
}

TEST(ConfigTest, CrossChecks) {
  const char* smd_on_sphere = R"({
    "manifold": {"type": "sphere", "dim": 3},
    "objective": {"type": "rayleigh", "diag": [1, 2, 3]},
    "method": {"name": "SMD"},
    "schedule": {"type": "constant", "c": 0.1}})";
  EXPECT_EQ(config_error_path(smd_on_sphere), "method");
  const char* wrong_dim = R"({
    "manifold": {"type": "sphere", "dim": 4},
    "objective": {"type": "rayleigh", "diag": [1, 2, 3]},
    "method": {"name": "RSGD"},
    "schedule": {"type": "constant", "c": 0.1}})";
  EXPECT_NE(config_error_path(wrong_dim), "<none>");
}

TEST(ConfigTest, TrialSeedsAreStable) {
  EXPECT_EQ(trial_seed(5, 3), trial_seed(5, 3));
  EXPECT_NE(trial_seed(5, 3), trial_seed(5, 4));
  EXPECT_NE(trial_seed(5, 3), trial_seed(6, 3));
}

TEST(WilsonTest, KnownValues) {
  const WilsonInterval zero = wilson_interval(0, 200);
  EXPECT_EQ(zero.lower, 0.0);
  const double z2 = 1.959963984540054 * 1.959963984540054;
  EXPECT_NEAR(zero.upper, z2 / (200.0 + z2), 1e-12);
  const WilsonInterval half = wilson_interval(50, 100);
  EXPECT_NEAR(half.lower + half.upper, 1.0, 1e-12);
  EXPECT_THROW(wilson_interval(0, 0), ContractViolation);
}

TEST(ExperimentTest, ZeroIterationsIsNonConverged) {
  ExperimentConfig cfg = parse_config(kSphereConfig);
  cfg.trials = 1;
  cfg.method.max_iters = 0;
  const AggregateReport r = run_experiment(cfg);
  ASSERT_EQ(r.trials.size(), 1u);
  EXPECT_EQ(r.trials[0].verdict.kind, VerdictKind::NonConverged);
  EXPECT_EQ(r.trials[0].terminal.coords, r.trials[0].initial.coords);
}

TEST(ExperimentTest, TrapControl) {
  ExperimentConfig cfg = parse_config(kSphereConfig);
  cfg.noise.sigma = 0.0;
  cfg.init.near = "+e2";
  cfg.init.radius = 0.0;
  const AggregateReport r = run_experiment(cfg);
  EXPECT_EQ(r.converged_to_saddle, cfg.trials);
  EXPECT_EQ(r.per_label.at("ConvergedToSaddle(+e2)"), cfg.trials);
  EXPECT_DOUBLE_EQ(r.saddle_frequency, 1.0);
}

TEST(ExperimentTest, VerdictsPartitionTrials) {
  const AggregateReport r = run_experiment(parse_config(kSphereConfig));
  EXPECT_EQ(r.converged_to_min + r.converged_to_saddle + r.non_converged, 6);
  for (const auto& t : r.trials) {
    ASSERT_EQ(t.distances.size(), r.catalog.points.size());
    if (t.verdict.kind == VerdictKind::NonConverged) continue;
    const auto it = std::find_if(r.catalog.points.begin(), r.catalog.points.end(),
                                 [&](const CriticalPoint& cp) { return cp.label == t.verdict.label; });
    ASSERT_NE(it, r.catalog.points.end());
    EXPECT_LE(t.distances[static_cast<std::size_t>(it - r.catalog.points.begin())], 1e-2);
  }
}

TEST(ExperimentTest, InitialPointsStayWithinRadius) {
  const ExperimentConfig cfg = parse_config(kSphereConfig);
  const auto m = build_manifold(cfg.manifold);
  const auto f = build_objective(cfg.objective);
  const CriticalCatalog cat = experiment_catalog(*m, *f);
  for (long trial = 0; trial < 20; ++trial) {
    const Point x = initial_point(*m, cat, cfg.init, trial, trial_seed(cfg.master_seed, trial));
    double d = std::numeric_limits<double>::infinity();
    for (const auto& cp : cat.points) {
      if (cp.classification == CriticalKind::StrictSaddle) {
        d = std::min(d, m->dist(x.coords, cp.location.coords));
      }
    }
    EXPECT_LE(d, 1e-3 + 1e-12);
    EXPECT_GT(d, 0.0);
  }
  InitSpec bad = cfg.init;
  bad.near = "nowhere";
  EXPECT_THROW(initial_point(*m, cat, bad, 0, 1), ConfigError);
}

TEST(ExperimentTest, ThreadCountDoesNotChangeReport) {
  const ExperimentConfig cfg = parse_config(kSphereConfig);
  RunOptions one;
  RunOptions four;
  four.threads = 4;
  EXPECT_EQ(format_csv(run_experiment(cfg, one), false),
            format_csv(run_experiment(cfg, four), false));
}

TEST(ValidatorTest, ConstantScheduleClosesTheGate) {
  ExperimentConfig cfg = parse_config(kSphereConfig);
  cfg.method.schedule = constant_schedule(0.01);
  const AssumptionReport r = validate_assumptions(cfg);
  EXPECT_FALSE(r.schedule_gate);
  ASSERT_EQ(r.checks.size(), 4u);
  EXPECT_EQ(r.checks[1].assumption, "A2");
  EXPECT_EQ(r.checks[1].status, CheckStatus::Warn);
  EXPECT_NE(r.checks[1].detail.find("FailsHeuristic"), std::string::npos);
}

TEST(ValidatorTest, PowerSchedulePassesAndZeroNoiseWarns) {
  ExperimentConfig cfg = parse_config(kSphereConfig);
  AssumptionReport r = validate_assumptions(cfg);
  EXPECT_TRUE(r.schedule_gate);
  EXPECT_EQ(r.checks[1].status, CheckStatus::Pass);
  EXPECT_EQ(r.checks[2].status, CheckStatus::Pass);
  EXPECT_EQ(r.checks[3].status, CheckStatus::Pass);

  cfg.method.schedule = log_power_schedule(1.0, 0.1);
  EXPECT_TRUE(validate_assumptions(cfg).schedule_gate);

  cfg.noise.sigma = 0.0;
  r = validate_assumptions(cfg);
  EXPECT_EQ(r.checks[2].status, CheckStatus::Warn);
  EXPECT_EQ(r.checks[2].values.at("excitability_min"), 0.0);
}

TEST(OutputTest, EmptyReportIsHeaderOnly) {
  AggregateReport r;
  r.coord_dim = 3;
  CriticalPoint a;
  a.label = "+e1";
  CriticalPoint b;
  b.label = "(pi,0)";
  r.catalog.points = {a, b};
  EXPECT_EQ(format_csv(r, false),
            "trial,seed,verdict,x0,x1,x2,dist_+e1,\"dist_(pi,0)\",clip_events,iters\n");
  const std::string stamped = format_csv(r, true);
  EXPECT_EQ(stamped.rfind("# generated ", 0), 0u);
  EXPECT_EQ(count(stamped, "\n"), 2u);
}

TEST(OutputTest, SvgStructure) {
  Torus t(2, 1);
  const double pi = std::numbers::pi;
  const std::vector<Point> three = {Point{t.embed({1.0, 1.0})}, Point{t.embed({1.1, 1.1})},
                                    Point{t.embed({1.2, 1.2})}};
  const std::vector<Point> wrapping = {Point{t.embed({1.0, 2 * pi - 0.1})},
                                       Point{t.embed({1.0, 2 * pi - 0.02})},
                                       Point{t.embed({1.0, 0.05})}, Point{t.embed({1.0, 0.1})}};
  const CriticalCatalog cat = experiment_catalog(t, *make_torus_height());

  const std::string one = format_svg(t, {three}, cat);
  EXPECT_EQ(count(one, "<g class=\"trajectory\""), 1u);
  EXPECT_EQ(count(one, "<polyline"), 1u);
  EXPECT_EQ(count(one, "fill=\"black\""), 3u);
  EXPECT_EQ(count(one, "fill=\"red\""), 1u);

  const std::string two = format_svg(t, {three, wrapping}, cat);
  EXPECT_EQ(count(two, "<g class=\"trajectory\""), 2u);
  EXPECT_EQ(count(two, "<polyline"), 3u);
}

TEST(OutputTest, SummaryJsonCarriesCounts) {
  ExperimentConfig cfg = parse_config(kSphereConfig);
  cfg.trials = 2;
  const std::string j = format_summary_json(run_experiment(cfg));
  EXPECT_NE(j.find("\"ConvergedToSaddle\""), std::string::npos);
  EXPECT_NE(j.find("\"saddle_frequency_wilson95\""), std::string::npos);
  EXPECT_NE(j.find("\"catalog\""), std::string::npos);
}

}  // namespace
}  // namespace rrm
