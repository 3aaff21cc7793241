#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rrm/dynamics.h"
#include "rrm/hessian_domain.h"
#include "rrm/manifold.h"
#include "rrm/methods.h"
#include "rrm/objective.h"
#include "rrm/saddle_analysis.h"

namespace rrm {

// Configuration ---------------------------------------------------------------

struct ManifoldSpec {
  std::string type = "sphere";  // sphere | torus | hessian
  int dim = 3;                  // sphere ambient dim, hessian coordinate dim
  double major_radius = 2.0;
  double minor_radius = 1.0;
  LegendreKind legendre = LegendreKind::NegativeEntropy;
};

struct ObjectiveSpec {
  /// rayleigh | torus_height | linear | quadratic | constant | finite_sum
  std::string type = "rayleigh";
  Vec diag;    // rayleigh
  Vec linear;  // linear, quadratic
  Mat matrix;  // quadratic
  double constant = 0.0;
  int dim = 0;  // constant
  std::vector<ObjectiveSpec> components;  // finite_sum
};

struct NoiseSpec {
  std::string type = "uniform_sphere";  // uniform_sphere | rademacher | minibatch
  double sigma = 0.0;
  int batch_size = 1;
};

struct InitSpec {
  /// A catalog label, or "strict_saddles" to cycle over the cataloged strict
  /// saddles by trial index. Ignored when `coords` is set.
  std::string near = "strict_saddles";
  std::optional<Vec> coords;
  /// Trials start at exp_p(s * delta * w) with w a uniform unit tangent and s
  /// uniform in (0, 1]. delta = 0 starts exactly at p.
  double radius = 1e-3;
};

struct ClassificationSpec {
  double r_min = 1e-2;
  double r_saddle = 1e-2;
  /// A terminal counts as converged only when |grad f| < grad_tol.
  double grad_tol = 1e-1;
};

struct AptSpec {
  bool enabled = false;
  double window = 1.0;
  long probe_base = 100;
  int probe_count = 7;  // probes at probe_base * 2^k, k < probe_count
  int probe_grid = 64;
};

struct ExperimentConfig {
  ManifoldSpec manifold;
  ObjectiveSpec objective;
  MethodConfig method;  // noise model seeded per trial
  NoiseSpec noise;
  long trials = 1;
  std::uint64_t master_seed = 0;
  InitSpec init;
  ClassificationSpec classification;
  AptSpec apt;
};

/// Strict parsing: unknown keys, wrong types and out-of-range values raise
/// ConfigError with the offending field path.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

ManifoldPtr build_manifold(const ManifoldSpec& spec);
ObjectivePtr build_objective(const ObjectiveSpec& spec);
/// Noise model for one trial.
NoiseModel build_noise(const ExperimentConfig& cfg, std::uint64_t seed);

/// Per-trial seed derived from the master seed; independent of scheduling.
std::uint64_t trial_seed(std::uint64_t master_seed, long trial);

// Assumption validators --------------------------------------------------------

enum class CheckStatus { Pass, Warn };

std::string to_string(CheckStatus s);

struct AssumptionCheck {
  std::string assumption;  // A1 .. A4
  CheckStatus status = CheckStatus::Pass;
  std::string detail;
  std::map<std::string, double> values;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  /// False when the step-size schedule fails the series heuristics.
  bool schedule_gate = true;
};

/// Report-only diagnostics for the four standing assumptions.
AssumptionReport validate_assumptions(const ExperimentConfig& cfg);

// Experiments -----------------------------------------------------------------

enum class VerdictKind { ConvergedToMin, ConvergedToSaddle, NonConverged };

std::string to_string(VerdictKind v);

struct TrialVerdict {
  VerdictKind kind = VerdictKind::NonConverged;
  std::string label;  // catalog label for the converged verdicts
};

std::string to_string(const TrialVerdict& v);

struct TrialReport {
  long trial = 0;
  std::uint64_t seed = 0;
  Point initial;
  Point terminal;
  /// Aligned with the catalog points.
  std::vector<double> distances;
  double grad_norm = 0.0;
  TrialVerdict verdict;
  long clip_events = 0;
  long non_contractive_steps = 0;
  long iterations = 0;
  std::optional<std::string> error;
  /// Iterates kept for plotting, when requested.
  std::vector<Point> path;
};

struct WilsonInterval {
  double lower = 0.0;
  double upper = 0.0;
};

/// 95% Wilson score interval for k successes in n trials.
WilsonInterval wilson_interval(long k, long n);

struct AggregateReport {
  std::string manifold_id;
  std::string objective_id;
  std::string method_id;
  std::string schedule_id;
  int coord_dim = 0;
  CriticalCatalog catalog;
  std::vector<TrialReport> trials;
  long converged_to_min = 0;
  long converged_to_saddle = 0;
  long non_converged = 0;
  std::map<std::string, long> per_label;
  double saddle_frequency = 0.0;
  WilsonInterval saddle_interval;
  double mean_iterations = 0.0;
  long clip_events = 0;
  long errors = 0;
  std::optional<AptReport> apt;
  std::optional<AssumptionReport> assumptions;
};

struct RunOptions {
  int threads = 1;
  /// Keep every k-th iterate of each trial for plotting (0 = none).
  long path_stride = 0;
};

/// Critical catalog of the configured objective on the configured manifold.
CriticalCatalog experiment_catalog(const Manifold& m, const Objective& f);

/// Verdict for a terminal point against the catalog.
TrialVerdict classify_terminal(const Manifold& m, const Objective& f,
                               const CriticalCatalog& catalog,
                               const ClassificationSpec& spec, const Point& x,
                               long iterations, std::vector<double>* distances);

/// Starting point of one trial.
Point initial_point(const Manifold& m, const CriticalCatalog& catalog,
                    const InitSpec& init, long trial, std::uint64_t seed);

/// Runs every trial and folds the reports in trial order. The result does
/// not depend on the thread count.
AggregateReport run_experiment(const ExperimentConfig& cfg,
                               const RunOptions& options = {});

/// Single fully recorded trajectory (trial 0) and its APT deviations.
AptReport run_apt(const ExperimentConfig& cfg, Trajectory* trajectory = nullptr);

// Output ----------------------------------------------------------------------

/// One row per trial: trial,seed,verdict,x0..,dist_<label>..,clip_events,iters.
/// A leading "# generated <time>" comment line is written when `timestamp`.
std::string format_csv(const AggregateReport& report, bool timestamp);
void emit_csv(const AggregateReport& report, const std::string& path,
              bool timestamp);

std::string format_summary_json(const AggregateReport& report);
void emit_summary_json(const AggregateReport& report, const std::string& path);

std::string format_apt_csv(const AptReport& report);
void emit_apt_csv(const AptReport& report, const std::string& path);

std::string format_catalog_json(const CriticalCatalog& catalog);

std::string format_assumptions(const AssumptionReport& report);

/// Trajectories in the (theta, phi) square of the torus. Each trajectory is
/// one <g> group; polylines are cut where an angle jumps by more than pi.
/// Strict saddles are drawn black and minimizers red.
std::string format_svg(const class Torus& torus,
                       const std::vector<std::vector<Point>>& trajectories,
                       const CriticalCatalog& catalog);
void emit_svg(const class Torus& torus,
              const std::vector<std::vector<Point>>& trajectories,
              const CriticalCatalog& catalog, const std::string& path);

}  // namespace rrm
