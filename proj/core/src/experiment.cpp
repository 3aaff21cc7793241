#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <thread>

#include "rrm/harness.h"

namespace rrm {

std::string to_string(VerdictKind v) {
  switch (v) {
    case VerdictKind::ConvergedToMin:
      return "ConvergedToMin";
    case VerdictKind::ConvergedToSaddle:
      return "ConvergedToSaddle";
    case VerdictKind::NonConverged:
      return "NonConverged";
  }
  return "?";
}

std::string to_string(const TrialVerdict& v) {
  if (v.kind == VerdictKind::NonConverged) return to_string(v.kind);
  return to_string(v.kind) + "(" + v.label + ")";
}

WilsonInterval wilson_interval(long k, long n) {
  if (n <= 0) throw ContractViolation("Wilson interval needs n >= 1");
  const double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {k == 0 ? 0.0 : std::max(0.0, centre - half),
          k == n ? 1.0 : std::min(1.0, centre + half)};
}

CriticalCatalog experiment_catalog(const Manifold& m, const Objective& f) {
  return build_catalog(m, f, f.critical_candidates(m));
}

TrialVerdict classify_terminal(const Manifold& m, const Objective& f,
                               const CriticalCatalog& catalog,
                               const ClassificationSpec& spec, const Point& x,
                               long iterations, std::vector<double>* distances) {
  std::vector<double> d;
  d.reserve(catalog.points.size());
  for (const auto& cp : catalog.points) {
    d.push_back(m.dist(x.coords, cp.location.coords));
  }
  TrialVerdict verdict;
  const double g = m.norm(x.coords, m.riemannian_gradient(x.coords, f.gradient(x.coords)));
  if (iterations > 0 && g < spec.grad_tol) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d.size(); ++i) {
      const CriticalPoint& cp = catalog.points[i];
      const bool is_min = cp.classification == CriticalKind::LocalMin;
      const double radius = is_min ? spec.r_min : spec.r_saddle;
      if (d[i] <= radius && d[i] < best) {
        best = d[i];
        verdict.kind = is_min ? VerdictKind::ConvergedToMin
                              : VerdictKind::ConvergedToSaddle;
        verdict.label = cp.label;
      }
    }
  }
  if (distances) *distances = std::move(d);
  return verdict;
}

Point initial_point(const Manifold& m, const CriticalCatalog& catalog,
                    const InitSpec& init, long trial, std::uint64_t seed) {
  Point centre;
  if (init.coords) {
    centre = make_point(m, *init.coords);
  } else if (init.near == "strict_saddles") {
    std::vector<const CriticalPoint*> saddles;
    for (const auto& cp : catalog.points) {
      if (cp.classification == CriticalKind::StrictSaddle) saddles.push_back(&cp);
    }
    if (saddles.empty()) {
      throw ConfigError("init.near", "the catalog has no strict saddles");
    }
    centre = saddles[static_cast<std::size_t>(trial) % saddles.size()]->location;
  } else {
    const auto it = std::find_if(
        catalog.points.begin(), catalog.points.end(),
        [&](const CriticalPoint& cp) { return cp.label == init.near; });
    if (it == catalog.points.end()) {
      throw ConfigError("init.near", "no critical point labelled '" + init.near + "'");
    }
    centre = it->location;
  }
  if (init.radius == 0.0) return centre;

  RngStream rng = RngStream(seed).split(0x1417);
  const Mat frame = m.tangent_frame(centre.coords);
  std::normal_distribution<double> normal;
  Vec c(frame.cols());
  do {
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = normal(rng);
  } while (c.norm() == 0.0);
  c.normalize();
  const double s = 1.0 - rng.uniform();  // (0, 1]
  return Point{m.exp(centre.coords, (s * init.radius) * (frame * c))};
}

namespace {

TrialReport run_trial(const Manifold& m, const Objective& f,
                      const ExperimentConfig& cfg,
                      const CriticalCatalog& catalog, long trial,
                      long path_stride) {
  TrialReport r;
  r.trial = trial;
  r.seed = trial_seed(cfg.master_seed, trial);
  r.initial = initial_point(m, catalog, cfg.init, trial, r.seed);

  MethodConfig mc = cfg.method;
  mc.noise = build_noise(cfg, r.seed);
  mc.record_decomposition = false;
  const Recording rec = path_stride > 0 ? Recording::Full : Recording::TerminalOnly;
  const Trajectory traj = run(m, f, mc, r.initial, rec);
  if (path_stride > 0) {
    const std::size_t last = traj.points.size() - 1;
    for (std::size_t i = 0; i < last; i += static_cast<std::size_t>(path_stride)) {
      r.path.push_back(traj.points[i]);
    }
    r.path.push_back(traj.points[last]);
  }
  r.terminal = traj.points.back();
  r.iterations = traj.iterations;
  r.clip_events = traj.clip_events;
  r.non_contractive_steps = traj.non_contractive_steps;
  r.error = traj.error;
  r.grad_norm = m.norm(r.terminal.coords,
                       m.riemannian_gradient(r.terminal.coords,
                                             f.gradient(r.terminal.coords)));
  r.verdict = classify_terminal(m, f, catalog, cfg.classification, r.terminal,
                                r.error ? 0 : r.iterations, &r.distances);
  return r;
}

}  // namespace

AggregateReport run_experiment(const ExperimentConfig& cfg,
                               const RunOptions& options) {
  const ManifoldPtr m = build_manifold(cfg.manifold);
  const ObjectivePtr f = build_objective(cfg.objective);

  AggregateReport report;
  report.manifold_id = m->name();
  report.objective_id = f->name();
  report.method_id = to_string(cfg.method.method);
  report.schedule_id = describe(cfg.method.schedule);
  report.coord_dim = m->coord_dim();
  report.catalog = experiment_catalog(*m, *f);

  const long n = cfg.trials;
  std::vector<TrialReport> results(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(n));
  std::atomic<long> next{0};
  auto worker = [&] {
    for (long i = next++; i < n; i = next++) {
      try {
        results[static_cast<std::size_t>(i)] =
            run_trial(*m, *f, cfg, report.catalog, i, options.path_stride);
      } catch (...) {
        failures[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const int threads =
      static_cast<int>(std::clamp<long>(options.threads, 1, std::max(1L, n)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  // Deterministic fold in trial order.
  double iter_sum = 0.0;
  for (auto& r : results) {
    switch (r.verdict.kind) {
      case VerdictKind::ConvergedToMin:
        ++report.converged_to_min;
        break;
      case VerdictKind::ConvergedToSaddle:
        ++report.converged_to_saddle;
        break;
      case VerdictKind::NonConverged:
        ++report.non_converged;
        break;
    }
    ++report.per_label[to_string(r.verdict)];
    iter_sum += static_cast<double>(r.iterations);
    report.clip_events += r.clip_events;
    if (r.error) ++report.errors;
  }
  report.trials = std::move(results);
  report.saddle_frequency =
      static_cast<double>(report.converged_to_saddle) / static_cast<double>(n);
  report.saddle_interval = wilson_interval(report.converged_to_saddle, n);
  report.mean_iterations = iter_sum / static_cast<double>(n);
  if (cfg.apt.enabled) report.apt = run_apt(cfg);
  return report;
}

AptReport run_apt(const ExperimentConfig& cfg, Trajectory* trajectory) {
  const ManifoldPtr m = build_manifold(cfg.manifold);
  const ObjectivePtr f = build_objective(cfg.objective);
  const CriticalCatalog catalog =
      cfg.init.coords ? CriticalCatalog{} : experiment_catalog(*m, *f);
  const std::uint64_t seed = trial_seed(cfg.master_seed, 0);
  const Point x0 = initial_point(*m, catalog, cfg.init, 0, seed);

  MethodConfig mc = cfg.method;
  mc.noise = build_noise(cfg, seed);
  mc.record_decomposition = true;
  Trajectory traj = run(*m, *f, mc, x0, Recording::Full);

  std::vector<long> indices;
  for (int k = 0; k < cfg.apt.probe_count; ++k) {
    indices.push_back(cfg.apt.probe_base << k);
  }
  AptReport rep = apt_report(*m, *f, traj, indices, cfg.apt.window,
                             cfg.apt.probe_grid);
  if (trajectory) *trajectory = std::move(traj);
  return rep;
}

}  // namespace rrm
