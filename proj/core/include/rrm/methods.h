#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rrm/manifold.h"
#include "rrm/objective.h"
#include "rrm/oracles.h"
#include "rrm/rng.h"
#include "rrm/schedules.h"

namespace rrm {

enum class MethodKind { RSGD, ReSGD, SMD, ROG, NGD, RPPM, RSEG };

std::string to_string(MethodKind kind);

struct MethodConfig {
  MethodKind method = MethodKind::RSGD;
  /// Retraction used by ReSGD.
  RetractionKind retraction = RetractionKind::Projection;
  /// RPPM inner fixed-point solver.
  int inner_iters = 50;
  double inner_tol = 1e-10;
  StepSchedule schedule;
  NoiseModel noise;
  long max_iters = 0;
  bool record_decomposition = false;
};

/// Throws ContractViolation when the method does not fit the manifold or the
/// parameters are out of range.
void validate(const MethodConfig& cfg, const Manifold& m);

struct MethodState {
  Point current;
  /// ROG's previous leader X_{n-1/2} and the oracle value drawn there. The
  /// first iteration bootstraps with X_{-1/2} := x_0.
  std::optional<Point> previous_leader;
  std::optional<Tangent> previous_leader_oracle;
  long iter = 0;
  /// Trajectory stream; step n draws from rng.split(n).
  RngStream rng;
};

MethodState initial_state(const Point& x0, const NoiseModel& noise);

struct StepFlags {
  /// A geodesic step longer than 0.9 * injectivity bound was shortened.
  int clip_events = 0;
  /// RPPM inner iteration hit its cap without reaching inner_tol.
  bool non_contractive = false;
  int inner_iterations = 0;
  /// SMD: max-norm gap between the prox route and the retraction route.
  std::optional<double> prox_route_gap;
};

struct StepOutcome {
  MethodState state;
  /// The realized surrogate v_hat: next = exp_x(gamma * v_hat).
  SurrogateGradient surrogate;
  StepFlags flags;
};

struct StepOptions {
  bool record_decomposition = false;
  RetractionKind retraction = RetractionKind::Projection;
  int inner_iters = 50;
  double inner_tol = 1e-10;
};

/// exp_x(gamma * v_hat).
Point rrm_step(const Manifold& m, const Point& x, double gamma,
               const Tangent& v_hat);

StepOutcome step_rsgd(const Manifold& m, const Objective& f,
                      const MethodState& s, const NoiseModel& noise,
                      double gamma, const StepOptions& opt = {});
/// next = R_x(gamma * oracle); the surrogate is (1/gamma) log_x(next).
StepOutcome step_resgd(const Manifold& m, const Objective& f,
                       const MethodState& s, const NoiseModel& noise,
                       double gamma, const StepOptions& opt = {});
/// next = P_x(gamma * dual oracle). With record_decomposition the
/// retraction route R_x(gamma v_hat) = P_x(G(x) gamma v_hat) is evaluated too
/// and its gap reported in flags.prox_route_gap.
StepOutcome step_smd(const Manifold& m, const Objective& f,
                     const MethodState& s, const NoiseModel& noise,
                     double gamma, const StepOptions& opt = {});
StepOutcome step_rog(const Manifold& m, const Objective& f,
                     const MethodState& s, const NoiseModel& noise,
                     double gamma, const StepOptions& opt = {});
/// next = x + gamma * (-grad f(x) + U) in domain coordinates.
StepOutcome step_ngd(const Manifold& m, const Objective& f,
                     const MethodState& s, const NoiseModel& noise,
                     double gamma, const StepOptions& opt = {});
/// Implicit step log_{x+}(x) = -gamma v(x+), solved by the Picard iteration
/// z <- exp_x(gamma * transport_{z -> x} oracle(z)). The oracle seed is fixed
/// for the whole inner solve, so the stochastic fixed point is well defined.
StepOutcome step_rppm(const Manifold& m, const Objective& f,
                      const MethodState& s, const NoiseModel& noise,
                      double gamma, const StepOptions& opt = {});
StepOutcome step_rseg(const Manifold& m, const Objective& f,
                      const MethodState& s, const NoiseModel& noise,
                      double gamma, const StepOptions& opt = {});

/// Dispatches on cfg.method.
StepOutcome step(const Manifold& m, const Objective& f, const MethodState& s,
                 const MethodConfig& cfg, double gamma);

/// Single-step surrogate sampler for estimate_offset: runs one step of the
/// configured method from a fresh state at x with decomposition recording.
StepClosure make_step_closure(const Manifold& m, const Objective& f,
                              const MethodConfig& cfg);

struct Trajectory {
  long start_index = 1;
  std::vector<Point> points;
  /// tau for each stored point: tau_start = 0, tau_n = sum_{k<n} gamma_k.
  std::vector<double> effective_times;
  /// gamma_n for each completed step.
  std::vector<double> step_sizes;
  /// Surrogates, one per completed step, when recorded.
  std::vector<SurrogateGradient> step_records;
  long iterations = 0;
  long clip_events = 0;
  long non_contractive_steps = 0;
  std::optional<std::string> error;
};

enum class Recording { Full, TerminalOnly };

/// Runs cfg.max_iters steps from x0. Deterministic given cfg.noise.rng_seed.
/// A geometry error stops the run and is stored in `error` alongside the
/// partial trajectory. Every iterate is re-checked for manifold membership.
Trajectory run(const Manifold& m, const Objective& f, const MethodConfig& cfg,
               const Point& x0, Recording recording = Recording::Full);

}  // namespace rrm
