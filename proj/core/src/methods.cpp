#include "rrm/methods.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rrm/hessian_domain.h"

namespace rrm {

std::string to_string(MethodKind kind) {
  switch (kind) {
    case MethodKind::RSGD:
      return "RSGD";
    case MethodKind::ReSGD:
      return "ReSGD";
    case MethodKind::SMD:
      return "SMD";
    case MethodKind::ROG:
      return "ROG";
    case MethodKind::NGD:
      return "NGD";
    case MethodKind::RPPM:
      return "RPPM";
    case MethodKind::RSEG:
      return "RSEG";
  }
  return "?";
}

void validate(const MethodConfig& cfg, const Manifold& m) {
  validate(cfg.schedule);
  if (cfg.max_iters < 0) throw ContractViolation("max_iters must be >= 0");
  const bool hessian = m.kind() == ManifoldKind::HessianRiemannian;
  if ((cfg.method == MethodKind::SMD || cfg.method == MethodKind::NGD) &&
      !hessian) {
    throw ContractViolation(to_string(cfg.method) +
                            " requires a Hessian-Riemannian manifold");
  }
  if (cfg.method == MethodKind::ReSGD &&
      cfg.retraction == RetractionKind::Prox && !hessian) {
    throw ContractViolation("prox retraction requires a Hessian-Riemannian "
                            "manifold");
  }
  if (cfg.method == MethodKind::RPPM) {
    if (cfg.inner_iters < 1) throw ContractViolation("inner_iters must be >= 1");
    if (!(cfg.inner_tol > 0.0)) throw ContractViolation("inner_tol must be > 0");
  }
  const double sigma = cfg.noise.magnitude();
  if (!std::isnan(sigma) && !(sigma >= 0.0)) {
    throw ContractViolation("noise magnitude must be >= 0");
  }
  if (const auto* mb = std::get_if<FiniteSumMinibatch>(&cfg.noise.variant)) {
    if (mb->components.empty() || mb->batch_size < 1) {
      throw ContractViolation("minibatch noise needs components and batch >= 1");
    }
  }
}

MethodState initial_state(const Point& x0, const NoiseModel& noise) {
  return MethodState{x0, std::nullopt, std::nullopt, 0, RngStream(noise.rng_seed)};
}

namespace {

enum Role : std::uint64_t { kPrimary = 0, kLeader = 1, kBootstrap = 2 };

RngStream role_stream(const MethodState& s, Role role) {
  return s.rng.split(static_cast<std::uint64_t>(s.iter)).split(role);
}

Vec drift_at(const Manifold& m, const Objective& f, const Vec& x) {
  return -m.riemannian_gradient(x, f.gradient(x));
}

// Shortens steps beyond 0.9 * injectivity bound so that log and transport
// along the step stay well defined.
Vec clip_step(const Manifold& m, const Vec& x, Vec step, StepFlags& flags) {
  const double bound = 0.9 * m.injectivity_lower_bound();
  if (!std::isfinite(bound)) return step;
  const double n = m.norm(x, step);
  if (n <= bound) return step;
  ++flags.clip_events;
  return step * (bound / n);
}

MethodState advance(const MethodState& s, Point next) {
  MethodState out = s;
  out.current = std::move(next);
  out.iter = s.iter + 1;
  return out;
}

// Fills noise_part/offset_part so that value = v(x) + U + b holds exactly.
void record(SurrogateGradient& sg, const Vec& drift, const Vec& noise) {
  const Point& x = sg.base;
  sg.noise_part = Tangent{x, noise};
  sg.offset_part = Tangent{x, sg.value.vec - drift - noise};
}

const HessianDomain& require_domain(const Manifold& m, MethodKind kind) {
  const auto* d = dynamic_cast<const HessianDomain*>(&m);
  if (d == nullptr) {
    throw ContractViolation(to_string(kind) +
                            " requires a Hessian-Riemannian manifold");
  }
  return *d;
}

// v_hat = (1/gamma) log_x(next) for retraction-type updates.
SurrogateGradient implied_surrogate(const Manifold& m, const Point& x,
                                    const Point& next, double gamma) {
  Vec v = m.log(x.coords, next.coords) / gamma;
  return SurrogateGradient{x, Tangent{x, std::move(v)}, std::nullopt,
                           std::nullopt, std::nullopt};
}

}  // namespace

Point rrm_step(const Manifold& m, const Point& x, double gamma,
               const Tangent& v_hat) {
  if (!(gamma > 0.0)) throw ContractViolation("step size must be positive");
  return exp_map(m, x, Tangent{v_hat.base, gamma * v_hat.vec});
}

StepOutcome step_rsgd(const Manifold& m, const Objective& f,
                      const MethodState& s, const NoiseModel& noise,
                      double gamma, const StepOptions& opt) {
  const Point& x = s.current;
  RngStream rng = role_stream(s, kPrimary);
  const SurrogateGradient o = query(noise, m, f, x, rng);

  StepFlags flags;
  const Vec step = clip_step(m, x.coords, gamma * o.value.vec, flags);
  SurrogateGradient sg = o;
  if (flags.clip_events > 0) {
    sg.value.vec = step / gamma;
    if (opt.record_decomposition) {
      record(sg, o.mean_estimate->vec, o.noise_part->vec);
    }
  }
  Point next{m.exp(x.coords, step)};
  return StepOutcome{advance(s, std::move(next)), std::move(sg), flags};
}

StepOutcome step_resgd(const Manifold& m, const Objective& f,
                       const MethodState& s, const NoiseModel& noise,
                       double gamma, const StepOptions& opt) {
  if (opt.retraction == RetractionKind::Exponential) {
    return step_rsgd(m, f, s, noise, gamma, opt);
  }
  const Point& x = s.current;
  RngStream rng = role_stream(s, kPrimary);
  const SurrogateGradient o = query(noise, m, f, x, rng);

  StepFlags flags;
  const Vec step = clip_step(m, x.coords, gamma * o.value.vec, flags);
  Point next{m.retract(x.coords, step, opt.retraction)};
  SurrogateGradient sg = implied_surrogate(m, x, next, gamma);
  if (opt.record_decomposition) {
    record(sg, o.mean_estimate->vec, o.noise_part->vec);
  }
  return StepOutcome{advance(s, std::move(next)), std::move(sg), flags};
}

StepOutcome step_smd(const Manifold& m, const Objective& f,
                     const MethodState& s, const NoiseModel& noise,
                     double gamma, const StepOptions& opt) {
  const HessianDomain& domain = require_domain(m, MethodKind::SMD);
  const Point& x = s.current;
  RngStream rng = role_stream(s, kPrimary);
  const SurrogateGradient o = query(noise, m, f, x, rng);

  // Dual oracle: -grad_euclid f(x) + G(x) U.
  const Vec dual = gamma * (-f.gradient(x.coords) +
                            domain.to_dual(x.coords, o.noise_part->vec));
  Point next{domain.prox(x.coords, dual)};

  StepFlags flags;
  SurrogateGradient sg = implied_surrogate(m, x, next, gamma);
  if (opt.record_decomposition) {
    const Vec via_retraction =
        domain.retract(x.coords, gamma * o.value.vec, RetractionKind::Prox);
    flags.prox_route_gap =
        (via_retraction - next.coords).lpNorm<Eigen::Infinity>();
    record(sg, o.mean_estimate->vec, o.noise_part->vec);
  }
  return StepOutcome{advance(s, std::move(next)), std::move(sg), flags};
}

StepOutcome step_ngd(const Manifold& m, const Objective& f,
                     const MethodState& s, const NoiseModel& noise,
                     double gamma, const StepOptions& opt) {
  const HessianDomain& domain = require_domain(m, MethodKind::NGD);
  const Point& x = s.current;
  RngStream rng = role_stream(s, kPrimary);
  const SurrogateGradient o = query(noise, m, f, x, rng);

  Point next{domain.retract(x.coords, gamma * o.value.vec,
                            RetractionKind::Projection)};
  SurrogateGradient sg = domain.legendre() == LegendreKind::Euclidean
                             ? SurrogateGradient{x, o.value, std::nullopt,
                                                 std::nullopt, std::nullopt}
                             : implied_surrogate(m, x, next, gamma);
  if (opt.record_decomposition) {
    record(sg, o.mean_estimate->vec, o.noise_part->vec);
  }
  return StepOutcome{advance(s, std::move(next)), std::move(sg), StepFlags{}};
}

namespace {

// Shared second half of ROG and RSEG: evaluate the oracle at the leader,
// transport it back to x along the leader step, and take the geodesic step.
StepOutcome leader_step(const Manifold& m, const Objective& f,
                        const MethodState& s, const NoiseModel& noise,
                        double gamma, const StepOptions& opt,
                        const Vec& lead_step, StepFlags flags,
                        SurrogateGradient* leader_oracle) {
  const Point& x = s.current;
  const Point leader{m.exp(x.coords, lead_step)};
  RngStream rng = role_stream(s, kLeader);
  SurrogateGradient o = query(noise, m, f, leader, rng);

  const Vec w = m.transport_from_endpoint(x.coords, lead_step, o.value.vec);
  const Vec step = clip_step(m, x.coords, gamma * w, flags);
  SurrogateGradient sg{x, Tangent{x, step / gamma}, std::nullopt, std::nullopt,
                       std::nullopt};
  if (opt.record_decomposition) {
    const Vec u =
        m.transport_from_endpoint(x.coords, lead_step, o.noise_part->vec);
    record(sg, drift_at(m, f, x.coords), u);
  }
  Point next{m.exp(x.coords, step)};
  MethodState out = advance(s, std::move(next));
  out.previous_leader = leader;
  if (leader_oracle != nullptr) *leader_oracle = std::move(o);
  return StepOutcome{std::move(out), std::move(sg), flags};
}

}  // namespace

StepOutcome step_rog(const Manifold& m, const Objective& f,
                     const MethodState& s, const NoiseModel& noise,
                     double gamma, const StepOptions& opt) {
  const Point& x = s.current;
  // Stale oracle from the previous leader, moved into T_x. At the first step
  // X_{-1/2} := x_0 and the oracle is drawn there.
  Vec stale;
  if (s.previous_leader && s.previous_leader_oracle) {
    stale = m.transport(s.previous_leader->coords, x.coords,
                        s.previous_leader_oracle->vec);
  } else {
    RngStream rng = role_stream(s, kBootstrap);
    stale = query(noise, m, f, x, rng).value.vec;
  }
  StepFlags flags;
  const Vec lead_step = clip_step(m, x.coords, gamma * stale, flags);
  SurrogateGradient leader_oracle;
  StepOutcome out = leader_step(m, f, s, noise, gamma, opt, lead_step, flags,
                                &leader_oracle);
  out.state.previous_leader_oracle = leader_oracle.value;
  return out;
}

StepOutcome step_rseg(const Manifold& m, const Objective& f,
                      const MethodState& s, const NoiseModel& noise,
                      double gamma, const StepOptions& opt) {
  const Point& x = s.current;
  RngStream rng = role_stream(s, kPrimary);
  const SurrogateGradient first = query(noise, m, f, x, rng);
  StepFlags flags;
  const Vec lead_step = clip_step(m, x.coords, gamma * first.value.vec, flags);
  StepOutcome out =
      leader_step(m, f, s, noise, gamma, opt, lead_step, flags, nullptr);
  out.state.previous_leader.reset();
  return out;
}

StepOutcome step_rppm(const Manifold& m, const Objective& f,
                      const MethodState& s, const NoiseModel& noise,
                      double gamma, const StepOptions& opt) {
  const Point& x = s.current;
  const Vec& xc = x.coords;
  StepFlags flags;

  Vec step = Vec::Zero(xc.size());
  Point z = x;
  double relax = 1.0;
  double prev_residual = std::numeric_limits<double>::infinity();
  bool converged = false;
  int k = 0;
  while (k < opt.inner_iters) {
    ++k;
    // Same seed at every inner iterate: O(z; xi_{n+1}) as a function of z.
    RngStream rng = role_stream(s, kLeader);
    const SurrogateGradient o = query(noise, m, f, z, rng);
    const Vec w = m.transport_from_endpoint(xc, step, o.value.vec);
    StepFlags scratch;
    const Vec target = clip_step(m, xc, gamma * w, scratch);
    flags.clip_events = scratch.clip_events;
    const double residual = m.norm(xc, target - step);
    if (residual < opt.inner_tol) {
      converged = true;
      break;
    }
    // Krasnoselskii-Mann relaxation when plain Picard stops contracting.
    if (residual > 0.9 * prev_residual) relax = std::max(relax / 2.0, 1.0 / 64.0);
    prev_residual = residual;
    step += relax * (target - step);
    z = Point{m.exp(xc, step)};
  }
  flags.non_contractive = !converged;
  flags.inner_iterations = k;

  SurrogateGradient sg{x, Tangent{x, step / gamma}, std::nullopt, std::nullopt,
                       std::nullopt};
  if (opt.record_decomposition) {
    const Vec v_x = drift_at(m, f, xc);
    const Vec b =
        m.transport_from_endpoint(xc, step, drift_at(m, f, z.coords)) - v_x;
    sg.offset_part = Tangent{x, b};
    sg.noise_part = Tangent{x, sg.value.vec - v_x - b};
  }
  return StepOutcome{advance(s, std::move(z)), std::move(sg), flags};
}

StepOutcome step(const Manifold& m, const Objective& f, const MethodState& s,
                 const MethodConfig& cfg, double gamma) {
  const StepOptions opt{cfg.record_decomposition, cfg.retraction,
                        cfg.inner_iters, cfg.inner_tol};
  switch (cfg.method) {
    case MethodKind::RSGD:
      return step_rsgd(m, f, s, cfg.noise, gamma, opt);
    case MethodKind::ReSGD:
      return step_resgd(m, f, s, cfg.noise, gamma, opt);
    case MethodKind::SMD:
      return step_smd(m, f, s, cfg.noise, gamma, opt);
    case MethodKind::ROG:
      return step_rog(m, f, s, cfg.noise, gamma, opt);
    case MethodKind::NGD:
      return step_ngd(m, f, s, cfg.noise, gamma, opt);
    case MethodKind::RPPM:
      return step_rppm(m, f, s, cfg.noise, gamma, opt);
    case MethodKind::RSEG:
      return step_rseg(m, f, s, cfg.noise, gamma, opt);
  }
  throw ContractViolation("unknown method");
}

StepClosure make_step_closure(const Manifold& m, const Objective& f,
                              const MethodConfig& cfg) {
  MethodConfig local = cfg;
  local.record_decomposition = true;
  return [&m, &f, local](const Point& x, double gamma, RngStream& rng) {
    MethodState s{x, std::nullopt, std::nullopt, 0, rng};
    return step(m, f, s, local, gamma).surrogate;
  };
}

Trajectory run(const Manifold& m, const Objective& f, const MethodConfig& cfg,
               const Point& x0, Recording recording) {
  validate(cfg, m);
  Trajectory traj;
  traj.start_index = cfg.schedule.start_index;
  traj.points.push_back(x0);
  traj.effective_times.push_back(0.0);

  MethodState state = initial_state(x0, cfg.noise);
  double tau = 0.0;
  for (long i = 0; i < cfg.max_iters; ++i) {
    const long n = cfg.schedule.start_index + i;
    const double gamma = step_at(cfg.schedule, n);
    StepOutcome out;
    try {
      out = step(m, f, state, cfg, gamma);
    } catch (const Error& e) {
      traj.error = "step " + std::to_string(n) + ": " + e.what();
      break;
    }
    const double residual = m.membership_residual(out.state.current.coords);
    if (!(residual <= 1e-8)) {
      traj.error = "step " + std::to_string(n) +
                   ": iterate left the manifold (residual " +
                   std::to_string(residual) + ")";
      break;
    }
    traj.clip_events += out.flags.clip_events;
    if (out.flags.non_contractive) ++traj.non_contractive_steps;
    tau += gamma;
    state = std::move(out.state);
    ++traj.iterations;
    if (recording == Recording::Full) {
      traj.points.push_back(state.current);
      traj.effective_times.push_back(tau);
      traj.step_sizes.push_back(gamma);
      if (cfg.record_decomposition) {
        traj.step_records.push_back(std::move(out.surrogate));
      }
    } else {
      traj.points.back() = state.current;
      traj.effective_times.back() = tau;
    }
  }
  return traj;
}

}  // namespace rrm
