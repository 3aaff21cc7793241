#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "rrm/harness.h"
#include "rrm/torus.h"

namespace rrm {

std::string to_string(CheckStatus s) { return s == CheckStatus::Pass ? "PASS" : "WARN"; }

namespace {

constexpr long kSeriesHorizon = 10000;
constexpr int kProbePoints = 20;
constexpr long kExcitabilitySamples = 2000;
constexpr long kOffsetSamples = 400;
constexpr int kLipschitzPairs = 200;

Point random_point(const Manifold& m, RngStream& rng) {
  std::normal_distribution<double> normal;
  const int n = m.coord_dim();
  Vec x(n);
  switch (m.kind()) {
    case ManifoldKind::Sphere:
      do {
        for (int i = 0; i < n; ++i) x(i) = normal(rng);
      } while (x.norm() == 0.0);
      return Point{x / x.norm()};
    case ManifoldKind::TorusEmbedded: {
      const auto& torus = dynamic_cast<const Torus&>(m);
      const double two_pi = 2.0 * std::acos(-1.0);
      return Point{torus.embed({two_pi * rng.uniform(), two_pi * rng.uniform()})};
    }
    case ManifoldKind::HessianRiemannian: {
      const auto& d = dynamic_cast<const HessianDomain&>(m);
      for (int i = 0; i < n; ++i) {
        switch (d.legendre()) {
          case LegendreKind::NegativeEntropy:
            x(i) = -std::log(1.0 - rng.uniform());  // Dirichlet(1) weights
            break;
          case LegendreKind::LogBarrier:
            x(i) = std::exp(normal(rng));
            break;
          case LegendreKind::Euclidean:
            x(i) = normal(rng);
            break;
        }
      }
      if (d.legendre() == LegendreKind::NegativeEntropy) {
        x = x.cwiseMax(1e-3);
        x /= x.sum();
      }
      return Point{x};
    }
  }
  return Point{x};
}

Vec random_unit_tangent(const Manifold& m, const Vec& x, RngStream& rng) {
  std::normal_distribution<double> normal;
  const Mat frame = m.tangent_frame(x);
  Vec c(frame.cols());
  do {
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = normal(rng);
  } while (c.norm() == 0.0);
  return frame * (c / c.norm());
}

Vec drift(const Manifold& m, const Objective& f, const Vec& x) {
  return -m.riemannian_gradient(x, f.gradient(x));
}

AssumptionCheck check_smoothness(const Manifold& m, const Objective& f,
                                 RngStream rng) {
  AssumptionCheck c{"A1", CheckStatus::Pass, "", {}};
  const double iota = m.injectivity_lower_bound();
  const double reach = std::isfinite(iota) ? std::min(0.5, 0.5 * iota) : 0.5;
  double lip = 0.0;
  int used = 0;
  for (int k = 0; k < kLipschitzPairs; ++k) {
    RngStream r = rng.split(static_cast<std::uint64_t>(k));
    try {
      const Point x = random_point(m, r);
      const Vec step = (reach * (1.0 - r.uniform())) * random_unit_tangent(m, x.coords, r);
      const Vec y = m.exp(x.coords, step);
      const double d = m.dist(x.coords, y);
      if (!(d > 0.0)) continue;
      const Vec moved = m.transport(x.coords, y, drift(m, f, x.coords));
      lip = std::max(lip, m.norm(y, moved - drift(m, f, y)) / d);
      ++used;
    } catch (const Error&) {
      continue;
    }
  }
  c.values["lipschitz_estimate"] = lip;
  c.values["pairs"] = used;
  if (used == 0 || !std::isfinite(lip)) {
    c.status = CheckStatus::Warn;
    c.detail = "could not sample the gradient Lipschitz constant";
  } else {
    std::ostringstream os;
    os << "sampled Lipschitz constant of the gradient field: " << lip;
    c.detail = os.str();
  }
  return c;
}

AssumptionCheck check_schedule(const StepSchedule& s, bool& gate) {
  AssumptionCheck c{"A2", CheckStatus::Pass, "", {}};
  const SeriesCheck div = check_divergence(s, kSeriesHorizon);
  c.values["partial_sum"] = div.partial_sum;
  std::ostringstream os;
  os << describe(s) << ": sum gamma_n up to " << kSeriesHorizon << " = "
     << div.partial_sum << " (" << to_string(div.verdict) << ")";
  bool ok = div.verdict == Verdict::PassesHeuristic;
  for (double lambda : {0.25, 0.5, 0.75}) {
    const SeriesCheck sc = check_lambda_summability(s, lambda, kSeriesHorizon);
    std::ostringstream key;
    key << "lambda_" << lambda;
    c.values[key.str() + "_partial_sum"] = sc.partial_sum;
    c.values[key.str() + "_last_term"] = sc.last_term;
    os << "; lambda=" << lambda << " " << to_string(sc.verdict);
    ok = ok && sc.verdict == Verdict::PassesHeuristic;
  }
  c.detail = os.str();
  if (!ok) c.status = CheckStatus::Warn;
  gate = ok;
  return c;
}

AssumptionCheck check_oracle(const Manifold& m, const Objective& f,
                             const ExperimentConfig& cfg, RngStream rng) {
  AssumptionCheck c{"A3", CheckStatus::Pass, "", {}};
  const NoiseModel noise = build_noise(cfg, rng.split(99).key());
  std::ostringstream os;

  double c_min = std::numeric_limits<double>::infinity();
  bool excitable = true;
  double sup_noise = noise.magnitude();
  const bool sample_sup = std::isnan(sup_noise);
  if (sample_sup) sup_noise = 0.0;
  for (int k = 0; k < kProbePoints; ++k) {
    RngStream r = rng.split(static_cast<std::uint64_t>(k));
    const Point x = random_point(m, r);
    const Tangent dir{x, random_unit_tangent(m, x.coords, r)};
    RngStream draws = r.split(1);
    const ExcitabilityEstimate e =
        estimate_excitability(noise, m, x, dir, kExcitabilitySamples, draws);
    c_min = std::min(c_min, e.mean);
    if (!(e.mean > 3.0 * e.standard_error)) excitable = false;
    if (sample_sup) {
      RngStream sup_draws = r.split(2);
      for (int i = 0; i < 200; ++i) {
        sup_noise = std::max(sup_noise, m.norm(x.coords, draw_noise(noise, m, x, sup_draws).vec));
      }
    }
  }
  c.values["excitability_min"] = c_min;
  c.values["sup_noise_norm"] = sup_noise;
  os << "excitability min over " << kProbePoints << " points: " << c_min
     << (excitable ? "" : " (not significantly positive)")
     << "; sup |U| = " << sup_noise;

  // Offset per unit step on a 3-decade grid at one random point.
  MethodConfig mc = cfg.method;
  mc.noise = noise;
  const StepClosure closure = make_step_closure(m, f, mc);
  RngStream r = rng.split(1000);
  const Point x = random_point(m, r);
  double first = 0.0;
  double last = 0.0;
  double last_se = 0.0;
  double bound = 0.0;
  bool offset_ok = true;
  const double grid[] = {1e-1, 1e-2, 1e-3};
  for (double gamma : grid) {
    RngStream draws = r.split(static_cast<std::uint64_t>(std::lround(-std::log10(gamma))));
    try {
      const OffsetEstimate est =
          estimate_offset(closure, m, f, x, gamma, kOffsetSamples, draws);
      const double ratio = m.norm(x.coords, est.offset.vec) / gamma;
      std::ostringstream key;
      key << "offset_over_gamma_" << gamma;
      c.values[key.str()] = ratio;
      bound = std::max(bound, ratio);
      if (gamma == grid[0]) first = ratio;
      last = ratio;
      last_se = est.standard_error * std::sqrt(static_cast<double>(x.coords.size())) / gamma;
    } catch (const Error& e) {
      offset_ok = false;
      os << "; offset estimate failed at gamma=" << gamma << ": " << e.what();
    }
  }
  if (offset_ok && !(last <= 10.0 * first + 3.0 * last_se + 1e-12)) offset_ok = false;
  c.values["offset_bound"] = bound;
  os << "; max |b|/gamma over gamma in {1e-1,1e-2,1e-3}: " << bound;
  if (!offset_ok) os << " (growing as gamma shrinks)";
  c.detail = os.str();
  if (!excitable || !offset_ok) c.status = CheckStatus::Warn;
  return c;
}

AssumptionCheck check_injectivity(const Manifold& m) {
  AssumptionCheck c{"A4", CheckStatus::Pass, "", {}};
  const double iota = m.injectivity_lower_bound();
  c.values["injectivity_lower_bound"] = iota;
  std::ostringstream os;
  os << "injectivity lower bound " << iota
     << "; steps longer than 0.9 of it are clipped";
  c.detail = os.str();
  if (!(iota > 0.0)) c.status = CheckStatus::Warn;
  return c;
}

}  // namespace

AssumptionReport validate_assumptions(const ExperimentConfig& cfg) {
  const ManifoldPtr m = build_manifold(cfg.manifold);
  const ObjectivePtr f = build_objective(cfg.objective);
  const RngStream rng = RngStream(cfg.master_seed).split(0xA55u);
  AssumptionReport report;
  report.checks.push_back(check_smoothness(*m, *f, rng.split(1)));
  report.checks.push_back(check_schedule(cfg.method.schedule, report.schedule_gate));
  report.checks.push_back(check_oracle(*m, *f, cfg, rng.split(3)));
  report.checks.push_back(check_injectivity(*m));
  return report;
}

}  // namespace rrm
