#include "rrm/schedules.h"

#include <cmath>
#include <sstream>
#include <type_traits>

#include "rrm/errors.h"

namespace rrm {

StepSchedule power_schedule(double c, double p, long start_index) {
  return StepSchedule{PowerSchedule{c, p}, start_index};
}

StepSchedule log_power_schedule(double c, double eps, long start_index) {
  return StepSchedule{LogPowerSchedule{c, eps}, start_index};
}

StepSchedule constant_schedule(double c, long start_index) {
  return StepSchedule{ConstantSchedule{c}, start_index};
}

void validate(const StepSchedule& s) {
  if (s.start_index < 1) throw ContractViolation("start_index must be >= 1");
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if (!(v.c > 0.0)) throw ContractViolation("step constant c must be > 0");
        if constexpr (std::is_same_v<T, PowerSchedule>) {
          if (!(v.p > 0.0 && v.p <= 1.0)) {
            throw ContractViolation("power exponent p must be in (0, 1]");
          }
        } else if constexpr (std::is_same_v<T, LogPowerSchedule>) {
          if (!(v.eps > 0.0)) throw ContractViolation("eps must be > 0");
        }
      },
      s.variant);
}

std::string describe(const StepSchedule& s) {
  std::ostringstream os;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PowerSchedule>) {
          os << "Power(" << v.c << "," << v.p << ")";
        } else if constexpr (std::is_same_v<T, LogPowerSchedule>) {
          os << "LogPower(" << v.c << "," << v.eps << ")";
        } else {
          os << "Constant(" << v.c << ")";
        }
      },
      s.variant);
  return os.str();
}

double step_at(const StepSchedule& s, long n) {
  if (n < s.start_index) {
    throw ContractViolation("step index " + std::to_string(n) +
                            " precedes start_index " +
                            std::to_string(s.start_index));
  }
  const double nd = static_cast<double>(n);
  return std::visit(
      [nd](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PowerSchedule>) {
          return v.c / std::pow(nd, v.p);
        } else if constexpr (std::is_same_v<T, LogPowerSchedule>) {
          return v.c / std::pow(std::log(nd + 1.0), 1.0 + v.eps);
        } else {
          return v.c;
        }
      },
      s.variant);
}

std::string to_string(Verdict v) {
  return v == Verdict::PassesHeuristic ? "PassesHeuristic" : "FailsHeuristic";
}

SeriesCheck check_divergence(const StepSchedule& s, long n_max) {
  SeriesCheck out;
  double comp = 0.0;  // Kahan compensation
  for (long n = s.start_index; n <= n_max; ++n) {
    const double term = step_at(s, n);
    const double y = term - comp;
    const double t = out.partial_sum + y;
    comp = (t - out.partial_sum) - y;
    out.partial_sum = t;
    out.last_term = term;
  }
  // c / n^p with p <= 1, c / log(n)^(1+eps) and constants all diverge.
  out.verdict = Verdict::PassesHeuristic;
  return out;
}

SeriesCheck check_lambda_summability(const StepSchedule& s, double lambda,
                                     long n_max) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw ContractViolation("lambda must be in (0, 1)");
  }
  SeriesCheck out;
  const double log_lambda = std::log(lambda);
  for (long n = s.start_index; n <= n_max; ++n) {
    const double term = std::exp(log_lambda / step_at(s, n));
    out.partial_sum += term;
    out.last_term = term;
  }
  out.verdict = std::holds_alternative<ConstantSchedule>(s.variant)
                    ? Verdict::FailsHeuristic
                    : Verdict::PassesHeuristic;
  return out;
}

}  // namespace rrm
