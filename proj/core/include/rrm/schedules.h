#pragma once

#include <string>
#include <variant>

namespace rrm {

/// gamma_n = c / n^p with p in (0, 1].
struct PowerSchedule {
  double c = 1.0;
  double p = 1.0;
};

/// gamma_n = c / log(n + 1)^(1 + eps).
struct LogPowerSchedule {
  double c = 1.0;
  double eps = 0.1;
};

struct ConstantSchedule {
  double c = 0.01;
};

struct StepSchedule {
  std::variant<PowerSchedule, LogPowerSchedule, ConstantSchedule> variant;
  long start_index = 1;
};

StepSchedule power_schedule(double c, double p, long start_index = 1);
StepSchedule log_power_schedule(double c, double eps, long start_index = 1);
StepSchedule constant_schedule(double c, long start_index = 1);

/// Throws ContractViolation on invalid parameters.
void validate(const StepSchedule& s);
std::string describe(const StepSchedule& s);

double step_at(const StepSchedule& s, long n);

enum class Verdict { PassesHeuristic, FailsHeuristic };
std::string to_string(Verdict v);

struct SeriesCheck {
  double partial_sum = 0.0;
  double last_term = 0.0;
  Verdict verdict = Verdict::PassesHeuristic;
};

/// sum_{n <= N} gamma_n, with the verdict taken from the closed-form
/// classification of the variant (every variant diverges).
SeriesCheck check_divergence(const StepSchedule& s, long n_max);

/// sum_{n <= N} lambda^(1 / gamma_n). Power and LogPower are summable for
/// every lambda in (0, 1); Constant is not.
SeriesCheck check_lambda_summability(const StepSchedule& s, double lambda,
                                     long n_max);

}  // namespace rrm
