#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "rrm/harness.h"
#include "rrm/torus.h"

namespace {

constexpr int kConfigError = 2;
constexpr int kGateRefused = 3;

void print_summary(const rrm::AggregateReport& r) {
  std::cout << r.method_id << " on " << r.manifold_id << " (" << r.objective_id
            << "), " << r.schedule_id << ", " << r.trials.size() << " trials\n";
  for (const auto& [label, count] : r.per_label) {
    std::cout << "  " << label << ": " << count << "\n";
  }
  std::cout << "  saddle frequency " << r.saddle_frequency << " (Wilson 95% ["
            << r.saddle_interval.lower << ", " << r.saddle_interval.upper
            << "])\n"
            << "  mean iterations " << r.mean_iterations << ", clip events "
            << r.clip_events << ", errors " << r.errors << "\n";
}

int cmd_run(const std::string& path, const std::string& out_dir, int threads,
            bool override_gate, bool timestamp) {
  const rrm::ExperimentConfig cfg = rrm::load_config(path);
  const rrm::AssumptionReport assumptions = rrm::validate_assumptions(cfg);
  if (!assumptions.schedule_gate && !override_gate) {
    std::cerr << rrm::format_assumptions(assumptions)
              << "refusing to run: the step-size schedule fails the series "
                 "checks (use --override-assumptions)\n";
    return kGateRefused;
  }
  const bool torus = cfg.manifold.type == "torus";
  rrm::RunOptions options;
  options.threads = threads;
  if (torus) options.path_stride = std::max(1L, cfg.method.max_iters / 500);
  rrm::AggregateReport report = rrm::run_experiment(cfg, options);
  report.assumptions = assumptions;

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  rrm::emit_csv(report, (dir / "trials.csv").string(), timestamp);
  rrm::emit_summary_json(report, (dir / "summary.json").string());
  if (report.apt) rrm::emit_apt_csv(*report.apt, (dir / "apt.csv").string());
  if (torus) {
    const auto m = rrm::build_manifold(cfg.manifold);
    std::vector<std::vector<rrm::Point>> paths;
    for (const auto& t : report.trials) paths.push_back(t.path);
    rrm::emit_svg(dynamic_cast<const rrm::Torus&>(*m), paths, report.catalog,
                  (dir / "trajectories.svg").string());
  }
  print_summary(report);
  return 0;
}

int cmd_validate(const std::string& path) {
  const rrm::ExperimentConfig cfg = rrm::load_config(path);
  std::cout << rrm::format_assumptions(rrm::validate_assumptions(cfg));
  return 0;
}

int cmd_apt(const std::string& path, const std::string& out_dir) {
  rrm::ExperimentConfig cfg = rrm::load_config(path);
  const rrm::AptReport report = rrm::run_apt(cfg);
  const std::string csv = rrm::format_apt_csv(report);
  if (out_dir.empty()) {
    std::cout << csv;
  } else {
    std::filesystem::create_directories(out_dir);
    rrm::emit_apt_csv(report, (std::filesystem::path(out_dir) / "apt.csv").string());
    std::cout << csv;
  }
  return 0;
}

int cmd_classify(const std::string& path) {
  const rrm::ExperimentConfig cfg = rrm::load_config(path);
  const auto m = rrm::build_manifold(cfg.manifold);
  const auto f = rrm::build_objective(cfg.objective);
  std::cout << rrm::format_catalog_json(rrm::experiment_catalog(*m, *f));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian Robbins-Monro experiments"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir = "rrm_out";
  int threads = 1;
  bool override_gate = false;
  bool no_timestamp = false;

  auto* run = app.add_subcommand("run", "run a multi-trial experiment");
  run->add_option("config", config, "experiment JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--override-assumptions", override_gate,
                "run even when the schedule fails the series checks");
  run->add_flag("--no-timestamp", no_timestamp, "omit the timestamp line in trials.csv");

  auto* validate = app.add_subcommand("validate", "assumption diagnostics");
  validate->add_option("config", config, "experiment JSON")->required()->check(CLI::ExistingFile);

  std::string apt_out;
  auto* apt = app.add_subcommand("apt", "APT deviations of one long trajectory");
  apt->add_option("config", config, "experiment JSON")->required()->check(CLI::ExistingFile);
  apt->add_option("--out", apt_out, "directory for apt.csv");

  auto* classify = app.add_subcommand("classify", "critical-point catalog");
  classify->add_option("config", config, "experiment JSON")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) return cmd_run(config, out_dir, threads, override_gate, !no_timestamp);
    if (*validate) return cmd_validate(config);
    if (*apt) return cmd_apt(config, apt_out);
    if (*classify) return cmd_classify(config);
  } catch (const rrm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
