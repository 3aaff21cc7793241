#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "rrm/harness.h"
#include "rrm/torus.h"

namespace rrm {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw Error("write to " + path + " failed");
}

std::string utc_now() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json catalog_json(const CriticalCatalog& catalog) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& cp : catalog.points) {
    pts.push_back({{"label", cp.label},
                   {"classification", to_string(cp.classification)},
                   {"location", std::vector<double>(cp.location.coords.data(),
                                                    cp.location.coords.data() +
                                                        cp.location.coords.size())},
                   {"spectrum", cp.spectrum}});
  }
  return {{"manifold", catalog.manifold_id},
          {"objective", catalog.objective_id},
          {"points", pts}};
}

nlohmann::json assumptions_json(const AssumptionReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"assumption", c.assumption},
                      {"status", to_string(c.status)},
                      {"detail", c.detail},
                      {"values", c.values}});
  }
  return {{"schedule_gate", report.schedule_gate}, {"checks", checks}};
}

nlohmann::json apt_json(const AptReport& r) {
  return {{"window", r.window},
          {"probe_indices", r.probe_indices},
          {"probe_times", r.probe_times},
          {"deviations", r.deviations}};
}

}  // namespace

std::string format_csv(const AggregateReport& report, bool timestamp) {
  std::ostringstream os;
  if (timestamp) os << "# generated " << utc_now() << "\n";
  os << "trial,seed,verdict";
  for (int i = 0; i < report.coord_dim; ++i) os << ",x" << i;
  for (const auto& cp : report.catalog.points) {
    os << "," << csv_field("dist_" + cp.label);
  }
  os << ",clip_events,iters\n";
  for (const auto& t : report.trials) {
    os << t.trial << "," << t.seed << "," << csv_field(to_string(t.verdict));
    for (Eigen::Index i = 0; i < t.terminal.coords.size(); ++i) {
      os << "," << num(t.terminal.coords(i));
    }
    for (double d : t.distances) os << "," << num(d);
    os << "," << t.clip_events << "," << t.iterations << "\n";
  }
  return os.str();
}

void emit_csv(const AggregateReport& report, const std::string& path,
              bool timestamp) {
  write_file(path, format_csv(report, timestamp));
}

std::string format_summary_json(const AggregateReport& report) {
  const long n = static_cast<long>(report.trials.size());
  nlohmann::json j;
  j["manifold"] = report.manifold_id;
  j["objective"] = report.objective_id;
  j["method"] = report.method_id;
  j["schedule"] = report.schedule_id;
  j["trials"] = n;
  j["counts"] = {{"ConvergedToMin", report.converged_to_min},
                 {"ConvergedToSaddle", report.converged_to_saddle},
                 {"NonConverged", report.non_converged}};
  j["per_verdict"] = report.per_label;
  j["saddle_frequency"] = report.saddle_frequency;
  j["saddle_frequency_wilson95"] = {report.saddle_interval.lower,
                                    report.saddle_interval.upper};
  j["mean_iterations"] = report.mean_iterations;
  j["clip_events"] = report.clip_events;
  j["errors"] = report.errors;
  j["catalog"] = catalog_json(report.catalog);
  if (report.apt) j["apt"] = apt_json(*report.apt);
  if (report.assumptions) j["assumptions"] = assumptions_json(*report.assumptions);
  return j.dump(2) + "\n";
}

void emit_summary_json(const AggregateReport& report, const std::string& path) {
  write_file(path, format_summary_json(report));
}

std::string format_apt_csv(const AptReport& report) {
  std::ostringstream os;
  os << "probe_index,probe_time,window,deviation\n";
  for (std::size_t i = 0; i < report.deviations.size(); ++i) {
    os << report.probe_indices[i] << "," << num(report.probe_times[i]) << ","
       << num(report.window) << "," << num(report.deviations[i]) << "\n";
  }
  return os.str();
}

void emit_apt_csv(const AptReport& report, const std::string& path) {
  write_file(path, format_apt_csv(report));
}

std::string format_catalog_json(const CriticalCatalog& catalog) {
  return catalog_json(catalog).dump(2) + "\n";
}

std::string format_assumptions(const AssumptionReport& report) {
  std::ostringstream os;
  for (const auto& c : report.checks) {
    os << c.assumption << " " << to_string(c.status) << "  " << c.detail << "\n";
  }
  os << "schedule gate: " << (report.schedule_gate ? "open" : "closed") << "\n";
  return os.str();
}

std::string format_svg(const Torus& torus,
                       const std::vector<std::vector<Point>>& trajectories,
                       const CriticalCatalog& catalog) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  constexpr double size = 600.0;
  constexpr double margin = 20.0;
  auto wrap = [&](double a) {
    a = std::fmod(a, two_pi);
    return a < 0.0 ? a + two_pi : a;
  };
  auto screen = [&](const Vec& p) {
    const TorusAngles a = torus.angles(p);
    return std::pair<double, double>{margin + size * wrap(a.theta) / two_pi,
                                     margin + size * wrap(a.phi) / two_pi};
  };
  static const char* palette[] = {"#1f77b4", "#2ca02c", "#9467bd", "#8c564b",
                                  "#e377c2", "#17becf", "#bcbd22", "#ff7f0e"};

  std::ostringstream os;
  const double full = size + 2.0 * margin;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << full
     << "\" height=\"" << full << "\" viewBox=\"0 0 " << full << " " << full
     << "\">\n";
  os << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << size
     << "\" height=\"" << size << "\" fill=\"white\" stroke=\"#888\"/>\n";
  for (std::size_t t = 0; t < trajectories.size(); ++t) {
    const auto& path = trajectories[t];
    os << "<g class=\"trajectory\" id=\"trajectory-" << t << "\" stroke=\""
       << palette[t % 8] << "\" fill=\"none\" stroke-width=\"1\">\n";
    std::vector<std::vector<std::pair<double, double>>> pieces(1);
    double prev_theta = 0.0;
    double prev_phi = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i) {
      const TorusAngles a = torus.angles(path[i].coords);
      const double theta = wrap(a.theta);
      const double phi = wrap(a.phi);
      if (i > 0 && (std::abs(theta - prev_theta) > std::numbers::pi ||
                    std::abs(phi - prev_phi) > std::numbers::pi)) {
        pieces.emplace_back();
      }
      pieces.back().push_back(screen(path[i].coords));
      prev_theta = theta;
      prev_phi = phi;
    }
    for (const auto& piece : pieces) {
      if (piece.empty()) continue;
      os << "<polyline points=\"";
      for (std::size_t i = 0; i < piece.size(); ++i) {
        if (i) os << " ";
        os << num(piece[i].first) << "," << num(piece[i].second);
      }
      os << "\"/>\n";
    }
    os << "</g>\n";
  }
  for (const auto& cp : catalog.points) {
    const char* colour = nullptr;
    if (cp.classification == CriticalKind::StrictSaddle) colour = "black";
    if (cp.classification == CriticalKind::LocalMin) colour = "red";
    if (colour == nullptr) continue;
    const auto [x, y] = screen(cp.location.coords);
    os << "<circle class=\"critical\" cx=\"" << num(x) << "\" cy=\"" << num(y)
       << "\" r=\"5\" fill=\"" << colour << "\"><title>" << cp.label
       << "</title></circle>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void emit_svg(const Torus& torus,
              const std::vector<std::vector<Point>>& trajectories,
              const CriticalCatalog& catalog, const std::string& path) {
  write_file(path, format_svg(torus, trajectories, catalog));
}

}  // namespace rrm
