#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rrm/harness.h"
#include "rrm/sphere.h"
#include "rrm/torus.h"

namespace rrm {

namespace {

using json = nlohmann::json;

// Object reader that remembers which keys were consumed, so leftovers can be
// reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string at(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  Section child(const std::string& key) { return Section(raw(key), at(key)); }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(at(key), "expected a number");
    return v.get<double>();
  }

  double required_number(const std::string& key) {
    if (!has(key)) throw ConfigError(at(key), "missing required field");
    return number(key, 0.0);
  }

  long integer(const std::string& key, long fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(at(key), "expected an integer");
    return v.get<long>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(at(key), "expected a boolean");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(at(key), "expected a string");
    return v.get<std::string>();
  }

  std::string required_text(const std::string& key) {
    if (!has(key)) throw ConfigError(at(key), "missing required field");
    return text(key, "");
  }

  Vec vector(const std::string& key) {
    if (!has(key)) throw ConfigError(at(key), "missing required field");
    return to_vec(raw(key), at(key));
  }

  static Vec to_vec(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) {
      throw ConfigError(path, "expected a non-empty array of numbers");
    }
    Vec out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        throw ConfigError(path + "[" + std::to_string(i) + "]", "expected a number");
      }
      out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    }
    return out;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(at(item.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

ManifoldSpec parse_manifold(Section s) {
  ManifoldSpec spec;
  spec.type = s.required_text("type");
  if (spec.type == "sphere") {
    spec.dim = static_cast<int>(s.integer("dim", 3));
    if (spec.dim < 2) throw ConfigError(s.at("dim"), "sphere dim must be >= 2");
  } else if (spec.type == "torus") {
    spec.major_radius = s.number("R", 2.0);
    spec.minor_radius = s.number("r", 1.0);
    if (!(spec.minor_radius > 0.0 && spec.major_radius > spec.minor_radius)) {
      throw ConfigError(s.at("r"), "torus radii must satisfy R > r > 0");
    }
  } else if (spec.type == "hessian") {
    const std::string kind = s.required_text("legendre");
    if (kind == "entropy") {
      spec.legendre = LegendreKind::NegativeEntropy;
    } else if (kind == "log_barrier") {
      spec.legendre = LegendreKind::LogBarrier;
    } else if (kind == "euclidean") {
      spec.legendre = LegendreKind::Euclidean;
    } else {
      throw ConfigError(s.at("legendre"),
                        "expected entropy, log_barrier or euclidean");
    }
    spec.dim = static_cast<int>(s.integer("dim", 3));
    const int min_dim = spec.legendre == LegendreKind::NegativeEntropy ? 2 : 1;
    if (spec.dim < min_dim) throw ConfigError(s.at("dim"), "dimension too small");
  } else {
    throw ConfigError(s.at("type"), "expected sphere, torus or hessian");
  }
  s.finish();
  return spec;
}

ObjectiveSpec parse_objective(Section s) {
  ObjectiveSpec spec;
  spec.type = s.required_text("type");
  if (spec.type == "rayleigh") {
    spec.diag = s.vector("diag");
  } else if (spec.type == "torus_height") {
  } else if (spec.type == "linear") {
    spec.linear = s.vector("c");
  } else if (spec.type == "quadratic") {
    const json& rows = s.raw("A");
    const std::string path = s.at("A");
    if (!rows.is_array() || rows.empty()) {
      throw ConfigError(path, "expected a square matrix as an array of rows");
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    spec.matrix.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::string row_path = path + "[" + std::to_string(i) + "]";
      const Vec row = Section::to_vec(rows[static_cast<std::size_t>(i)], row_path);
      if (row.size() != n) throw ConfigError(row_path, "matrix must be square");
      spec.matrix.row(i) = row.transpose();
    }
    if ((spec.matrix - spec.matrix.transpose()).lpNorm<Eigen::Infinity>() > 1e-12) {
      throw ConfigError(path, "matrix must be symmetric");
    }
    spec.linear = s.has("b") ? s.vector("b") : Vec::Zero(n);
    if (spec.linear.size() != n) throw ConfigError(s.at("b"), "size must match A");
    spec.constant = s.number("c", 0.0);
  } else if (spec.type == "constant") {
    spec.constant = s.number("value", 0.0);
    spec.dim = static_cast<int>(s.integer("dim", 3));
  } else if (spec.type == "finite_sum") {
    const json& comps = s.raw("components");
    const std::string path = s.at("components");
    if (!comps.is_array() || comps.empty()) {
      throw ConfigError(path, "expected a non-empty array of objectives");
    }
    for (std::size_t i = 0; i < comps.size(); ++i) {
      const std::string p = path + "[" + std::to_string(i) + "]";
      spec.components.push_back(parse_objective(Section(comps[i], p)));
      if (spec.components.back().type == "finite_sum") {
        throw ConfigError(p, "finite sums cannot nest");
      }
    }
  } else {
    throw ConfigError(s.at("type"),
                      "expected rayleigh, torus_height, linear, quadratic, "
                      "constant or finite_sum");
  }
  s.finish();
  return spec;
}

// Coordinate dimension the objective expects; -1 when it adapts.
long objective_dim(const ObjectiveSpec& spec) {
  if (spec.type == "rayleigh") return spec.diag.size();
  if (spec.type == "linear" || spec.type == "quadratic") return spec.linear.size();
  if (spec.type == "constant") return spec.dim;
  if (spec.type == "torus_height") return 3;
  long dim = -1;
  for (const auto& c : spec.components) {
    const long d = objective_dim(c);
    if (dim >= 0 && d >= 0 && d != dim) return -2;
    if (d >= 0) dim = d;
  }
  return dim;
}

MethodKind parse_method_kind(const std::string& name, const std::string& path) {
  static const std::pair<const char*, MethodKind> kinds[] = {
      {"RSGD", MethodKind::RSGD}, {"ReSGD", MethodKind::ReSGD},
      {"SMD", MethodKind::SMD},   {"ROG", MethodKind::ROG},
      {"NGD", MethodKind::NGD},   {"RPPM", MethodKind::RPPM},
      {"RSEG", MethodKind::RSEG}};
  for (const auto& [n, k] : kinds) {
    if (name == n) return k;
  }
  throw ConfigError(path, "unknown method '" + name + "'");
}

RetractionKind parse_retraction(const std::string& name, const std::string& path) {
  if (name == "exponential") return RetractionKind::Exponential;
  if (name == "projection") return RetractionKind::Projection;
  if (name == "prox") return RetractionKind::Prox;
  throw ConfigError(path, "expected exponential, projection or prox");
}

StepSchedule parse_schedule(Section s) {
  const std::string type = s.required_text("type");
  const double c = s.required_number("c");
  const long start = s.integer("start_index", 1);
  StepSchedule out;
  if (type == "power") {
    out = power_schedule(c, s.required_number("p"), start);
  } else if (type == "log_power") {
    out = log_power_schedule(c, s.required_number("eps"), start);
  } else if (type == "constant") {
    out = constant_schedule(c, start);
  } else {
    throw ConfigError(s.at("type"), "expected power, log_power or constant");
  }
  try {
    validate(out);
  } catch (const ContractViolation& e) {
    throw ConfigError(s.at("type"), e.what());
  }
  s.finish();
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  Section s(root, "");
  ExperimentConfig cfg;

  if (!s.has("manifold")) throw ConfigError("manifold", "missing required field");
  cfg.manifold = parse_manifold(s.child("manifold"));
  if (!s.has("objective")) throw ConfigError("objective", "missing required field");
  cfg.objective = parse_objective(s.child("objective"));

  if (!s.has("method")) throw ConfigError("method", "missing required field");
  {
    Section m = s.child("method");
    cfg.method.method = parse_method_kind(m.required_text("name"), m.at("name"));
    if (m.has("retraction")) {
      cfg.method.retraction =
          parse_retraction(m.text("retraction", ""), m.at("retraction"));
    }
    cfg.method.inner_iters = static_cast<int>(m.integer("inner_iters", 50));
    cfg.method.inner_tol = m.number("inner_tol", 1e-10);
    cfg.method.max_iters = m.integer("max_iters", 1000);
    if (cfg.method.max_iters < 0) {
      throw ConfigError(m.at("max_iters"), "must be >= 0");
    }
    if (cfg.method.inner_iters < 1) {
      throw ConfigError(m.at("inner_iters"), "must be >= 1");
    }
    if (!(cfg.method.inner_tol > 0.0)) {
      throw ConfigError(m.at("inner_tol"), "must be > 0");
    }
    m.finish();
  }

  if (!s.has("schedule")) throw ConfigError("schedule", "missing required field");
  cfg.method.schedule = parse_schedule(s.child("schedule"));

  if (s.has("noise")) {
    Section n = s.child("noise");
    cfg.noise.type = n.required_text("type");
    if (cfg.noise.type == "uniform_sphere" || cfg.noise.type == "rademacher") {
      cfg.noise.sigma = n.required_number("sigma");
      if (!(cfg.noise.sigma >= 0.0)) throw ConfigError(n.at("sigma"), "must be >= 0");
    } else if (cfg.noise.type == "minibatch") {
      cfg.noise.batch_size = static_cast<int>(n.integer("batch_size", 1));
      if (cfg.noise.batch_size < 1) {
        throw ConfigError(n.at("batch_size"), "must be >= 1");
      }
      if (cfg.objective.type != "finite_sum") {
        throw ConfigError(n.at("type"), "minibatch noise needs a finite_sum objective");
      }
    } else {
      throw ConfigError(n.at("type"),
                        "expected uniform_sphere, rademacher or minibatch");
    }
    n.finish();
  }

  cfg.trials = s.integer("trials", 1);
  if (cfg.trials < 1) throw ConfigError("trials", "must be >= 1");
  if (s.has("master_seed")) {
    const json& seed = s.raw("master_seed");
    if (!seed.is_number_integer() ||
        (seed.is_number_integer() && !seed.is_number_unsigned() &&
         seed.get<long long>() < 0)) {
      throw ConfigError("master_seed", "expected a non-negative 64-bit integer");
    }
    cfg.master_seed = seed.get<std::uint64_t>();
  }

  if (s.has("init")) {
    Section i = s.child("init");
    if (i.has("near")) {
      const json& near = i.raw("near");
      if (near.is_string()) {
        cfg.init.near = near.get<std::string>();
      } else {
        cfg.init.coords = Section::to_vec(near, i.at("near"));
      }
    }
    cfg.init.radius = i.number("radius", 1e-3);
    if (!(cfg.init.radius >= 0.0)) throw ConfigError(i.at("radius"), "must be >= 0");
    i.finish();
  }

  if (s.has("classification")) {
    Section c = s.child("classification");
    cfg.classification.r_min = c.number("r_min", 1e-2);
    cfg.classification.r_saddle = c.number("r_saddle", 1e-2);
    cfg.classification.grad_tol = c.number("grad_tol", 1e-1);
    if (!(cfg.classification.r_min > 0.0)) throw ConfigError(c.at("r_min"), "must be > 0");
    if (!(cfg.classification.r_saddle > 0.0)) {
      throw ConfigError(c.at("r_saddle"), "must be > 0");
    }
    if (!(cfg.classification.grad_tol > 0.0)) {
      throw ConfigError(c.at("grad_tol"), "must be > 0");
    }
    c.finish();
  }

  if (s.has("apt")) {
    Section a = s.child("apt");
    cfg.apt.enabled = a.boolean("enabled", true);
    cfg.apt.window = a.number("window", 1.0);
    cfg.apt.probe_base = a.integer("probe_base", 100);
    cfg.apt.probe_count = static_cast<int>(a.integer("probe_count", 7));
    cfg.apt.probe_grid = static_cast<int>(a.integer("probe_grid", 64));
    if (!(cfg.apt.window > 0.0)) throw ConfigError(a.at("window"), "must be > 0");
    if (cfg.apt.probe_base < 1) throw ConfigError(a.at("probe_base"), "must be >= 1");
    if (cfg.apt.probe_count < 1) throw ConfigError(a.at("probe_count"), "must be >= 1");
    if (cfg.apt.probe_grid < 2) throw ConfigError(a.at("probe_grid"), "must be >= 2");
    a.finish();
  }
  s.finish();

  // Cross-checks that need the built geometry.
  const ManifoldPtr m = build_manifold(cfg.manifold);
  cfg.method.noise = build_noise(cfg, 0);
  try {
    validate(cfg.method, *m);
  } catch (const ContractViolation& e) {
    throw ConfigError("method", e.what());
  }
  const long fdim = objective_dim(cfg.objective);
  if (fdim != -1 && fdim != m->coord_dim()) {
    throw ConfigError("objective", "dimension does not match the manifold's " +
                                       std::to_string(m->coord_dim()) +
                                       " coordinates");
  }
  if (cfg.objective.type == "torus_height" && cfg.manifold.type != "torus") {
    throw ConfigError("objective.type", "torus_height needs a torus manifold");
  }
  if (cfg.init.coords && cfg.init.coords->size() != m->coord_dim()) {
    throw ConfigError("init.near", "coordinate count does not match the manifold");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

ManifoldPtr build_manifold(const ManifoldSpec& spec) {
  if (spec.type == "sphere") return std::make_shared<Sphere>(spec.dim);
  if (spec.type == "torus") {
    return std::make_shared<Torus>(spec.major_radius, spec.minor_radius);
  }
  if (spec.type == "hessian") {
    return std::make_shared<HessianDomain>(spec.legendre, spec.dim);
  }
  throw ConfigError("manifold.type", "unknown manifold '" + spec.type + "'");
}

ObjectivePtr build_objective(const ObjectiveSpec& spec) {
  if (spec.type == "rayleigh") return make_rayleigh(spec.diag);
  if (spec.type == "torus_height") return make_torus_height();
  if (spec.type == "linear") return make_linear(spec.linear);
  if (spec.type == "quadratic") {
    return std::make_shared<QuadraticObjective>(spec.matrix, spec.linear,
                                                spec.constant, "quadratic");
  }
  if (spec.type == "constant") {
    return make_constant(spec.dim, spec.constant);
  }
  if (spec.type == "finite_sum") {
    std::vector<ObjectivePtr> parts;
    for (const auto& c : spec.components) parts.push_back(build_objective(c));
    return std::make_shared<FiniteSumObjective>(std::move(parts));
  }
  throw ConfigError("objective.type", "unknown objective '" + spec.type + "'");
}

NoiseModel build_noise(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.noise.type == "rademacher") return rademacher_noise(cfg.noise.sigma, seed);
  if (cfg.noise.type == "minibatch") {
    FiniteSumMinibatch mb;
    for (const auto& c : cfg.objective.components) {
      mb.components.push_back(build_objective(c));
    }
    mb.batch_size = cfg.noise.batch_size;
    return NoiseModel{std::move(mb), seed};
  }
  return uniform_sphere_noise(cfg.noise.sigma, seed);
}

std::uint64_t trial_seed(std::uint64_t master_seed, long trial) {
  return RngStream(master_seed).split(static_cast<std::uint64_t>(trial)).key();
}

}  // namespace rrm
