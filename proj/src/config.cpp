#include "hamred/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hamred/error.hpp"
#include "json.hpp"

namespace hamred {

namespace {

using json = nlohmann::json;

void only_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key))
      throw ConfigError((where.empty() ? key : where + "." + key) + ": unknown field");
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field + ": expected a number");
  return v.get<double>();
}

Index integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ConfigError(field + ": expected an integer");
  return v.get<Index>();
}

std::string text(const json& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError(field + ": expected a string");
  return v.get<std::string>();
}

bool boolean(const json& v, const std::string& field) {
  if (!v.is_boolean()) throw ConfigError(field + ": expected true or false");
  return v.get<bool>();
}

Vector vec(const json& v, const std::string& field) {
  if (v.is_number()) return Vector::Constant(1, v.get<double>());
  if (!v.is_array() || v.empty()) throw ConfigError(field + ": expected a number or non-empty array");
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    out(static_cast<Index>(i)) = number(v[i], field + "[" + std::to_string(i) + "]");
  return out;
}

template <typename F>
void with(const json& obj, const char* key, F&& f) {
  if (obj.contains(key)) f(obj.at(key));
}

void parse_parameters(const json& p, ExperimentConfig& cfg) {
  only_keys(p, "parameters", {"samples", "grid"});
  if (p.contains("samples") == p.contains("grid"))
    throw ConfigError("parameters: give exactly one of 'samples' or 'grid'");
  cfg.samples.clear();
  if (p.contains("samples")) {
    const json& s = p.at("samples");
    if (!s.is_array() || s.empty()) throw ConfigError("parameters.samples: expected a non-empty array");
    for (std::size_t i = 0; i < s.size(); ++i)
      cfg.samples.push_back(vec(s[i], "parameters.samples[" + std::to_string(i) + "]"));
    return;
  }
  const json& g = p.at("grid");
  only_keys(g, "parameters.grid", {"lower", "upper", "count"});
  for (const char* key : {"lower", "upper", "count"})
    if (!g.contains(key)) throw ConfigError(std::string("parameters.grid.") + key + ": missing");
  const Vector lo = vec(g.at("lower"), "parameters.grid.lower");
  const Vector hi = vec(g.at("upper"), "parameters.grid.upper");
  std::vector<Index> count;
  if (g.at("count").is_array()) {
    for (const auto& c : g.at("count")) count.push_back(integer(c, "parameters.grid.count"));
  } else {
    count.assign(static_cast<std::size_t>(lo.size()), integer(g.at("count"), "parameters.grid.count"));
  }
  if (hi.size() != lo.size() || static_cast<Index>(count.size()) != lo.size())
    throw ConfigError("parameters.grid: lower, upper and count differ in dimension");
  for (Index c : count)
    if (c < 1) throw ConfigError("parameters.grid.count: must be at least 1");
  // Tensor grid, first coordinate varying slowest.
  std::vector<Index> idx(count.size(), 0);
  while (true) {
    Vector mu(lo.size());
    for (Index d = 0; d < lo.size(); ++d) {
      const Index c = count[static_cast<std::size_t>(d)];
      const Index i = idx[static_cast<std::size_t>(d)];
      mu(d) = c == 1 ? lo(d) : lo(d) + (hi(d) - lo(d)) * static_cast<double>(i) / (c - 1);
    }
    cfg.samples.push_back(mu);
    Index d = lo.size() - 1;
    while (d >= 0 && ++idx[static_cast<std::size_t>(d)] == count[static_cast<std::size_t>(d)]) {
      idx[static_cast<std::size_t>(d)] = 0;
      --d;
    }
    if (d < 0) break;
  }
}

void parse_time(const json& t, ExperimentConfig& cfg, double mu_max) {
  only_keys(t, "time", {"t0", "t_end", "dt", "save_every"});
  with(t, "t0", [&](const json& v) { cfg.grid.t0 = number(v, "time.t0"); });
  with(t, "t_end", [&](const json& v) { cfg.grid.t_end = number(v, "time.t_end"); });
  with(t, "save_every", [&](const json& v) { cfg.grid.save_every = integer(v, "time.save_every"); });
  if (t.contains("dt")) {
    cfg.grid.dt = number(t.at("dt"), "time.dt");
  } else {
    // CFL-like default dt <= 0.5 dx / mu_max, shrunk to divide the interval.
    const double span = cfg.grid.t_end - cfg.grid.t0;
    const double dt_max = 0.5 / (static_cast<double>(cfg.wave.n) * std::max(mu_max, 1e-12));
    const double steps = std::max(1.0, std::ceil(span / dt_max - 1e-9));
    cfg.grid.dt = span > 0 ? span / steps : dt_max;
  }
  cfg.grid.steps();  // validates
}

}  // namespace

std::shared_ptr<const HamiltonianModel> ExperimentConfig::build() const {
  const auto model = build_model(model_name, wave);
  for (const Vector& mu : samples)
    if (mu.size() != model->param_dim())
      throw ConfigError("parameters: samples have dimension " + std::to_string(mu.size()) +
                        ", model " + model_name + " expects " +
                        std::to_string(model->param_dim()));
  return model;
}

std::string ExperimentConfig::output_path(const std::string& file) const {
  return (std::filesystem::path(output_dir) / file).string();
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  only_keys(root, "", {"version", "seed", "model", "parameters", "time", "integrator", "basis",
                       "greedy", "rom", "compare", "dlr", "output_dir"});
  if (!root.contains("version")) throw ConfigError("version: missing");
  if (integer(root.at("version"), "version") != kConfigVersion)
    throw ConfigError("version: unsupported config version (expected 1)");

  ExperimentConfig cfg;
  with(root, "seed", [&](const json& v) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw ConfigError("seed: expected a non-negative integer");
    cfg.seed = v.get<std::uint64_t>();
  });
  cfg.wave.seed = cfg.seed;

  if (!root.contains("model")) throw ConfigError("model: missing");
  const json& m = root.at("model");
  only_keys(m, "model", {"name", "n", "width", "h", "damping", "seed"});
  if (!m.contains("name")) throw ConfigError("model.name: missing");
  cfg.model_name = text(m.at("name"), "model.name");
  with(m, "n", [&](const json& v) { cfg.wave.n = integer(v, "model.n"); });
  with(m, "width", [&](const json& v) { cfg.wave.width = number(v, "model.width"); });
  with(m, "h", [&](const json& v) { cfg.wave.h = number(v, "model.h"); });
  with(m, "damping", [&](const json& v) { cfg.wave.damping = number(v, "model.damping"); });
  with(m, "seed", [&](const json& v) { cfg.wave.seed = static_cast<std::uint64_t>(integer(v, "model.seed")); });
  if (cfg.wave.n < 3) throw ConfigError("model.n: must be at least 3");
  static const std::set<std::string> names = {"linear_wave", "nonlinear_wave", "damped_wave",
                                              "noncanonical_wave"};
  if (!names.count(cfg.model_name))
    throw ConfigError("model.name: unknown model '" + cfg.model_name + "'");

  if (root.contains("parameters")) {
    parse_parameters(root.at("parameters"), cfg);
  } else {
    cfg.samples = {Vector::Constant(1, 1.0)};
  }
  double mu_max = 0.0;
  for (const Vector& mu : cfg.samples) mu_max = std::max(mu_max, mu.cwiseAbs().maxCoeff());

  if (root.contains("time")) {
    parse_time(root.at("time"), cfg, mu_max);
  } else {
    parse_time(json::object(), cfg, mu_max);
  }

  with(root, "integrator", [&](const json& v) {
    try {
      cfg.scheme = parse_scheme(text(v, "integrator"));
    } catch (const ConfigError&) {
      throw ConfigError("integrator: expected 'midpoint' or 'stormer_verlet'");
    }
  });

  with(root, "basis", [&](const json& b) {
    only_keys(b, "basis", {"method", "k", "complex_order"});
    with(b, "method", [&](const json& v) { cfg.basis_method = text(v, "basis.method"); });
    with(b, "k", [&](const json& v) { cfg.k = integer(v, "basis.k"); });
    with(b, "complex_order",
         [&](const json& v) { cfg.complex_order = parse_complex_order(text(v, "basis.complex_order")); });
  });
  static const std::set<std::string> methods = {"cotangent", "complexsvd", "svdlike", "greedy",
                                                "pod"};
  if (!methods.count(cfg.basis_method))
    throw ConfigError("basis.method: unknown method '" + cfg.basis_method + "'");
  if (cfg.k < 1 || cfg.k > cfg.wave.n) throw ConfigError("basis.k: must lie in [1, model.n]");

  with(root, "greedy", [&](const json& g) {
    only_keys(g, "greedy", {"indicator", "tol"});
    with(g, "indicator",
         [&](const json& v) { cfg.greedy_indicator = parse_indicator(text(v, "greedy.indicator")); });
    with(g, "tol", [&](const json& v) { cfg.greedy_tol = number(v, "greedy.tol"); });
  });
  if (!(cfg.greedy_tol > 0.0)) throw ConfigError("greedy.tol: must be positive");

  with(root, "rom", [&](const json& r) {
    only_keys(r, "rom", {"parameter", "require_vertical"});
    with(r, "parameter", [&](const json& v) { cfg.rom_parameter = vec(v, "rom.parameter"); });
    with(r, "require_vertical",
         [&](const json& v) { cfg.require_vertical = boolean(v, "rom.require_vertical"); });
  });

  with(root, "compare", [&](const json& c) {
    only_keys(c, "compare", {"methods"});
    with(c, "methods", [&](const json& v) {
      if (!v.is_array() || v.empty()) throw ConfigError("compare.methods: expected a non-empty array");
      cfg.compare_methods.clear();
      for (const auto& e : v) {
        const std::string s = text(e, "compare.methods");
        if (!methods.count(s)) throw ConfigError("compare.methods: unknown method '" + s + "'");
        cfg.compare_methods.push_back(s);
      }
    });
  });

  with(root, "dlr", [&](const json& d) {
    only_keys(d, "dlr", {"k"});
    with(d, "k", [&](const json& v) { cfg.dlr_k = integer(v, "dlr.k"); });
  });
  if (cfg.dlr_k < 1 || cfg.dlr_k > cfg.wave.n) throw ConfigError("dlr.k: must lie in [1, model.n]");

  with(root, "output_dir", [&](const json& v) { cfg.output_dir = text(v, "output_dir"); });
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

}  // namespace hamred
