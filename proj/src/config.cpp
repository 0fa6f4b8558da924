#include "tumorpf/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <toml.hpp>

#include "tumorpf/errors.hpp"
#include "tumorpf/snapshot_io.hpp"

namespace tumorpf {

namespace {

double as_number(const toml::node& n, const std::string& key) {
  if (auto v = n.as_floating_point()) return v->get();
  if (auto v = n.as_integer()) return static_cast<double>(v->get());
  throw ConfigError(fmt::format("'{}' must be a number", key));
}

int as_int(const toml::node& n, const std::string& key) {
  if (auto v = n.as_integer()) return static_cast<int>(v->get());
  throw ConfigError(fmt::format("'{}' must be an integer", key));
}

bool as_bool(const toml::node& n, const std::string& key) {
  if (auto v = n.as_boolean()) return v->get();
  throw ConfigError(fmt::format("'{}' must be true or false", key));
}

std::string as_string(const toml::node& n, const std::string& key) {
  if (auto v = n.as_string()) return v->get();
  throw ConfigError(fmt::format("'{}' must be a string", key));
}

const toml::array& as_array(const toml::node& n, const std::string& key) {
  if (auto a = n.as_array()) return *a;
  throw ConfigError(fmt::format("'{}' must be an array", key));
}

const toml::table& as_table(const toml::node& n, const std::string& key) {
  if (auto t = n.as_table()) return *t;
  throw ConfigError(fmt::format("'{}' must be a table", key));
}

std::vector<double> number_list(const toml::node& n, const std::string& key) {
  std::vector<double> out;
  for (const auto& e : as_array(n, key)) out.push_back(as_number(e, key));
  return out;
}

std::vector<int> int_list(const toml::node& n, const std::string& key) {
  std::vector<int> out;
  for (const auto& e : as_array(n, key)) out.push_back(as_int(e, key));
  return out;
}

std::vector<std::string> string_list(const toml::node& n, const std::string& key) {
  std::vector<std::string> out;
  for (const auto& e : as_array(n, key)) out.push_back(as_string(e, key));
  return out;
}

bool is_model_key(std::string_view key) {
  if (key == "kappa_sigma" || key == "kappa_M" || key == "D_sigma") return true;
  const auto& keys = ModelParams::keys();
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

const std::vector<std::string_view> kTopLevel{"name",
                                              "preset",
                                              "dim",
                                              "N",
                                              "T_final",
                                              "tau",
                                              "scheme",
                                              "nutrient_right_edge_source",
                                              "snapshot_times",
                                              "snapshot_fields",
                                              "on_violation",
                                              "initial",
                                              "params",
                                              "converge",
                                              "debug"};

std::vector<std::string> split_path(const std::string& key) {
  std::vector<std::string> parts;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  return parts;
}

void apply_override(toml::table& root, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(fmt::format("override '{}' must have the form key=value", spec));
  }
  std::string key = spec.substr(0, eq);
  const std::string text = spec.substr(eq + 1);
  std::vector<std::string> path = split_path(key);
  if (path.size() == 1 && std::find(kTopLevel.begin(), kTopLevel.end(), path[0]) == kTopLevel.end()) {
    if (!is_model_key(path[0])) throw ConfigError(fmt::format("unknown key '{}'", key));
    path.insert(path.begin(), "params");
  }

  toml::table parsed;
  try {
    parsed = toml::parse("v = " + text);
  } catch (const toml::parse_error&) {
    parsed.insert_or_assign("v", text);  // bare word, e.g. scheme=etd1
  }

  toml::table* t = &root;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    toml::node* child = t->get(path[i]);
    if (!child) {
      t->insert_or_assign(path[i], toml::table{});
      child = t->get(path[i]);
    }
    if (!child->is_table()) throw ConfigError(fmt::format("'{}' is not a table", path[i]));
    t = child->as_table();
  }
  t->insert_or_assign(path.back(), *parsed.get("v"));
}

void read_params(const toml::table& tbl, ModelParams& p) {
  for (auto&& [k, v] : tbl) {
    const std::string key = std::string(k.str());
    const std::string full = "params." + key;
    if (key == "theta0_max" || key == "phi_sigma0_max") {
      throw ConfigError(fmt::format("'{}' is derived from the initial fields and cannot be set", full));
    }
    if (!is_model_key(key)) throw ConfigError(fmt::format("unknown key '{}'", full));
    p.set(key, as_number(v, full));
  }
}

RunConfig from_table(const toml::table& root) {
  RunConfig cfg;
  Scenario& sc = cfg.scenario;

  for (auto&& [k, v] : root) {
    const std::string_view key = k.str();
    if (std::find(kTopLevel.begin(), kTopLevel.end(), key) == kTopLevel.end()) {
      throw ConfigError(fmt::format("unknown key '{}'", key));
    }
  }

  if (auto n = root.get("name")) sc.name = as_string(*n, "name");
  if (auto n = root.get("preset")) sc.preset = as_string(*n, "preset");
  try {
    sc.params = preset(sc.preset);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("'preset': {}", e.what()));
  }
  if (auto n = root.get("params")) read_params(as_table(*n, "params"), sc.params);

  int dim = 2;
  int cells = 128;
  if (auto n = root.get("dim")) dim = as_int(*n, "dim");
  if (auto n = root.get("N")) cells = as_int(*n, "N");
  if (dim != 2 && dim != 3) throw ConfigError(fmt::format("'dim' must be 2 or 3, got {}", dim));
  if (cells < 4) throw ConfigError(fmt::format("'N' must be >= 4, got {}", cells));
  sc.grid = GridSpec(dim, cells);
  if (dim == 3) sc.tumor = TumorInit::two_tumors_3d;

  if (auto n = root.get("T_final")) sc.T_final = as_number(*n, "T_final");
  if (auto n = root.get("tau")) sc.step.tau = as_number(*n, "tau");
  if (auto n = root.get("scheme")) {
    try {
      sc.step.scheme = parse_scheme(as_string(*n, "scheme"));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("'scheme': {}", e.what()));
    }
  }
  if (auto n = root.get("nutrient_right_edge_source")) {
    sc.step.nutrient_right_edge_source = as_bool(*n, "nutrient_right_edge_source");
  }
  if (auto n = root.get("snapshot_times")) sc.snapshot_times = number_list(*n, "snapshot_times");
  if (auto n = root.get("snapshot_fields")) sc.snapshot_fields = string_list(*n, "snapshot_fields");
  if (auto n = root.get("on_violation")) sc.on_violation = parse_violation_policy(as_string(*n, "on_violation"));

  if (auto n = root.get("initial")) {
    for (auto&& [k, v] : as_table(*n, "initial")) {
      const std::string key = "initial." + std::string(k.str());
      const std::string_view name = k.str();
      if (name == "tumor") {
        sc.tumor = parse_tumor_init(as_string(v, key));
      } else if (name == "ecm") {
        sc.ecm = parse_ecm_init(as_string(v, key));
      } else if (name == "ecm_high_on_left") {
        sc.ecm_high_on_left = as_bool(v, key);
      } else if (name == "ecm_value") {
        sc.ecm_uniform_value = as_number(v, key);
      } else if (name == "nutrient") {
        sc.nutrient_initial = as_number(v, key);
      } else {
        throw ConfigError(fmt::format("unknown key '{}'", key));
      }
    }
  }

  if (auto n = root.get("converge")) {
    ConvergeSettings& c = cfg.converge;
    for (auto&& [k, v] : as_table(*n, "converge")) {
      const std::string key = "converge." + std::string(k.str());
      const std::string_view name = k.str();
      if (name == "levels") {
        c.levels = as_int(v, key);
      } else if (name == "base_tau") {
        c.base_tau = as_number(v, key);
      } else if (name == "Ns") {
        c.Ns = int_list(v, key);
      } else if (name == "tau") {
        c.tau = as_number(v, key);
      } else if (name == "probe_field") {
        c.probe_field = as_string(v, key);
      } else if (name == "probe_time") {
        c.probe_time = as_number(v, key);
      } else {
        throw ConfigError(fmt::format("unknown key '{}'", key));
      }
    }
  }

  if (auto n = root.get("debug")) {
    FaultInjection inj;
    for (auto&& [k, v] : as_table(*n, "debug")) {
      const std::string key = "debug." + std::string(k.str());
      if (k.str() == "inject_step") {
        const int step = as_int(v, key);
        if (step < 1) throw ConfigError(fmt::format("'{}' must be >= 1", key));
        inj.step = static_cast<std::size_t>(step);
      } else if (k.str() == "inject_psi_sigma") {
        inj.psi_sigma = as_number(v, key);
      } else {
        throw ConfigError(fmt::format("unknown key '{}'", key));
      }
    }
    sc.inject = inj;
  }

  sc.validate();
  return cfg;
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

template <class T, class Fmt>
std::string list(const std::vector<T>& v, Fmt f) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + f(v[i]);
  return out + "]";
}

}  // namespace

RunConfig parse_config(std::string_view toml_text, const std::vector<std::string>& overrides) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    throw ConfigError(fmt::format("config parse error at line {}: {}", e.source().begin.line, e.description()));
  }
  for (const auto& o : overrides) apply_override(root, o);
  return from_table(root);
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("'--config': cannot read '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

std::string effective_config_toml(const RunConfig& cfg) {
  const Scenario& sc = cfg.scenario;
  std::string out;
  out += fmt::format("name = {}\n", quoted(sc.name));
  out += fmt::format("preset = {}\n", quoted(sc.preset));
  out += fmt::format("dim = {}\n", sc.grid.dim());
  out += fmt::format("N = {}\n", sc.grid.cells());
  out += fmt::format("T_final = {}\n", format_double(sc.T_final));
  out += fmt::format("tau = {}\n", format_double(sc.step.tau));
  out += fmt::format("scheme = {}\n", quoted(std::string(to_string(sc.step.scheme))));
  out += fmt::format("nutrient_right_edge_source = {}\n", sc.step.nutrient_right_edge_source);
  out += fmt::format("snapshot_times = {}\n", list(sc.effective_snapshot_times(), format_double));
  out += fmt::format("snapshot_fields = {}\n", list(sc.snapshot_fields, quoted));
  out += fmt::format("on_violation = {}\n", quoted(std::string(to_string(sc.on_violation))));

  out += "\n[initial]\n";
  out += fmt::format("tumor = {}\n", quoted(std::string(to_string(sc.tumor))));
  out += fmt::format("ecm = {}\n", quoted(std::string(to_string(sc.ecm))));
  out += fmt::format("ecm_high_on_left = {}\n", sc.ecm_high_on_left);
  out += fmt::format("ecm_value = {}\n", format_double(sc.ecm_uniform_value));
  out += fmt::format("nutrient = {}\n", format_double(sc.nutrient_initial));

  out += "\n[params]\n";
  for (const auto& key : ModelParams::keys()) {
    if (key == "theta0_max" || key == "phi_sigma0_max") continue;
    out += fmt::format("{} = {}\n", key, format_double(*sc.params.get(key)));
  }
  if (sc.params.kappa_sigma_override) {
    out += fmt::format("kappa_sigma = {}\n", format_double(*sc.params.kappa_sigma_override));
  }
  if (sc.params.kappa_M_override) {
    out += fmt::format("kappa_M = {}\n", format_double(*sc.params.kappa_M_override));
  }

  const ConvergeSettings& c = cfg.converge;
  out += "\n[converge]\n";
  out += fmt::format("levels = {}\n", c.levels);
  if (c.base_tau) out += fmt::format("base_tau = {}\n", format_double(*c.base_tau));
  out += fmt::format("Ns = {}\n", list(c.Ns, [](int n) { return std::to_string(n); }));
  if (c.tau) out += fmt::format("tau = {}\n", format_double(*c.tau));
  out += fmt::format("probe_field = {}\n", quoted(c.probe_field));
  if (c.probe_time) out += fmt::format("probe_time = {}\n", format_double(*c.probe_time));

  if (sc.inject) {
    out += "\n[debug]\n";
    out += fmt::format("inject_step = {}\n", sc.inject->step);
    out += fmt::format("inject_psi_sigma = {}\n", format_double(sc.inject->psi_sigma));
  }
  return out;
}

}  // namespace tumorpf
