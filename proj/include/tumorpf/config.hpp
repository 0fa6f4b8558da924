#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tumorpf/scenario.hpp"

namespace tumorpf {

// Optional [converge] table; CLI flags take precedence.
struct ConvergeSettings {
  int levels = 4;
  std::optional<double> base_tau;
  std::vector<int> Ns{32, 64, 128};
  std::optional<double> tau;
  std::string probe_field = "phi_T";
  std::optional<double> probe_time;  // defaults to the scenario's T_final
};

struct RunConfig {
  Scenario scenario;
  ConvergeSettings converge;
};

/// Parses a scenario file. Layout:
///
///   name = "baseline2d"
///   preset = "baseline"        # parameter preset, then [params] overrides
///   dim = 2
///   N = 128
///   T_final = 10.0
///   tau = 1e-3
///   scheme = "etdrk2"
///   nutrient_right_edge_source = false
///   snapshot_times = [0.0, 8.0, 9.0, 10.0]
///   snapshot_fields = ["phi_T", "phi_N", "phi_V"]
///   on_violation = "abort"     # or "record"
///   [initial]  tumor, ecm, ecm_high_on_left, ecm_value, nutrient
///   [params]   any ModelParams key
///   [converge] levels, base_tau, Ns, tau, probe_field, probe_time
///   [debug]    inject_step, inject_psi_sigma
///
/// `overrides` are "key=value" strings applied on top of the file; keys are
/// dotted paths ("params.chi_H", "initial.ecm") or bare top-level keys, and a
/// bare model parameter name ("chi_H") is routed into [params]. Every error is
/// a ConfigError naming the offending key.
RunConfig parse_config(std::string_view toml_text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Fully resolved config (all parameters explicit) that parses back to the same RunConfig.
std::string effective_config_toml(const RunConfig& cfg);

}  // namespace tumorpf
