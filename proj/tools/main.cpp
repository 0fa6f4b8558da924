// tumorpf command-line driver: run | check | converge | perf.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 structure
// (maximum-bound / bound-preservation) violation, 4 non-finite values.

#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "tumorpf/config.hpp"
#include "tumorpf/errors.hpp"
#include "tumorpf/harness.hpp"
#include "tumorpf/snapshot_io.hpp"

namespace fs = std::filesystem;
using namespace tumorpf;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitStructure = 3;
constexpr int kExitNumerical = 4;

struct Common {
  std::string config;
  std::string out = "out";
  std::vector<std::string> sets;
  std::string scheme;
  int jobs = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "Scenario TOML file")->required();
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--set", c.sets, "Override key=value (repeatable)");
  cmd->add_option("--scheme", c.scheme, "etd1 or etdrk2");
  cmd->add_option("--jobs", c.jobs, "Threads (run/check) or concurrent study levels (converge)");
}

RunConfig load(const Common& c) {
  std::vector<std::string> overrides = c.sets;
  if (!c.scheme.empty()) overrides.push_back("scheme=" + c.scheme);
  return load_config(c.config, overrides);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

nlohmann::ordered_json monitor_json(const MonitorRow& r) {
  nlohmann::ordered_json j;
  j["step"] = r.step;
  j["t"] = r.t;
  j["phiT_max"] = r.phiT_max;
  j["phiT_min"] = r.phiT_min;
  j["phiN_max"] = r.phiN_max;
  j["theta_min"] = r.theta_min;
  j["psi_sigma_norm"] = r.psi_sigma_norm;
  j["psi_M_norm"] = r.psi_M_norm;
  j["com_x"] = r.com_x;
  return j;
}

// summary.json holds only deterministic content; wall-clock data goes to timing.json.
void write_summaries(const fs::path& out, const RunReport& rep, const StructureReport& verdict, Scheme scheme) {
  nlohmann::ordered_json s;
  s["scenario"] = rep.scenario;
  s["scheme"] = std::string(to_string(scheme));
  s["steps_taken"] = rep.steps_taken;
  s["completed"] = rep.completed;
  s["verdict"] = verdict.pass ? "pass" : "fail";
  if (verdict.first_failure_step) {
    s["first_failure_step"] = *verdict.first_failure_step;
    s["failure"] = verdict.detail;
  }
  s["kappa_sigma"] = rep.params.kappa_sigma();
  s["kappa_M"] = rep.params.kappa_M();
  s["theta0_max"] = rep.params.theta0_max;
  s["phi_sigma0_max"] = rep.params.phi_sigma0_max;
  double psi_s = 0.0;
  double psi_m = 0.0;
  for (const auto& r : rep.monitors) {
    psi_s = std::max(psi_s, r.psi_sigma_norm);
    psi_m = std::max(psi_m, r.psi_M_norm);
  }
  s["max_psi_sigma_norm"] = psi_s;
  s["max_psi_M_norm"] = psi_m;
  if (!rep.monitors.empty()) s["final"] = monitor_json(rep.monitors.back());
  s["violations"] = nlohmann::ordered_json::array();
  for (const auto& v : rep.violations) {
    s["violations"].push_back({{"step", v.step},
                               {"check", v.violation.check},
                               {"node", v.violation.node},
                               {"value", v.violation.value},
                               {"bound", v.violation.bound}});
  }
  std::vector<std::string> snaps;
  for (const auto& p : rep.snapshots) snaps.push_back(p.filename().string());
  s["snapshots"] = snaps;
  write_text(out / "summary.json", s.dump(2) + "\n");

  nlohmann::ordered_json t;
  t["wall_seconds"] = rep.wall_seconds;
  t["stage_seconds"] = {{"nonlinear", rep.timings.nonlinear},
                        {"spectral", rep.timings.spectral},
                        {"closed_form", rep.timings.closed_form}};
  t["threads"] = omp_get_max_threads();
  write_text(out / "timing.json", t.dump(2) + "\n");
}

int cmd_run(const Common& c, bool check_mode) {
  const RunConfig cfg = load(c);
  if (c.jobs > 0) omp_set_num_threads(c.jobs);
  const fs::path out(c.out);
  fs::create_directories(out);
  write_text(out / "effective_config.toml", effective_config_toml(cfg));

  RunOptions opt;
  opt.out_dir = out;
  const RunReport rep = run(cfg.scenario, opt);
  const StructureReport verdict = structure_monitor_report(rep);
  write_summaries(out, rep, verdict, cfg.scenario.step.scheme);
  if (check_mode) write_structure_csv(out / "structure.csv", verdict);

  if (!verdict.pass) {
    std::cerr << fmt::format("structure violation at step {}: {}\n", *verdict.first_failure_step, verdict.detail);
    return kExitStructure;
  }
  std::cout << fmt::format("{}: {} steps, verdict pass, wall {:.2f} s\n", rep.scenario, rep.steps_taken,
                           rep.wall_seconds);
  return 0;
}

std::vector<int> parse_int_list(const std::string& text, const char* key) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("'{}' must be a comma-separated list of integers, got '{}'", key, text));
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

struct ConvergeArgs {
  std::string mode;
  int levels = 0;
  std::string Ns;
  double tau = 0.0;
  double base_tau = 0.0;
  std::string probe;
  double probe_time = -1.0;
};

int cmd_converge(const Common& c, const ConvergeArgs& a) {
  if (a.mode != "time" && a.mode != "space") {
    throw ConfigError(fmt::format("'mode' must be time or space, got '{}'", a.mode));
  }
  const RunConfig cfg = load(c);
  const fs::path out(c.out);
  fs::create_directories(out);
  write_text(out / "effective_config.toml", effective_config_toml(cfg));

  ProbeSpec probe;
  probe.field = a.probe.empty() ? cfg.converge.probe_field : a.probe;
  if (a.probe_time >= 0.0) {
    probe.t = a.probe_time;
  } else {
    probe.t = cfg.converge.probe_time;
  }
  const int jobs = std::max(1, c.jobs);

  ConvergenceStudy study;
  if (a.mode == "time") {
    const int levels = a.levels > 0 ? a.levels : cfg.converge.levels;
    const double base_tau = a.base_tau > 0.0 ? a.base_tau : cfg.converge.base_tau.value_or(cfg.scenario.step.tau);
    study = temporal_convergence(cfg.scenario, base_tau, levels, probe, jobs);
  } else {
    const std::vector<int> Ns = a.Ns.empty() ? cfg.converge.Ns : parse_int_list(a.Ns, "Ns");
    const double tau = a.tau > 0.0 ? a.tau : cfg.converge.tau.value_or(cfg.scenario.step.tau);
    study = spatial_convergence(cfg.scenario, Ns, tau, probe, jobs);
  }
  write_study_csv(out / "study.csv", study);
  for (const auto& l : study.levels) write_slice_csv(out / fmt::format("slice_level{}.csv", l.level), l);
  for (const auto& l : study.levels) {
    std::cout << fmt::format("level {} ({:.6g}): diff_to_next {} order {}\n", l.level, l.refined_value,
                             l.diff_to_next ? format_double(*l.diff_to_next) : "-",
                             l.observed_order ? format_double(*l.observed_order) : "-");
  }
  return 0;
}

int cmd_perf(int dim, const std::string& Ns, int steps, int batches, const std::string& out_dir) {
  const auto rows = perf_scaling(dim, parse_int_list(Ns, "Ns"), steps, batches);
  const fs::path out(out_dir);
  fs::create_directories(out);
  write_perf_csv(out / fmt::format("perf_{}d.csv", dim), rows);
  for (const auto& r : rows) {
    std::cout << fmt::format("dim {} N {}: {:.3e} s/step", r.dim, r.N, r.median_step_seconds);
    if (r.measured_ratio) std::cout << fmt::format("  ratio {:.2f} (model {:.2f})", *r.measured_ratio, *r.predicted_ratio);
    std::cout << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-field tumour growth simulator (ETD/ETDRK2 with DCT operator exponentials)"};
  app.require_subcommand(1);

  Common run_c, check_c, conv_c;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write snapshots, monitors and a summary");
  add_common(run_cmd, run_c);
  auto* check_cmd = app.add_subcommand("check", "Run a scenario and report the structure-preservation verdict");
  add_common(check_cmd, check_c);

  ConvergeArgs conv_a;
  auto* conv_cmd = app.add_subcommand("converge", "Temporal or spatial self-convergence study");
  conv_cmd->add_option("mode", conv_a.mode, "time or space")->required();
  add_common(conv_cmd, conv_c);
  conv_cmd->add_option("--levels", conv_a.levels, "Number of time-step levels (time mode)");
  conv_cmd->add_option("--base-tau", conv_a.base_tau, "Coarsest time step (time mode)");
  conv_cmd->add_option("--Ns", conv_a.Ns, "Comma-separated resolutions (space mode)");
  conv_cmd->add_option("--tau", conv_a.tau, "Fixed time step (space mode)");
  conv_cmd->add_option("--probe", conv_a.probe, "Probe field");
  conv_cmd->add_option("--probe-time", conv_a.probe_time, "Probe time (default T_final)");

  int perf_dim = 2;
  std::string perf_Ns = "128,256";
  int perf_steps = 10;
  int perf_batches = 5;
  std::string perf_out = "out";
  auto* perf_cmd = app.add_subcommand("perf", "Per-step wall time against resolution");
  perf_cmd->add_option("--dim", perf_dim, "2 or 3");
  perf_cmd->add_option("--Ns", perf_Ns, "Comma-separated resolutions");
  perf_cmd->add_option("--steps", perf_steps, "Steps per batch");
  perf_cmd->add_option("--batches", perf_batches, "Batches (median taken)");
  perf_cmd->add_option("--out", perf_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(run_c, false);
    if (*check_cmd) return cmd_run(check_c, true);
    if (*conv_cmd) return cmd_converge(conv_c, conv_a);
    if (*perf_cmd) return cmd_perf(perf_dim, perf_Ns, perf_steps, perf_batches, perf_out);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const StructureViolation& e) {
    std::cerr << "structure violation at step " << e.step() << ": " << e.what() << '\n';
    return kExitStructure;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
