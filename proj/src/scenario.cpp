#include "tumorpf/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "tumorpf/errors.hpp"
#include "tumorpf/snapshot_io.hpp"

namespace tumorpf {

TumorInit parse_tumor_init(std::string_view name) {
  if (name == "gaussian") return TumorInit::gaussian;
  if (name == "two_tumors_3d") return TumorInit::two_tumors_3d;
  if (name == "empty") return TumorInit::empty;
  throw ConfigError(fmt::format("'initial.tumor' must be gaussian, two_tumors_3d or empty, got '{}'", name));
}

EcmInit parse_ecm_init(std::string_view name) {
  if (name == "ring") return EcmInit::ring;
  if (name == "halves") return EcmInit::halves;
  if (name == "uniform") return EcmInit::uniform;
  throw ConfigError(fmt::format("'initial.ecm' must be ring, halves or uniform, got '{}'", name));
}

std::string_view to_string(TumorInit v) {
  switch (v) {
    case TumorInit::gaussian:
      return "gaussian";
    case TumorInit::two_tumors_3d:
      return "two_tumors_3d";
    case TumorInit::empty:
      return "empty";
  }
  return "unknown";
}

std::string_view to_string(EcmInit v) {
  switch (v) {
    case EcmInit::ring:
      return "ring";
    case EcmInit::halves:
      return "halves";
    case EcmInit::uniform:
      return "uniform";
  }
  return "unknown";
}

ViolationPolicy parse_violation_policy(std::string_view name) {
  if (name == "abort") return ViolationPolicy::abort;
  if (name == "record") return ViolationPolicy::record;
  throw ConfigError(fmt::format("'on_violation' must be abort or record, got '{}'", name));
}

std::string_view to_string(ViolationPolicy v) { return v == ViolationPolicy::abort ? "abort" : "record"; }

double bump(double r2) {
  const double q = 1.0 - 16.0 * r2;
  if (!(q > 0.0)) return 0.0;
  return std::exp(1.0 - 1.0 / q);
}

ScalarField ic_gaussian_tumor(const GridSpec& grid) {
  if (grid.dim() != 2) throw ConfigError("'initial.tumor' = gaussian needs a 2D grid");
  ScalarField f(grid);
  const int np = grid.nodes_per_axis();
  for (int j = 0; j < np; ++j) {
    for (int i = 0; i < np; ++i) {
      const double x = grid.coord(i);
      const double y = grid.coord(j);
      f[grid.index(i, j)] = bump(x * x + y * y);
    }
  }
  return f;
}

ScalarField ic_ecm_ring(const ScalarField& phi_T0) {
  ScalarField f(phi_T0.grid());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 0.5 + 0.5 * (1.0 - 2.0 * std::abs(phi_T0[i] - 0.5));
  return f;
}

ScalarField ic_ecm_halves(const GridSpec& grid, bool high_on_left) {
  ScalarField f(grid);
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const bool left = grid.coord(grid.unflatten(idx)[0]) < 0.0;
    f[idx] = (left == high_on_left) ? 1.0 : 0.5;
  }
  return f;
}

ScalarField ic_3d_two_tumors(const GridSpec& grid) {
  if (grid.dim() != 3) throw ConfigError("'initial.tumor' = two_tumors_3d needs a 3D grid");
  const double c = std::cos(std::numbers::pi / 4.0);
  const double s = std::sin(std::numbers::pi / 4.0);
  ScalarField f(grid);
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const auto n = grid.unflatten(idx);
    const double x = grid.coord(n[0]);
    const double y = grid.coord(n[1]);
    const double z = grid.coord(n[2]);
    const double ball = bump((x + 0.15) * (x + 0.15) + (y + 0.15) * (y + 0.15) + z * z);
    const double dx = x - 0.15;
    const double dy = y - 0.15;
    const double xr = c * dx - s * dy;
    const double yr = (s * dx + c * dy) / 1.35;
    const double ellipse = bump(xr * xr + yr * yr + z * z);
    f[idx] = std::min(1.0, ball + ellipse);
  }
  return f;
}

ModelParams preset(std::string_view name) {
  ModelParams p;
  if (name == "baseline") return p;
  if (name == "aggressive") {
    p.lambda_T_pro = 2.5;
    p.lambda_T_apo = 0.001;
  } else if (name == "high_mde") {
    p.lambda_M_pro = 1.5;
    p.lambda_M_dec = 0.5;
  } else if (name == "low_mde") {
    p.lambda_M_pro = 0.5;
    p.lambda_M_dec = 1.5;
  } else if (name == "high_haptotaxis") {
    p.chi_H = 0.002;
  } else if (name == "low_haptotaxis") {
    p.chi_H = 0.0005;
  } else {
    throw ConfigError(fmt::format("unknown preset '{}'", name));
  }
  return p;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"baseline",        "aggressive",     "high_mde", "low_mde",
                                              "high_haptotaxis", "low_haptotaxis"};
  return names;
}

std::vector<double> default_snapshot_times(int dim) {
  if (dim == 3) return {0.0, 1.0, 2.0, 3.0};
  return {0.0, 8.0, 9.0, 10.0};
}

std::size_t Scenario::num_steps() const {
  return static_cast<std::size_t>(std::llround(T_final / step.tau));
}

std::vector<double> Scenario::effective_snapshot_times() const {
  return snapshot_times.empty() ? default_snapshot_times(grid.dim()) : snapshot_times;
}

void Scenario::validate() const {
  params.validate();
  step.validate(params);
  if (!(T_final >= 0.0) || !std::isfinite(T_final)) {
    throw ConfigError(fmt::format("'T_final' must be >= 0, got {}", T_final));
  }
  const double ratio = T_final / step.tau;
  if (std::abs(ratio - std::round(ratio)) > 1e-6 * std::max(1.0, ratio)) {
    throw ConfigError(fmt::format("'T_final' = {} is not a whole number of steps of 'tau' = {}", T_final, step.tau));
  }
  if (!(nutrient_initial > 0.0)) {
    throw ConfigError(fmt::format("'initial.nutrient' must be > 0, got {}", nutrient_initial));
  }
  if (ecm == EcmInit::uniform && !(ecm_uniform_value >= 0.0)) {
    throw ConfigError(fmt::format("'initial.ecm_value' must be >= 0, got {}", ecm_uniform_value));
  }
  if (tumor == TumorInit::gaussian && grid.dim() != 2) throw ConfigError("'initial.tumor' = gaussian needs dim = 2");
  if (tumor == TumorInit::two_tumors_3d && grid.dim() != 3) {
    throw ConfigError("'initial.tumor' = two_tumors_3d needs dim = 3");
  }
  if (step.nutrient_right_edge_source && nutrient_initial <= 0.0) {
    throw ConfigError("'nutrient_right_edge_source' needs a positive 'initial.nutrient'");
  }
  // A snapshot may sit half a step past T_final after rounding.
  for (double t : effective_snapshot_times()) {
    if (!(t >= 0.0) || t > T_final + 0.5 * step.tau) {
      throw ConfigError(fmt::format("'snapshot_times' entry {} lies outside [0, T_final = {}]", t, T_final));
    }
  }
  static const std::vector<std::string> known{"phi_T", "phi_N", "phi_V", "phi_sigma", "phi_M", "theta"};
  for (const auto& f : snapshot_fields) {
    if (std::find(known.begin(), known.end(), f) == known.end()) {
      throw ConfigError(fmt::format("'snapshot_fields' has unknown field '{}'", f));
    }
  }
}

Prepared prepare(const Scenario& sc) {
  const GridSpec& g = sc.grid;
  Prepared out;
  SimState& s = out.state;
  switch (sc.tumor) {
    case TumorInit::gaussian:
      s.phi_T = ic_gaussian_tumor(g);
      break;
    case TumorInit::two_tumors_3d:
      s.phi_T = ic_3d_two_tumors(g);
      break;
    case TumorInit::empty:
      s.phi_T = ScalarField(g, 0.0);
      break;
  }
  switch (sc.ecm) {
    case EcmInit::ring:
      s.theta = ic_ecm_ring(s.phi_T);
      break;
    case EcmInit::halves:
      s.theta = ic_ecm_halves(g, sc.ecm_high_on_left);
      break;
    case EcmInit::uniform:
      s.theta = ScalarField(g, sc.ecm_uniform_value);
      break;
  }
  s.phi_N = ScalarField(g, 0.0);
  s.phi_sigma = ScalarField(g, sc.nutrient_initial);
  s.phi_M = ScalarField(g, 0.0);
  s.t = 0.0;

  out.params = sc.params;
  out.params.phi_sigma0_max = s.phi_sigma.max();
  out.params.theta0_max = s.theta.max();
  out.params.validate();
  return out;
}

MonitorRow measure(const SimState& s, const ModelParams& p, std::size_t step) {
  MonitorRow r;
  r.step = step;
  r.t = s.t;
  r.phiT_max = s.phi_T.max();
  r.phiT_min = s.phi_T.min();
  r.phiN_max = s.phi_N.max();
  r.phiN_min = s.phi_N.min();
  r.theta_min = s.theta.min();
  const GridSpec& g = s.grid();
  double psi_s = 0.0;
  double psi_m = 0.0;
  double mass = 0.0;
  double moment = 0.0;
  for (std::size_t i = 0; i < s.phi_T.size(); ++i) {
    psi_s = std::max(psi_s, std::abs(2.0 * s.phi_sigma[i] / p.phi_sigma0_max - 1.0));
    psi_m = std::max(psi_m, std::abs(2.0 * s.phi_M[i] - 1.0));
    const double w = g.quadrature_weight(i) * s.phi_T[i];
    mass += w;
    moment += w * g.coord(g.unflatten(i)[0]);
  }
  r.psi_sigma_norm = psi_s;
  r.psi_M_norm = psi_m;
  r.tumor_mass = mass;
  r.com_x = mass > 0.0 ? moment / mass : 0.0;
  return r;
}

namespace {

const ScalarField* pick_field(const SimState& s, const std::string& name, ScalarField& scratch) {
  if (name == "phi_T") return &s.phi_T;
  if (name == "phi_N") return &s.phi_N;
  if (name == "phi_sigma") return &s.phi_sigma;
  if (name == "phi_M") return &s.phi_M;
  if (name == "theta") return &s.theta;
  scratch = viable_fraction(s.phi_T, s.phi_N);
  return &scratch;
}

class SnapshotWriter {
 public:
  SnapshotWriter(const Scenario& sc, const RunOptions& opt, RunReport& report)
      : sc_(sc), report_(report) {
    if (!opt.out_dir) return;
    dir_ = *opt.out_dir / "snapshots";
    std::filesystem::create_directories(dir_);
    for (double t : sc.effective_snapshot_times()) {
      steps_.push_back(static_cast<std::size_t>(std::llround(t / sc.step.tau)));
    }
  }

  void maybe_write(const SimState& s, std::size_t step) {
    if (dir_.empty() || std::find(steps_.begin(), steps_.end(), step) == steps_.end()) return;
    ScalarField scratch;
    for (const auto& name : sc_.snapshot_fields) {
      report_.snapshots.push_back(write_snapshot(dir_, sc_.name, name, s.t, *pick_field(s, name, scratch)));
    }
  }

 private:
  const Scenario& sc_;
  RunReport& report_;
  std::filesystem::path dir_;
  std::vector<std::size_t> steps_;
};

}  // namespace

RunReport run(const Scenario& sc, const RunOptions& opt) {
  sc.validate();
  const auto start = std::chrono::steady_clock::now();

  Prepared prep = prepare(sc);
  RunReport report;
  report.scenario = sc.name;
  report.params = prep.params;
  report.initial_state = prep.state;
  const ModelParams& params = prep.params;
  const StepOperators ops = make_step_operators(sc.grid, params, sc.step.tau);

  SnapshotWriter snapshots(sc, opt, report);
  SimState state = std::move(prep.state);
  report.monitors.push_back(measure(state, params, 0));
  if (auto v = check_invariants(nullptr, state, params)) report.violations.push_back({0, *v});
  snapshots.maybe_write(state, 0);
  if (opt.observer) opt.observer(state, 0);

  const ViolationPolicy policy = opt.on_violation.value_or(sc.on_violation);
  const std::size_t n_steps = sc.num_steps();
  bool aborted = !report.violations.empty() && policy == ViolationPolicy::abort;
  for (std::size_t k = 1; k <= n_steps && !aborted; ++k) {
    SimState next = advance(state, sc.step, ops, params, k, &report.timings);
    next.t = static_cast<double>(k) * sc.step.tau;
    if (sc.inject && sc.inject->step == k) {
      const GridSpec& g = sc.grid;
      const int mid = g.cells() / 2;
      const std::size_t centre = g.index(mid, mid, g.dim() == 3 ? mid : 0);
      next.phi_sigma[centre] = params.phi_sigma0_max * (sc.inject->psi_sigma + 1.0) / 2.0;
    }
    report.monitors.push_back(measure(next, params, k));
    if (auto v = check_invariants(&state, next, params)) {
      report.violations.push_back({k, *v});
      if (policy == ViolationPolicy::abort) aborted = true;
    }
    state = std::move(next);
    report.steps_taken = k;
    snapshots.maybe_write(state, k);
    if (opt.observer) opt.observer(state, k);
  }
  report.completed = !aborted;

  if (opt.out_dir) write_monitors_csv(*opt.out_dir / "monitors.csv", report.monitors);
  report.final_state = std::move(state);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace tumorpf
