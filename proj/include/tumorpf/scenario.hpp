#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tumorpf/model.hpp"
#include "tumorpf/stepper.hpp"

namespace tumorpf {

enum class TumorInit { gaussian, two_tumors_3d, empty };
enum class EcmInit { ring, halves, uniform };

TumorInit parse_tumor_init(std::string_view name);
EcmInit parse_ecm_init(std::string_view name);
std::string_view to_string(TumorInit v);
std::string_view to_string(EcmInit v);

// exp(1 - 1/(1 - 16 r^2)) for 16 r^2 < 1, zero elsewhere.
double bump(double r2);

ScalarField ic_gaussian_tumor(const GridSpec& grid);
// 1/2 + 1/2 (1 - 2 |phi_T0 - 1/2|)
ScalarField ic_ecm_ring(const ScalarField& phi_T0);
// theta = 1 for x < 0 and 1/2 for x >= 0; high_on_left = false swaps the halves.
ScalarField ic_ecm_halves(const GridSpec& grid, bool high_on_left = true);
// Ball at (-0.15,-0.15,0) plus an ellipsoid at (0.15,0.15,0) rotated by pi/4 in
// the xy-plane with semi-axis ratio 1.35, summed and clamped to [0,1].
ScalarField ic_3d_two_tumors(const GridSpec& grid);

ModelParams preset(std::string_view name);
const std::vector<std::string>& preset_names();

// abort: stop at the first step that breaks a structure property.
// record: log it and keep stepping.
enum class ViolationPolicy { abort, record };

ViolationPolicy parse_violation_policy(std::string_view name);
std::string_view to_string(ViolationPolicy v);

// Debug hook: after step `step`, overwrite psi_sigma at the central node.
struct FaultInjection {
  std::size_t step = 1;
  double psi_sigma = 1.5;
};

struct Scenario {
  std::string name = "baseline2d";
  std::string preset = "baseline";
  GridSpec grid{2, 128};
  ModelParams params;
  TumorInit tumor = TumorInit::gaussian;
  EcmInit ecm = EcmInit::ring;
  bool ecm_high_on_left = true;
  double ecm_uniform_value = 1.0;
  double nutrient_initial = 1.0;
  double T_final = 10.0;
  StepConfig step;
  std::vector<double> snapshot_times;  // empty: defaults for the dimension
  std::vector<std::string> snapshot_fields{"phi_T", "phi_N", "phi_V", "phi_sigma", "phi_M", "theta"};
  std::optional<FaultInjection> inject;
  ViolationPolicy on_violation = ViolationPolicy::abort;

  std::size_t num_steps() const;
  std::vector<double> effective_snapshot_times() const;
  void validate() const;
};

std::vector<double> default_snapshot_times(int dim);

/// Initial fields and the parameters with phi_sigma0_max / theta0_max taken from them.
struct Prepared {
  SimState state;
  ModelParams params;
};
Prepared prepare(const Scenario& scenario);

struct MonitorRow {
  std::size_t step = 0;
  double t = 0.0;
  double phiT_max = 0.0;
  double phiT_min = 0.0;
  double phiN_max = 0.0;
  double phiN_min = 0.0;
  double theta_min = 0.0;
  double psi_sigma_norm = 0.0;
  double psi_M_norm = 0.0;
  double tumor_mass = 0.0;
  double com_x = 0.0;
};

MonitorRow measure(const SimState& state, const ModelParams& params, std::size_t step);

struct RecordedViolation {
  std::size_t step = 0;
  Violation violation;
};

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  // snapshots/ and monitors.csv go here
  std::optional<ViolationPolicy> on_violation;   // overrides the scenario's policy
  // Called with every accepted state, including the initial one.
  std::function<void(const SimState&, std::size_t step)> observer;
};

struct RunReport {
  std::string scenario;
  ModelParams params;
  std::size_t steps_taken = 0;
  bool completed = false;
  std::vector<MonitorRow> monitors;
  std::vector<RecordedViolation> violations;
  std::vector<std::filesystem::path> snapshots;
  StageTimings timings;
  double wall_seconds = 0.0;
  SimState final_state;
  SimState initial_state;
};

RunReport run(const Scenario& scenario, const RunOptions& options = {});

}  // namespace tumorpf
