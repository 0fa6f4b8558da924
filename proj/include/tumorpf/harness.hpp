#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tumorpf/scenario.hpp"

namespace tumorpf {

enum class StudyMode { temporal, spatial };

// Field sampled along y = 0 (and z = 0 in 3D) at time t.
struct ProbeSpec {
  std::string field = "phi_T";  // phi_T, phi_N, phi_V, phi_sigma, phi_M, theta, psi_sigma, psi_M
  std::optional<double> t;      // defaults to the scenario's T_final
};

struct ConvergenceLevel {
  int level = 0;
  double refined_value = 0.0;  // tau (temporal) or N (spatial)
  std::vector<double> x;
  std::vector<double> values;
  std::optional<double> diff_to_next;
  std::optional<double> observed_order;
};

struct ConvergenceStudy {
  StudyMode mode = StudyMode::temporal;
  ProbeSpec probe;
  std::vector<ConvergenceLevel> levels;
};

std::vector<double> probe_slice(const SimState& state, const ModelParams& params, const std::string& field);

/// Runs tau, tau/2, ..., tau/2^(levels-1) on the scenario's grid.
ConvergenceStudy temporal_convergence(const Scenario& base, double base_tau, int levels, const ProbeSpec& probe,
                                      int jobs = 1);

/// Runs each N in `Ns` (each a multiple of the previous by 2) at fixed tau and
/// compares slices on the coarser level's nodes.
ConvergenceStudy spatial_convergence(const Scenario& base, const std::vector<int>& Ns, double tau,
                                     const ProbeSpec& probe, int jobs = 1);

// Fills diff_to_next / observed_order from slices already on shared nodes.
void compute_differences(ConvergenceStudy& study);

// `level,refined_value,diff_to_next,observed_order`
void write_study_csv(const std::filesystem::path& path, const ConvergenceStudy& study);
// `x,value`
void write_slice_csv(const std::filesystem::path& path, const ConvergenceLevel& level);

struct StructureReport {
  bool pass = true;
  std::optional<std::size_t> first_failure_step;
  std::string detail;
  std::vector<MonitorRow> rows;
};

StructureReport structure_monitor_report(const RunReport& report, double slack = kInvariantSlack);

// step,t,psi_sigma_norm,psi_M_norm,phiT_max,phiT_min,phiN_max,theta_min
void write_structure_csv(const std::filesystem::path& path, const StructureReport& report);

struct PerfRow {
  int dim = 2;
  int N = 0;
  double median_step_seconds = 0.0;
  std::optional<double> measured_ratio;   // vs the previous row
  std::optional<double> predicted_ratio;  // (N2/N1)^dim log2(N2)/log2(N1)
};

/// Median over `batches` of the mean step time in a batch of `steps` steps,
/// starting from the dimension's standard initial data.
std::vector<PerfRow> perf_scaling(int dim, const std::vector<int>& Ns, int steps = 10, int batches = 5,
                                  double tau = 1e-3);

void write_perf_csv(const std::filesystem::path& path, const std::vector<PerfRow>& rows);

}  // namespace tumorpf
