#include "tumorpf/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>

#include <fmt/format.h>

#include "tumorpf/errors.hpp"
#include "tumorpf/snapshot_io.hpp"

namespace tumorpf {

std::vector<double> probe_slice(const SimState& s, const ModelParams& p, const std::string& field) {
  const GridSpec& g = s.grid();
  const int np = g.nodes_per_axis();
  const int mid = g.cells() / 2;
  ScalarField derived;
  const ScalarField* src = nullptr;
  double scale = 1.0;
  double shift = 0.0;
  if (field == "phi_T") {
    src = &s.phi_T;
  } else if (field == "phi_N") {
    src = &s.phi_N;
  } else if (field == "phi_sigma") {
    src = &s.phi_sigma;
  } else if (field == "phi_M") {
    src = &s.phi_M;
  } else if (field == "theta") {
    src = &s.theta;
  } else if (field == "phi_V") {
    derived = viable_fraction(s.phi_T, s.phi_N);
    src = &derived;
  } else if (field == "psi_sigma") {
    src = &s.phi_sigma;
    scale = 2.0 / p.phi_sigma0_max;
    shift = -1.0;
  } else if (field == "psi_M") {
    src = &s.phi_M;
    scale = 2.0;
    shift = -1.0;
  } else {
    throw ConfigError(fmt::format("'probe_field' has unknown field '{}'", field));
  }
  std::vector<double> out(static_cast<std::size_t>(np));
  for (int i = 0; i < np; ++i) {
    out[static_cast<std::size_t>(i)] = scale * (*src)[g.index(i, mid, g.dim() == 3 ? mid : 0)] + shift;
  }
  return out;
}

namespace {

ConvergenceLevel run_level(Scenario sc, const ProbeSpec& probe, int level, double refined_value) {
  sc.T_final = probe.t.value_or(sc.T_final);
  sc.snapshot_times = {0.0};
  sc.inject.reset();
  RunOptions opt;
  opt.on_violation = ViolationPolicy::record;
  RunReport rep;
  try {
    rep = run(sc, opt);
  } catch (const NumericalFailure& e) {
    throw NumericalFailure(fmt::format("{} (study level {})", e.stage(), level), e.step());
  }
  ConvergenceLevel out;
  out.level = level;
  out.refined_value = refined_value;
  out.values = probe_slice(rep.final_state, rep.params, probe.field);
  out.x.resize(out.values.size());
  for (std::size_t i = 0; i < out.x.size(); ++i) out.x[i] = sc.grid.coord(static_cast<int>(i));
  return out;
}

template <class Make>
std::vector<ConvergenceLevel> run_levels(int count, int jobs, Make make) {
  std::vector<ConvergenceLevel> out(static_cast<std::size_t>(count));
  if (jobs <= 1) {
    for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = make(k);
    return out;
  }
  for (int first = 0; first < count; first += jobs) {
    std::vector<std::future<ConvergenceLevel>> batch;
    for (int k = first; k < std::min(count, first + jobs); ++k) {
      batch.push_back(std::async(std::launch::async, make, k));
    }
    for (std::size_t b = 0; b < batch.size(); ++b) out[static_cast<std::size_t>(first) + b] = batch[b].get();
  }
  return out;
}

}  // namespace

void compute_differences(ConvergenceStudy& study) {
  auto& lv = study.levels;
  for (auto& l : lv) {
    l.diff_to_next.reset();
    l.observed_order.reset();
  }
  for (std::size_t k = 0; k + 1 < lv.size(); ++k) {
    const auto& coarse = lv[k].values;
    const auto& fine = lv[k + 1].values;
    const std::size_t cells_c = coarse.size() - 1;
    const std::size_t cells_f = fine.size() - 1;
    if (cells_c == 0 || cells_f % cells_c != 0) {
      throw ConfigError("convergence levels must refine by an integer factor");
    }
    const std::size_t r = cells_f / cells_c;
    double diff = 0.0;
    for (std::size_t i = 0; i < coarse.size(); ++i) diff = std::max(diff, std::abs(coarse[i] - fine[i * r]));
    lv[k].diff_to_next = diff;
  }
  for (std::size_t k = 0; k + 2 < lv.size(); ++k) {
    const double a = *lv[k].diff_to_next;
    const double b = *lv[k + 1].diff_to_next;
    if (a > 0.0 && b > 0.0) lv[k].observed_order = std::log2(a / b);
  }
}

ConvergenceStudy temporal_convergence(const Scenario& base, double base_tau, int levels, const ProbeSpec& probe,
                                      int jobs) {
  if (levels < 1) throw ConfigError(fmt::format("'levels' must be >= 1, got {}", levels));
  if (!(base_tau > 0.0)) throw ConfigError(fmt::format("'base_tau' must be > 0, got {}", base_tau));
  ConvergenceStudy study;
  study.mode = StudyMode::temporal;
  study.probe = probe;
  study.levels = run_levels(levels, jobs, [&](int k) {
    Scenario sc = base;
    sc.step.tau = base_tau / std::ldexp(1.0, k);
    return run_level(sc, probe, k, sc.step.tau);
  });
  compute_differences(study);
  return study;
}

ConvergenceStudy spatial_convergence(const Scenario& base, const std::vector<int>& Ns, double tau,
                                     const ProbeSpec& probe, int jobs) {
  if (Ns.empty()) throw ConfigError("'Ns' must not be empty");
  for (std::size_t k = 1; k < Ns.size(); ++k) {
    if (Ns[k] <= Ns[k - 1] || Ns[k] % Ns[k - 1] != 0) {
      throw ConfigError(fmt::format("'Ns' must increase by integer factors, got {} after {}", Ns[k], Ns[k - 1]));
    }
  }
  ConvergenceStudy study;
  study.mode = StudyMode::spatial;
  study.probe = probe;
  study.levels = run_levels(static_cast<int>(Ns.size()), jobs, [&](int k) {
    Scenario sc = base;
    sc.grid = GridSpec(base.grid.dim(), Ns[static_cast<std::size_t>(k)]);
    sc.step.tau = tau;
    return run_level(sc, probe, k, Ns[static_cast<std::size_t>(k)]);
  });
  compute_differences(study);
  return study;
}

void write_study_csv(const std::filesystem::path& path, const ConvergenceStudy& study) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "level,refined_value,diff_to_next,observed_order\n";
  for (const auto& l : study.levels) {
    out << l.level << ',' << format_double(l.refined_value) << ','
        << (l.diff_to_next ? format_double(*l.diff_to_next) : "") << ','
        << (l.observed_order ? format_double(*l.observed_order) : "") << '\n';
  }
}

void write_slice_csv(const std::filesystem::path& path, const ConvergenceLevel& level) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "x,value\n";
  for (std::size_t i = 0; i < level.values.size(); ++i) {
    out << format_double(level.x[i]) << ',' << format_double(level.values[i]) << '\n';
  }
}

StructureReport structure_monitor_report(const RunReport& report, double slack) {
  StructureReport out;
  out.rows = report.monitors;
  auto fail = [&](std::size_t step, std::string what) {
    if (out.pass || step < *out.first_failure_step) {
      out.first_failure_step = step;
      out.detail = std::move(what);
    }
    out.pass = false;
  };
  for (const auto& v : report.violations) fail(v.step, v.violation.describe());
  const double theta_max = report.params.theta0_max;
  for (std::size_t k = 0; k < report.monitors.size(); ++k) {
    const MonitorRow& r = report.monitors[k];
    if (r.psi_sigma_norm > 1.0 + slack) fail(r.step, fmt::format("psi_sigma_norm = {:.17g} > 1", r.psi_sigma_norm));
    if (r.psi_M_norm > 1.0 + slack) fail(r.step, fmt::format("psi_M_norm = {:.17g} > 1", r.psi_M_norm));
    if (r.phiT_max > 1.0 + slack || r.phiT_min < -slack) fail(r.step, "phi_T outside [0,1]");
    if (r.phiN_min < -slack) fail(r.step, "phi_N below 0");
    if (r.theta_min < -slack) fail(r.step, "theta below 0");
    if (k > 0 && r.theta_min > report.monitors[k - 1].theta_min + slack) fail(r.step, "theta_min increased");
    if (k == 0 && r.theta_min > theta_max + slack) fail(r.step, "theta above theta0_max");
  }
  return out;
}

void write_structure_csv(const std::filesystem::path& path, const StructureReport& report) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "step,t,psi_sigma_norm,psi_M_norm,phiT_max,phiT_min,phiN_max,theta_min\n";
  for (const auto& r : report.rows) {
    out << r.step << ',' << format_double(r.t) << ',' << format_double(r.psi_sigma_norm) << ','
        << format_double(r.psi_M_norm) << ',' << format_double(r.phiT_max) << ',' << format_double(r.phiT_min)
        << ',' << format_double(r.phiN_max) << ',' << format_double(r.theta_min) << '\n';
  }
}

std::vector<PerfRow> perf_scaling(int dim, const std::vector<int>& Ns, int steps, int batches, double tau) {
  if (steps < 1 || batches < 1) throw ConfigError("perf_scaling needs steps >= 1 and batches >= 1");
  std::vector<PerfRow> rows;
  for (int n : Ns) {
    Scenario sc;
    sc.grid = GridSpec(dim, n);
    sc.tumor = dim == 3 ? TumorInit::two_tumors_3d : TumorInit::gaussian;
    sc.step.tau = tau;
    Prepared prep = prepare(sc);
    const StepOperators ops = make_step_operators(sc.grid, prep.params, tau);
    SimState state = advance(prep.state, sc.step, ops, prep.params, 1);  // warm-up

    std::vector<double> per_step;
    for (int b = 0; b < batches; ++b) {
      const auto t0 = std::chrono::steady_clock::now();
      for (int s = 0; s < steps; ++s) state = advance(state, sc.step, ops, prep.params);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      per_step.push_back(secs / steps);
    }
    std::sort(per_step.begin(), per_step.end());
    PerfRow row;
    row.dim = dim;
    row.N = n;
    row.median_step_seconds = per_step[per_step.size() / 2];
    if (!rows.empty()) {
      const PerfRow& prev = rows.back();
      row.measured_ratio = row.median_step_seconds / prev.median_step_seconds;
      row.predicted_ratio =
          std::pow(static_cast<double>(n) / prev.N, dim) * std::log2(static_cast<double>(n)) / std::log2(prev.N);
    }
    rows.push_back(row);
  }
  return rows;
}

void write_perf_csv(const std::filesystem::path& path, const std::vector<PerfRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "dim,N,median_step_seconds,measured_ratio,predicted_ratio\n";
  for (const auto& r : rows) {
    out << r.dim << ',' << r.N << ',' << format_double(r.median_step_seconds) << ','
        << (r.measured_ratio ? format_double(*r.measured_ratio) : "") << ','
        << (r.predicted_ratio ? format_double(*r.predicted_ratio) : "") << '\n';
  }
}

}  // namespace tumorpf
