#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "tumorpf/errors.hpp"
#include "tumorpf/harness.hpp"

using namespace tumorpf;
namespace fs = std::filesystem;

namespace {

ConvergenceLevel sampled_level(int level, int n, double err) {
  ConvergenceLevel l;
  l.level = level;
  l.refined_value = n;
  for (int i = 0; i <= n; ++i) {
    const double x = -1.0 + 2.0 * i / n;
    l.x.push_back(x);
    l.values.push_back(std::sin(3.0 * x) + err);
  }
  return l;
}

Scenario small(int n, double T_final) {
  Scenario sc;
  sc.grid = GridSpec(2, n);
  sc.T_final = T_final;
  sc.snapshot_times = {0.0};
  return sc;
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST_CASE("differences of restricted slices") {
  ConvergenceStudy same;
  same.levels = {sampled_level(0, 8, 0.0), sampled_level(1, 8, 0.0)};
  compute_differences(same);
  CHECK(*same.levels[0].diff_to_next == 0.0);
  CHECK_FALSE(same.levels[1].diff_to_next.has_value());

  // A smooth field restricted from finer grids differs only by the injected error.
  ConvergenceStudy refined;
  refined.levels = {sampled_level(0, 8, 0.0), sampled_level(1, 16, 0.0), sampled_level(2, 64, 0.0)};
  compute_differences(refined);
  CHECK(*refined.levels[0].diff_to_next <= 1e-15);
  CHECK(*refined.levels[1].diff_to_next <= 1e-15);

  ConvergenceStudy quadratic;
  quadratic.levels = {sampled_level(0, 8, 0.25), sampled_level(1, 16, 0.0625), sampled_level(2, 32, 0.015625)};
  compute_differences(quadratic);
  CHECK(*quadratic.levels[0].observed_order == doctest::Approx(2.0));
  CHECK_FALSE(quadratic.levels[1].observed_order.has_value());

  ConvergenceStudy uneven;
  uneven.levels = {sampled_level(0, 8, 0.0), sampled_level(1, 12, 0.0)};
  CHECK_THROWS_AS(compute_differences(uneven), ConfigError);
}

TEST_CASE("probe slices") {
  const Prepared p = prepare(small(16, 0.0));
  const auto T = probe_slice(p.state, p.params, "phi_T");
  REQUIRE(T.size() == 17);
  CHECK(T[8] == 1.0);
  CHECK(T[0] == 0.0);
  const auto psi = probe_slice(p.state, p.params, "psi_sigma");
  CHECK(psi[3] == 1.0);
  const auto psiM = probe_slice(p.state, p.params, "psi_M");
  CHECK(psiM[3] == -1.0);
  CHECK(probe_slice(p.state, p.params, "phi_V")[8] == 1.0);
  CHECK_THROWS_AS(probe_slice(p.state, p.params, "pressure"), ConfigError);
}

TEST_CASE("degenerate temporal study has zero differences") {
  const ConvergenceStudy s = temporal_convergence(small(16, 0.0), 1e-3, 2, {"phi_T", std::nullopt});
  REQUIRE(s.levels.size() == 2);
  CHECK(*s.levels[0].diff_to_next == 0.0);
  CHECK(s.levels[1].refined_value == 5e-4);
}

TEST_CASE("temporal self-convergence is second order on a coarse grid") {
  // N = 32 is already in the asymptotic range at these step sizes.
  const ConvergenceStudy s = temporal_convergence(small(32, 1.0), 2e-3, 5, {"psi_sigma", std::nullopt}, 4);
  REQUIRE(s.levels.size() == 5);
  for (int k = 0; k + 2 < 5; ++k) CHECK(*s.levels[static_cast<std::size_t>(k)].diff_to_next > *s.levels[static_cast<std::size_t>(k) + 1].diff_to_next);
  CHECK(*s.levels[1].observed_order >= 1.8);
  CHECK(*s.levels[2].observed_order >= 1.8);
}

TEST_CASE("spatial study shape and argument checks") {
  const ConvergenceStudy s = spatial_convergence(small(8, 0.02), {8, 16, 32}, 1e-3, {"phi_sigma", std::nullopt}, 3);
  REQUIRE(s.levels.size() == 3);
  CHECK(s.levels[0].values.size() == 9);
  CHECK(s.levels[2].values.size() == 33);
  CHECK(s.levels[0].diff_to_next.has_value());
  CHECK(s.levels[1].diff_to_next.has_value());
  CHECK_FALSE(s.levels[2].diff_to_next.has_value());
  CHECK_THROWS_AS(spatial_convergence(small(8, 0.02), {8, 12}, 1e-3, {}), ConfigError);
  CHECK_THROWS_AS(spatial_convergence(small(8, 0.02), {}, 1e-3, {}), ConfigError);
  CHECK_THROWS_AS(temporal_convergence(small(8, 0.02), 1e-3, 0, {}), ConfigError);
}

TEST_CASE("structure report from violations and from monitor rows") {
  Scenario sc = small(16, 0.005);
  const StructureReport clean = structure_monitor_report(run(sc));
  CHECK(clean.pass);
  CHECK(clean.rows.size() == 6);

  sc.inject = FaultInjection{3, -1.2};
  RunOptions opt;
  opt.on_violation = ViolationPolicy::record;
  const StructureReport faulty = structure_monitor_report(run(sc, opt));
  CHECK_FALSE(faulty.pass);
  CHECK(*faulty.first_failure_step == 3);
  CHECK(faulty.detail.find("psi_sigma_norm") != std::string::npos);

  RunReport fake;
  fake.params.theta0_max = 1.0;
  fake.monitors.resize(3);
  for (auto& r : fake.monitors) r.theta_min = 0.5;
  fake.monitors[2].theta_min = 0.6;
  fake.monitors[2].step = 2;
  const StructureReport rising = structure_monitor_report(fake);
  CHECK_FALSE(rising.pass);
  CHECK(rising.detail == "theta_min increased");

  const fs::path dir = fs::temp_directory_path() / "tumorpf_unit_harness";
  fs::create_directories(dir);
  write_structure_csv(dir / "structure.csv", clean);
  CHECK(first_line(dir / "structure.csv") == "step,t,psi_sigma_norm,psi_M_norm,phiT_max,phiT_min,phiN_max,theta_min");
}

TEST_CASE("study and perf CSV layouts") {
  const fs::path dir = fs::temp_directory_path() / "tumorpf_unit_harness";
  fs::create_directories(dir);
  ConvergenceStudy q;
  q.levels = {sampled_level(0, 8, 0.25), sampled_level(1, 16, 0.0625), sampled_level(2, 32, 0.0)};
  compute_differences(q);
  write_study_csv(dir / "study.csv", q);
  write_slice_csv(dir / "slice.csv", q.levels[0]);
  CHECK(first_line(dir / "study.csv") == "level,refined_value,diff_to_next,observed_order");
  CHECK(first_line(dir / "slice.csv") == "x,value");

  const auto rows = perf_scaling(2, {16, 32}, 2, 3);
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].measured_ratio.has_value());
  CHECK(*rows[1].predicted_ratio == doctest::Approx(5.0));
  CHECK(rows[1].median_step_seconds > 0.0);
  write_perf_csv(dir / "perf.csv", rows);
  CHECK(first_line(dir / "perf.csv") == "dim,N,median_step_seconds,measured_ratio,predicted_ratio");
  CHECK_THROWS_AS(perf_scaling(2, {16}, 0, 1), ConfigError);
}
