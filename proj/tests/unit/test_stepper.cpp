#include <doctest.h>

#include <omp.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>

#include "support.hpp"
#include "tumorpf/errors.hpp"
#include "tumorpf/scenario.hpp"
#include "tumorpf/stepper.hpp"

using namespace tumorpf;
using namespace tumorpf::testing;

namespace {

SimState uniform_state(const GridSpec& g, double T, double N, double S, double M, double th) {
  SimState s;
  s.phi_T = ScalarField(g, T);
  s.phi_N = ScalarField(g, N);
  s.phi_sigma = ScalarField(g, S);
  s.phi_M = ScalarField(g, M);
  s.theta = ScalarField(g, th);
  return s;
}

Prepared baseline(int n) {
  Scenario sc;
  sc.grid = GridSpec(2, n);
  return prepare(sc);
}

bool bitwise_equal(const ScalarField& a, const ScalarField& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("scheme names and step-size bounds") {
  CHECK(parse_scheme("etd1") == Scheme::etd1);
  CHECK(to_string(Scheme::etdrk2) == "etdrk2");
  CHECK_THROWS_AS(parse_scheme("rk4"), ConfigError);

  ModelParams p;
  StepConfig cfg;
  CHECK_NOTHROW(cfg.validate(p));
  cfg.tau = 2.0;
  CHECK_NOTHROW(cfg.validate(p));
  cfg.tau = 2.0001;
  CHECK_THROWS_WITH_AS(cfg.validate(p), doctest::Contains("lambda_VN"), ConfigError);
  p.lambda_VN = 0.5;
  p.lambda_theta_deg = 4.0;
  cfg.tau = 1.0;
  CHECK_THROWS_WITH_AS(cfg.validate(p), doctest::Contains("lambda_theta_deg"), ConfigError);
  cfg.tau = 0.0;
  CHECK_THROWS_AS(cfg.validate(p), ConfigError);
}

TEST_CASE("no tumour: nutrient and ECM are invariant") {
  const GridSpec g(2, 16);
  ModelParams p;
  const StepConfig cfg;
  const StepOperators ops = make_step_operators(g, p, cfg.tau);
  for (Scheme scheme : {Scheme::etd1, Scheme::etdrk2}) {
    StepConfig c = cfg;
    c.scheme = scheme;
    SimState s = uniform_state(g, 0.0, 0.0, 0.6, 0.0, 1.0);
    for (int k = 0; k < 20; ++k) s = advance(s, c, ops, p, static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(s.phi_sigma[i] == doctest::Approx(0.6).epsilon(1e-13));
      CHECK(s.theta[i] == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(s.phi_M[i] == doctest::Approx(0.0).scale(1e-13));
    }
    CHECK(s.t == doctest::Approx(20 * cfg.tau));
  }
}

TEST_CASE("ETD1 nutrient update equals a per-mode reference") {
  Prepared pr = baseline(32);
  const ModelParams& p = pr.params;
  const StepConfig cfg{1e-3, Scheme::etd1, false};
  const StepOperators ops = make_step_operators(pr.state.grid(), p, cfg.tau);
  const SimState next = etd1_step(pr.state, cfg, ops, p);

  const GridSpec& g = pr.state.grid();
  const ScalarField V = viable_fraction(pr.state.phi_T, pr.state.phi_N);
  const ScalarField psi = psi_sigma_from_phi(pr.state.phi_sigma, p.phi_sigma0_max);
  const ScalarField n = nonlinear_sigma(V, psi, p);
  const DctTransform dct(g);
  ScalarField ph = dct.forward(psi);
  const ScalarField nh = dct.forward(n);
  const std::vector<double> s = laplacian_symbol(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double x = (p.kappa_sigma() - p.nutrient_diffusivity() * s[k]) * cfg.tau;
    ph[k] = std::exp(-x) * ph[k] + cfg.tau * (x > 0 ? -std::expm1(-x) / x : 1.0) * nh[k];
  }
  const ScalarField ref = phi_sigma_from_psi(dct.inverse(ph), p.phi_sigma0_max);
  CHECK(max_abs_diff(next.phi_sigma, ref) <= 1e-13);
}

TEST_CASE("single baseline step keeps every invariant") {
  Prepared pr = baseline(64);
  for (Scheme scheme : {Scheme::etd1, Scheme::etdrk2}) {
    const StepConfig cfg{1e-3, scheme, false};
    const StepOperators ops = make_step_operators(pr.state.grid(), pr.params, cfg.tau);
    const SimState next = advance(pr.state, cfg, ops, pr.params);
    const auto v = check_invariants(&pr.state, next, pr.params);
    CHECK_MESSAGE(!v, (v ? v->describe() : ""));
    const MonitorRow m = measure(next, pr.params, 1);
    CHECK(m.psi_sigma_norm <= 1.0 + 1e-12);
    CHECK(m.psi_M_norm <= 1.0 + 1e-12);
  }
}

TEST_CASE("ETDRK2 departs from ETD1 by O(tau^2) in one step") {
  Prepared pr = baseline(32);
  double prev = 0.0;
  for (double tau : {4e-3, 2e-3, 1e-3}) {
    const StepOperators ops = make_step_operators(pr.state.grid(), pr.params, tau);
    const SimState a = etd1_step(pr.state, {tau, Scheme::etd1, false}, ops, pr.params);
    const SimState b = etdrk2_step(pr.state, {tau, Scheme::etdrk2, false}, ops, pr.params);
    const double d = max_abs_diff(a.phi_sigma, b.phi_sigma);
    if (prev > 0.0) CHECK(std::log2(prev / d) == doctest::Approx(2.0).epsilon(0.1));
    prev = d;
  }
}

TEST_CASE("100 ETD1 steps on the baseline keep the maximum bound") {
  Prepared pr = baseline(64);
  const StepConfig cfg{1e-3, Scheme::etd1, false};
  const StepOperators ops = make_step_operators(pr.state.grid(), pr.params, cfg.tau);
  SimState s = pr.state;
  bool ok = true;
  for (std::size_t k = 1; k <= 100 && ok; ++k) {
    SimState next = etd1_step(s, cfg, ops, pr.params, k);
    if (auto v = check_invariants(&s, next, pr.params)) {
      FAIL_CHECK(v->describe());
      ok = false;
    }
    s = std::move(next);
  }
  CHECK(ok);
}

TEST_CASE("ETD recurrence on constant fields matches the scalar closed form") {
  const GridSpec g(2, 8);
  ModelParams p;
  const double tau = 0.01;
  const auto dct = std::make_shared<const DctTransform>(g);
  const PhiTable table(dct, build_operator(g, OperatorKind::nutrient, p), tau);
  const ScalarField V(g, 1.0);
  ScalarField psi(g, 0.7);
  double ref = 0.7;
  const double k = p.kappa_sigma();
  for (int n = 0; n < 50; ++n) {
    psi = table.etd_predictor(psi, nonlinear_sigma(V, psi, p));
    ref = std::exp(-k * tau) * ref + (1.0 - std::exp(-k * tau)) / k * (k * ref - p.lambda_sigma * (ref + 1.0));
  }
  for (std::size_t i = 0; i < psi.size(); ++i) CHECK(psi[i] == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("trapezoid closed forms: hand values") {
  const GridSpec g(2, 4);
  ModelParams p;
  p.lambda_VN = 1.0;
  p.lambda_theta_deg = 1.0;
  const ScalarField zero(g, 0.0), one(g, 1.0);
  const ScalarField starved(g, 0.0), fed(g, 1.0);
  const ScalarField nN = trapezoid_N(zero, one, one, starved, starved, p, 1.0);
  CHECK(nN[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-3));
  const ScalarField half(g, 0.5);
  const ScalarField kept = trapezoid_N(half, one, one, fed, fed, p, 1.0);
  CHECK(kept[0] == doctest::Approx(0.5).epsilon(1e-3));
  const ScalarField th = trapezoid_theta(one, one, one, p, 1.0);
  CHECK(th[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  const ScalarField same = trapezoid_theta(half, zero, zero, p, 0.5);
  CHECK(same[0] == 0.5);

  CHECK_THROWS_AS(trapezoid_N(zero, one, one, fed, fed, p, 2.5), ConfigError);
  CHECK_THROWS_AS(trapezoid_theta(one, one, one, p, 2.5), ConfigError);
  CHECK_THROWS_AS(trapezoid_theta(one, ScalarField(GridSpec(2, 8)), one, p, 1.0), ConfigError);
}

TEST_CASE("trapezoid closed forms match Picard iteration of the implicit rule") {
  const GridSpec g(2, 4);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ModelParams p;
  double worst = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    p.lambda_VN = 0.1 + 1.9 * u(rng);
    p.lambda_theta_deg = 0.1 + 1.9 * u(rng);
    const double tau = 0.5 * u(rng) / std::max(p.lambda_VN, p.lambda_theta_deg);
    const double T0 = u(rng), T1 = u(rng), N0 = T0 * u(rng), S0 = u(rng), S1 = u(rng);
    const double th0 = u(rng), m0 = u(rng), m1 = u(rng);
    const ScalarField rN = trapezoid_N(ScalarField(g, N0), ScalarField(g, T0), ScalarField(g, T1), ScalarField(g, S0),
                                       ScalarField(g, S1), p, tau);
    const double H0 = heaviside_smooth(p.sigma_VN - S0, p.eps1);
    const double H1 = heaviside_smooth(p.sigma_VN - S1, p.eps1);
    worst = std::max(worst, std::abs(rN[0] - picard_N(N0, T0, T1, H0, H1, 0.5 * tau * p.lambda_VN)));
    const ScalarField rT = trapezoid_theta(ScalarField(g, th0), ScalarField(g, m0), ScalarField(g, m1), p, tau);
    worst = std::max(worst, std::abs(rT[0] - picard_theta(th0, m0, m1, 0.5 * tau * p.lambda_theta_deg)));
  }
  CHECK(worst <= 1e-13);
}

TEST_CASE("invariant checks name the broken property") {
  const GridSpec g(2, 4);
  ModelParams p;
  const SimState good = uniform_state(g, 0.5, 0.2, 0.5, 0.5, 0.9);
  CHECK_FALSE(check_invariants(&good, good, p).has_value());

  auto broken = [&](auto mutate) {
    SimState s = good;
    mutate(s);
    auto v = check_invariants(&good, s, p);
    return v ? v->check : std::string("none");
  };
  CHECK(broken([](SimState& s) { s.phi_sigma[3] = 1.1; }) == "psi_sigma_norm");
  CHECK(broken([](SimState& s) { s.phi_M[3] = -0.1; }) == "psi_M_norm");
  CHECK(broken([](SimState& s) { s.phi_T[3] = 1.0 + 1e-9; }) == "phiT_le_1");
  CHECK(broken([](SimState& s) { s.phi_T[3] = -1e-9; }) == "phiT_ge_0");
  CHECK(broken([](SimState& s) { s.phi_N[3] = -1e-9; }) == "phiN_ge_0");
  CHECK(broken([](SimState& s) { s.phi_N[3] = 0.6; }) == "phiN_le_phiT");
  CHECK(broken([](SimState& s) { s.theta[3] = -1e-9; }) == "theta_ge_0");
  CHECK(broken([](SimState& s) { s.theta[3] = 0.95; }) == "theta_nonincreasing");
  CHECK(broken([](SimState& s) { s.phi_T[3] = 0.5 + 5e-13; }) == "none");
  SimState high = good;
  high.theta[0] = 1.5;
  CHECK(check_invariants(nullptr, high, p)->check == "theta_le_max");
}

TEST_CASE("non-finite input is reported with its stage") {
  Prepared pr = baseline(16);
  const StepConfig cfg;
  const StepOperators ops = make_step_operators(pr.state.grid(), pr.params, cfg.tau);
  SimState s = pr.state;
  s.phi_sigma[10] = std::nan("");
  try {
    (void)etdrk2_step(s, cfg, ops, pr.params, 7);
    FAIL("expected NumericalFailure");
  } catch (const NumericalFailure& e) {
    CHECK(e.stage() == "nonlinear_old");
    CHECK(e.step() == 7);
  }
}

TEST_CASE("right-edge nutrient source pins the x = 1 layer") {
  Prepared pr = baseline(16);
  const StepConfig cfg{1e-3, Scheme::etdrk2, true};
  const StepOperators ops = make_step_operators(pr.state.grid(), pr.params, cfg.tau);
  SimState s = pr.state;
  s.phi_sigma = ScalarField(s.grid(), 0.3);
  const SimState next = etdrk2_step(s, cfg, ops, pr.params);
  const GridSpec& g = s.grid();
  for (int j = 0; j <= g.cells(); ++j) {
    CHECK(next.phi_sigma[g.index(g.cells(), j)] == pr.params.phi_sigma0_max);
    CHECK(next.phi_sigma[g.index(g.cells() - 1, j)] < pr.params.phi_sigma0_max);
  }
}

TEST_CASE("a step is bit-identical across thread counts") {
  Prepared pr = baseline(64);
  const StepConfig cfg;
  const StepOperators ops = make_step_operators(pr.state.grid(), pr.params, cfg.tau);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const SimState one = etdrk2_step(pr.state, cfg, ops, pr.params);
  omp_set_num_threads(std::max(4, saved));
  const SimState many = etdrk2_step(pr.state, cfg, ops, pr.params);
  omp_set_num_threads(saved);
  CHECK(bitwise_equal(one.phi_T, many.phi_T));
  CHECK(bitwise_equal(one.phi_N, many.phi_N));
  CHECK(bitwise_equal(one.phi_sigma, many.phi_sigma));
  CHECK(bitwise_equal(one.phi_M, many.phi_M));
  CHECK(bitwise_equal(one.theta, many.theta));
}
