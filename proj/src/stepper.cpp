#include "tumorpf/stepper.hpp"

#include <chrono>
#include <cmath>
#include <initializer_list>

#include <fmt/format.h>

#include "tumorpf/errors.hpp"

namespace tumorpf {

Scheme parse_scheme(std::string_view name) {
  if (name == "etd1") return Scheme::etd1;
  if (name == "etdrk2") return Scheme::etdrk2;
  throw ConfigError(fmt::format("'scheme' must be etd1 or etdrk2, got '{}'", name));
}

std::string_view to_string(Scheme scheme) { return scheme == Scheme::etd1 ? "etd1" : "etdrk2"; }

void StepConfig::validate(const ModelParams& params) const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError(fmt::format("'tau' must be > 0, got {}", tau));
  if (params.lambda_VN > 0.0 && tau > 2.0 / params.lambda_VN) {
    throw ConfigError(fmt::format("'tau' = {} exceeds 2/lambda_VN = {}", tau, 2.0 / params.lambda_VN));
  }
  if (params.lambda_theta_deg > 0.0 && tau > 2.0 / params.lambda_theta_deg) {
    throw ConfigError(
        fmt::format("'tau' = {} exceeds 2/lambda_theta_deg = {}", tau, 2.0 / params.lambda_theta_deg));
  }
}

StepOperators make_step_operators(const GridSpec& grid, const ModelParams& params, double tau) {
  auto dct = std::make_shared<const DctTransform>(grid);
  return StepOperators{
      dct,
      PhiTable(dct, build_operator(grid, OperatorKind::phase_field, params), tau),
      PhiTable(dct, build_operator(grid, OperatorKind::nutrient, params), tau),
      PhiTable(dct, build_operator(grid, OperatorKind::mde, params), tau),
  };
}

namespace {

class StageClock {
 public:
  explicit StageClock(double* sink) : sink_(sink), start_(std::chrono::steady_clock::now()) {}
  ~StageClock() {
    if (sink_) sink_[0] += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  StageClock(const StageClock&) = delete;
  StageClock& operator=(const StageClock&) = delete;

 private:
  double* sink_;
  std::chrono::steady_clock::time_point start_;
};

double* slot(StageTimings* t, double StageTimings::*member) { return t ? &(t->*member) : nullptr; }

void require_finite(std::initializer_list<const ScalarField*> fields, const char* stage, std::size_t step) {
  for (const ScalarField* f : fields) {
    if (!f->all_finite()) throw NumericalFailure(stage, step);
  }
}

// base + tau * Upsilon_2 (n_new - n_old)
ScalarField correct(const PhiTable& table, const ScalarField& base, const ScalarField& n_new,
                    const ScalarField& n_old) {
  ScalarField diff(base.grid());
  const long n = static_cast<long>(base.size());
  {
    double* d = diff.data();
    const double* a = n_new.data();
    const double* b = n_old.data();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) d[i] = a[i] - b[i];
  }
  ScalarField out = table.apply(2, diff);
  double* o = out.data();
  const double* x = base.data();
  const double tau = table.tau();
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) o[i] = x[i] + tau * o[i];
  return out;
}

void clamp_right_edge(ScalarField& phi_sigma, double value) {
  const GridSpec& g = phi_sigma.grid();
  const int last = g.cells();
  const int np = g.nodes_per_axis();
  const int layers = g.dim() == 3 ? np : 1;
  for (int k = 0; k < layers; ++k) {
    for (int j = 0; j < np; ++j) phi_sigma[g.index(last, j, k)] = value;
  }
}

struct OldStage {
  ScalarField phi_V;
  ScalarField psi_sigma;
  ScalarField psi_M;
  ScalarField N_T;
  ScalarField N_sigma;
  ScalarField N_M;
};

OldStage evaluate_old(const SimState& s, const ModelParams& p, std::size_t step, StageTimings* timings) {
  StageClock clock(slot(timings, &StageTimings::nonlinear));
  OldStage o;
  o.phi_V = viable_fraction(s.phi_T, s.phi_N);
  o.psi_sigma = psi_sigma_from_phi(s.phi_sigma, p.phi_sigma0_max);
  o.psi_M = psi_M_from_phi(s.phi_M);
  o.N_T = nonlinear_T(s.phi_T, o.phi_V, s.phi_sigma, s.theta, p);
  o.N_sigma = nonlinear_sigma(o.phi_V, o.psi_sigma, p);
  o.N_M = nonlinear_M(o.phi_V, o.psi_M, s.phi_sigma, s.theta, p);
  require_finite({&o.N_T, &o.N_sigma, &o.N_M}, "nonlinear_old", step);
  return o;
}

// Shared tail: theta and phi_N closed forms, optional nutrient source.
void finish_step(const SimState& s, SimState& next, const ScalarField& phi_sigma_pred, const StepConfig& cfg,
                 const ModelParams& p, std::size_t step, StageTimings* timings) {
  StageClock clock(slot(timings, &StageTimings::closed_form));
  next.theta = trapezoid_theta(s.theta, s.phi_M, next.phi_M, p, cfg.tau);
  next.phi_N = trapezoid_N(s.phi_N, s.phi_T, next.phi_T, s.phi_sigma, phi_sigma_pred, p, cfg.tau);
  if (cfg.nutrient_right_edge_source) clamp_right_edge(next.phi_sigma, p.phi_sigma0_max);
  require_finite({&next.theta, &next.phi_N}, "trapezoid", step);
  next.t = s.t + cfg.tau;
}

}  // namespace

SimState etd1_step(const SimState& s, const StepConfig& cfg, const StepOperators& ops, const ModelParams& p,
                   std::size_t step, StageTimings* timings) {
  const OldStage o = evaluate_old(s, p, step, timings);
  SimState next;
  {
    StageClock clock(slot(timings, &StageTimings::spectral));
    const ScalarField pT = ops.T.etd_predictor(s.phi_T, o.N_T);
    const ScalarField pS = ops.sigma.etd_predictor(o.psi_sigma, o.N_sigma);
    const ScalarField pM = ops.M.etd_predictor(o.psi_M, o.N_M);
    require_finite({&pT, &pS, &pM}, "predictor", step);
    next.phi_T = cutoff(pT);
    next.phi_sigma = phi_sigma_from_psi(pS, p.phi_sigma0_max);
    next.phi_M = phi_M_from_psi(pM);
  }
  const ScalarField sigma_pred = next.phi_sigma;
  finish_step(s, next, sigma_pred, cfg, p, step, timings);
  return next;
}

SimState etdrk2_step(const SimState& s, const StepConfig& cfg, const StepOperators& ops, const ModelParams& p,
                     std::size_t step, StageTimings* timings) {
  const OldStage o = evaluate_old(s, p, step, timings);

  ScalarField pT, pS, pM;
  {
    StageClock clock(slot(timings, &StageTimings::spectral));
    pT = ops.T.etd_predictor(s.phi_T, o.N_T);
    pS = ops.sigma.etd_predictor(o.psi_sigma, o.N_sigma);
    pM = ops.M.etd_predictor(o.psi_M, o.N_M);
  }
  require_finite({&pT, &pS, &pM}, "predictor", step);

  ScalarField sigma_pred, hat_T, V_pred, NT1, NS1, NM1;
  {
    StageClock clock(slot(timings, &StageTimings::nonlinear));
    sigma_pred = phi_sigma_from_psi(pS, p.phi_sigma0_max);
    hat_T = cutoff(pT);
    V_pred = ScalarField(s.grid());
    for (std::size_t i = 0; i < V_pred.size(); ++i) V_pred[i] = hat_T[i] - s.phi_N[i];
    NT1 = nonlinear_T(hat_T, V_pred, sigma_pred, s.theta, p);
    NS1 = nonlinear_sigma(V_pred, pS, p);
    NM1 = nonlinear_M(V_pred, pM, sigma_pred, s.theta, p);
  }
  require_finite({&NT1, &NS1, &NM1}, "nonlinear_predicted", step);

  SimState next;
  {
    StageClock clock(slot(timings, &StageTimings::spectral));
    const ScalarField bar_T = correct(ops.T, hat_T, NT1, o.N_T);
    const ScalarField psi_S = correct(ops.sigma, pS, NS1, o.N_sigma);
    const ScalarField psi_M = correct(ops.M, pM, NM1, o.N_M);
    require_finite({&bar_T, &psi_S, &psi_M}, "corrector", step);
    next.phi_T = cutoff(bar_T);
    next.phi_sigma = phi_sigma_from_psi(psi_S, p.phi_sigma0_max);
    next.phi_M = phi_M_from_psi(psi_M);
  }
  finish_step(s, next, sigma_pred, cfg, p, step, timings);
  return next;
}

SimState advance(const SimState& s, const StepConfig& cfg, const StepOperators& ops, const ModelParams& p,
                 std::size_t step, StageTimings* timings) {
  return cfg.scheme == Scheme::etd1 ? etd1_step(s, cfg, ops, p, step, timings)
                                    : etdrk2_step(s, cfg, ops, p, step, timings);
}

ScalarField trapezoid_N(const ScalarField& phi_N_n, const ScalarField& phi_T_n, const ScalarField& phi_T_np1,
                        const ScalarField& phi_sigma_n, const ScalarField& phi_sigma_pred, const ModelParams& p,
                        double tau) {
  if (p.lambda_VN > 0.0 && tau > 2.0 / p.lambda_VN) {
    throw ConfigError(fmt::format("'tau' = {} exceeds 2/lambda_VN = {}", tau, 2.0 / p.lambda_VN));
  }
  require_same_grid(phi_N_n, phi_T_n, "trapezoid_N");
  require_same_grid(phi_N_n, phi_T_np1, "trapezoid_N");
  require_same_grid(phi_N_n, phi_sigma_n, "trapezoid_N");
  require_same_grid(phi_N_n, phi_sigma_pred, "trapezoid_N");
  ScalarField out(phi_N_n.grid());
  const double a = 0.5 * tau * p.lambda_VN;
  const long n = static_cast<long>(out.size());
  double* o = out.data();
  const double* N0 = phi_N_n.data();
  const double* T0 = phi_T_n.data();
  const double* T1 = phi_T_np1.data();
  const double* S0 = phi_sigma_n.data();
  const double* S1 = phi_sigma_pred.data();
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const double h0 = heaviside_smooth(p.sigma_VN - S0[i], p.eps1);
    const double h1 = heaviside_smooth(p.sigma_VN - S1[i], p.eps1);
    o[i] = ((1.0 - a * h0) * N0[i] + a * (h0 * T0[i] + h1 * T1[i])) / (1.0 + a * h1);
  }
  return out;
}

ScalarField trapezoid_theta(const ScalarField& theta_n, const ScalarField& phi_M_n, const ScalarField& phi_M_np1,
                            const ModelParams& p, double tau) {
  if (p.lambda_theta_deg > 0.0 && tau > 2.0 / p.lambda_theta_deg) {
    throw ConfigError(
        fmt::format("'tau' = {} exceeds 2/lambda_theta_deg = {}", tau, 2.0 / p.lambda_theta_deg));
  }
  require_same_grid(theta_n, phi_M_n, "trapezoid_theta");
  require_same_grid(theta_n, phi_M_np1, "trapezoid_theta");
  ScalarField out(theta_n.grid());
  const double a = 0.5 * tau * p.lambda_theta_deg;
  const long n = static_cast<long>(out.size());
  double* o = out.data();
  const double* th = theta_n.data();
  const double* m0 = phi_M_n.data();
  const double* m1 = phi_M_np1.data();
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) o[i] = th[i] * (1.0 - a * m0[i]) / (1.0 + a * m1[i]);
  return out;
}

std::string Violation::describe() const {
  return fmt::format("{} violated at node {}: value {:.17g}, bound {:.17g}", check, node, value, bound);
}

std::optional<Violation> check_invariants(const SimState* prev, const SimState& next, const ModelParams& p,
                                          double slack) {
  const std::size_t n = next.phi_T.size();
  const double s0 = p.phi_sigma0_max;
  for (std::size_t i = 0; i < n; ++i) {
    const double psi_s = 2.0 * next.phi_sigma[i] / s0 - 1.0;
    if (std::abs(psi_s) > 1.0 + slack) return Violation{"psi_sigma_norm", i, psi_s, 1.0};
    const double psi_m = 2.0 * next.phi_M[i] - 1.0;
    if (std::abs(psi_m) > 1.0 + slack) return Violation{"psi_M_norm", i, psi_m, 1.0};
    const double T = next.phi_T[i];
    if (T < -slack) return Violation{"phiT_ge_0", i, T, 0.0};
    if (T > 1.0 + slack) return Violation{"phiT_le_1", i, T, 1.0};
    const double N = next.phi_N[i];
    if (N < -slack) return Violation{"phiN_ge_0", i, N, 0.0};
    if (N > T + slack) return Violation{"phiN_le_phiT", i, N, T};
    const double th = next.theta[i];
    if (th < -slack) return Violation{"theta_ge_0", i, th, 0.0};
    if (th > p.theta0_max + slack) return Violation{"theta_le_max", i, th, p.theta0_max};
    if (prev && th > prev->theta[i] + slack) return Violation{"theta_nonincreasing", i, th, prev->theta[i]};
  }
  return std::nullopt;
}

}  // namespace tumorpf
