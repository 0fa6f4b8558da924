#include "tumorpf/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include <fmt/format.h>

#include "tumorpf/errors.hpp"
#include "tumorpf/stencil.hpp"

namespace tumorpf {

namespace {

using Member = double ModelParams::*;

const std::array<std::pair<const char*, Member>, 23>& member_table() {
  static const std::array<std::pair<const char*, Member>, 23> table{{
      {"eps_T", &ModelParams::eps_T},
      {"E_bar", &ModelParams::E_bar},
      {"M_T", &ModelParams::M_T},
      {"M_M", &ModelParams::M_M},
      {"M_sigma", &ModelParams::M_sigma},
      {"delta_sigma", &ModelParams::delta_sigma},
      {"chi_H", &ModelParams::chi_H},
      {"lambda_T_pro", &ModelParams::lambda_T_pro},
      {"lambda_T_apo", &ModelParams::lambda_T_apo},
      {"lambda_VN", &ModelParams::lambda_VN},
      {"lambda_sigma", &ModelParams::lambda_sigma},
      {"lambda_M_pro", &ModelParams::lambda_M_pro},
      {"lambda_M_dec", &ModelParams::lambda_M_dec},
      {"lambda_theta_deg", &ModelParams::lambda_theta_deg},
      {"lambda_theta_dec", &ModelParams::lambda_theta_dec},
      {"sigma_VN", &ModelParams::sigma_VN},
      {"sigma_H", &ModelParams::sigma_H},
      {"eps1", &ModelParams::eps1},
      {"C_stab", &ModelParams::C_stab},
      {"beta_sigma", &ModelParams::beta_sigma},
      {"beta_M", &ModelParams::beta_M},
      {"phi_sigma0_max", &ModelParams::phi_sigma0_max},
      {"theta0_max", &ModelParams::theta0_max},
  }};
  return table;
}

template <class Fn>
ScalarField pointwise(const GridSpec& g, Fn fn) {
  ScalarField out(g);
  double* o = out.data();
  const long n = static_cast<long>(g.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) o[i] = fn(static_cast<std::size_t>(i));
  return out;
}

}  // namespace

void ModelParams::validate() const {
  for (const auto& [name, member] : member_table()) {
    const double v = this->*member;
    if (!std::isfinite(v)) throw ConfigError(fmt::format("parameter '{}' must be finite", name));
    if (v < 0.0) throw ConfigError(fmt::format("parameter '{}' must be >= 0, got {}", name, v));
  }
  const std::array<std::pair<const char*, double>, 7> positive{{
      {"eps_T", eps_T},
      {"E_bar", E_bar},
      {"M_sigma", M_sigma},
      {"delta_sigma", delta_sigma},
      {"M_M", M_M},
      {"eps1", eps1},
      {"phi_sigma0_max", phi_sigma0_max},
  }};
  for (const auto& [name, v] : positive) {
    if (!(v > 0.0)) throw ConfigError(fmt::format("parameter '{}' must be > 0, got {}", name, v));
  }
  if (beta_sigma < 1.0) throw ConfigError("parameter 'beta_sigma' must be >= 1");
  if (beta_M < 1.0) throw ConfigError("parameter 'beta_M' must be >= 1");
  if (kappa_sigma_override && !(*kappa_sigma_override >= kappa_sigma_min())) {
    throw ConfigError(fmt::format("parameter 'kappa_sigma' = {} is below its lower bound lambda_sigma = {}",
                                  *kappa_sigma_override, kappa_sigma_min()));
  }
  if (kappa_M_override && !(*kappa_M_override >= kappa_M_min())) {
    throw ConfigError(fmt::format("parameter 'kappa_M' = {} is below its lower bound {}", *kappa_M_override,
                                  kappa_M_min()));
  }
}

void ModelParams::set(std::string_view key, double value) {
  if (key == "D_sigma") key = "M_sigma";
  if (key == "kappa_sigma") {
    kappa_sigma_override = value;
    return;
  }
  if (key == "kappa_M") {
    kappa_M_override = value;
    return;
  }
  for (const auto& [name, member] : member_table()) {
    if (key == name) {
      this->*member = value;
      return;
    }
  }
  throw ConfigError(fmt::format("unknown parameter '{}'", key));
}

std::optional<double> ModelParams::get(std::string_view key) const {
  if (key == "D_sigma") key = "M_sigma";
  if (key == "kappa_sigma") return kappa_sigma();
  if (key == "kappa_M") return kappa_M();
  for (const auto& [name, member] : member_table()) {
    if (key == name) return this->*member;
  }
  return std::nullopt;
}

const std::vector<std::string>& ModelParams::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, member] : member_table()) v.emplace_back(name);
    return v;
  }();
  return names;
}

double heaviside_smooth(double x, double eps1) {
  return 0.5 * (1.0 + (2.0 / std::numbers::pi) * std::atan(x / eps1));
}

double cutoff(double v) noexcept { return std::max(0.0, std::min(1.0, v)); }

ScalarField cutoff(const ScalarField& f) {
  const double* in = f.data();
  return pointwise(f.grid(), [in](std::size_t i) { return cutoff(in[i]); });
}

double mobility(double phi_V, double M_T) noexcept {
  return M_T * phi_V * phi_V * (1.0 - phi_V) * (1.0 - phi_V);
}

ScalarField viable_fraction(const ScalarField& phi_T, const ScalarField& phi_N) {
  require_same_grid(phi_T, phi_N, "viable_fraction");
  const double* t = phi_T.data();
  const double* n = phi_N.data();
  return pointwise(phi_T.grid(), [=](std::size_t i) { return cutoff(t[i]) - n[i]; });
}

ScalarField chemical_potential(const ScalarField& phi_T, const ModelParams& p) {
  const ScalarField lap = laplacian(phi_T);
  const double* f = phi_T.data();
  const double* l = lap.data();
  const double e2 = p.eps_T * p.eps_T;
  return pointwise(phi_T.grid(), [=, &p](std::size_t i) {
    const double v = f[i];
    return p.E_bar * (4.0 * v * v * v - 6.0 * v * v + 2.0 * v) - e2 * l[i];
  });
}

namespace {

// Shared assembly: returns the unstabilised RHS and, when lap_out is given,
// the Laplacian of phi_T used for mu.
ScalarField assemble_rhs(const ScalarField& phi_T, const ScalarField& phi_V, const ScalarField& phi_sigma,
                         const ScalarField& theta, const ModelParams& p, ScalarField* lap_out) {
  require_same_grid(phi_T, phi_V, "nonlinear_T");
  require_same_grid(phi_T, phi_sigma, "nonlinear_T");
  require_same_grid(phi_T, theta, "nonlinear_T");
  const GridSpec& g = phi_T.grid();

  ScalarField lap = laplacian(phi_T);
  const double e2 = p.eps_T * p.eps_T;
  const double* f = phi_T.data();
  const double* l = lap.data();
  const ScalarField mu = pointwise(g, [=, &p](std::size_t i) {
    const double v = f[i];
    return p.E_bar * (4.0 * v * v * v - 6.0 * v * v + 2.0 * v) - e2 * l[i];
  });

  const ScalarField mass_flux = div_degenerate_mobility_grad(phi_V, mu, p.M_T);
  const ScalarField hapto_flux = div_mobility_grad(phi_V, theta, p.chi_H);

  const double* mf = mass_flux.data();
  const double* hf = hapto_flux.data();
  const double* pv = phi_V.data();
  const double* ps = phi_sigma.data();
  ScalarField rhs = pointwise(g, [=, &p](std::size_t i) {
    return mf[i] - hf[i] + p.lambda_T_pro * ps[i] * pv[i] * (1.0 - f[i]) - p.lambda_T_apo * pv[i];
  });
  if (lap_out) *lap_out = std::move(lap);
  return rhs;
}

}  // namespace

ScalarField phase_field_rhs(const ScalarField& phi_T, const ScalarField& phi_V, const ScalarField& phi_sigma,
                            const ScalarField& theta, const ModelParams& p) {
  return assemble_rhs(phi_T, phi_V, phi_sigma, theta, p, nullptr);
}

ScalarField nonlinear_T(const ScalarField& phi_T, const ScalarField& phi_V, const ScalarField& phi_sigma,
                        const ScalarField& theta, const ModelParams& p) {
  ScalarField lap;
  ScalarField out = assemble_rhs(phi_T, phi_V, phi_sigma, theta, p, &lap);
  const ScalarField bilap = laplacian(lap);
  const double k1 = p.kappa_T1();
  const double k2 = p.kappa_T2();
  double* o = out.data();
  const double* l = lap.data();
  const double* b = bilap.data();
  const long n = static_cast<long>(out.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) o[i] += -k1 * l[i] + k2 * b[i];
  return out;
}

double nonlinear_sigma(double phi_V, double psi_sigma, const ModelParams& p) noexcept {
  return p.kappa_sigma() * psi_sigma - p.lambda_sigma * phi_V * (psi_sigma + 1.0);
}

ScalarField nonlinear_sigma(const ScalarField& phi_V, const ScalarField& psi_sigma, const ModelParams& p) {
  require_same_grid(phi_V, psi_sigma, "nonlinear_sigma");
  const double* v = phi_V.data();
  const double* s = psi_sigma.data();
  return pointwise(phi_V.grid(), [=, &p](std::size_t i) { return nonlinear_sigma(v[i], s[i], p); });
}

double nonlinear_M(double phi_V, double psi_M, double phi_sigma, double theta, const ModelParams& p) noexcept {
  const double production = p.lambda_M_pro * phi_V * theta * p.sigma_H / (p.sigma_H + phi_sigma);
  return p.kappa_M() * psi_M - p.lambda_M_dec * (psi_M + 1.0) + production * (1.0 - psi_M) -
         p.lambda_theta_dec * theta * (psi_M + 1.0);
}

ScalarField nonlinear_M(const ScalarField& phi_V, const ScalarField& psi_M, const ScalarField& phi_sigma,
                        const ScalarField& theta, const ModelParams& p) {
  require_same_grid(phi_V, psi_M, "nonlinear_M");
  require_same_grid(phi_V, phi_sigma, "nonlinear_M");
  require_same_grid(phi_V, theta, "nonlinear_M");
  const double* v = phi_V.data();
  const double* m = psi_M.data();
  const double* s = phi_sigma.data();
  const double* th = theta.data();
  return pointwise(phi_V.grid(), [=, &p](std::size_t i) { return nonlinear_M(v[i], m[i], s[i], th[i], p); });
}

ScalarField psi_sigma_from_phi(const ScalarField& phi_sigma, double phi_sigma0_max) {
  if (!(phi_sigma0_max > 0.0)) throw ConfigError("parameter 'phi_sigma0_max' must be > 0");
  const double* s = phi_sigma.data();
  return pointwise(phi_sigma.grid(), [=](std::size_t i) { return 2.0 * s[i] / phi_sigma0_max - 1.0; });
}

ScalarField phi_sigma_from_psi(const ScalarField& psi_sigma, double phi_sigma0_max) {
  if (!(phi_sigma0_max > 0.0)) throw ConfigError("parameter 'phi_sigma0_max' must be > 0");
  const double* s = psi_sigma.data();
  return pointwise(psi_sigma.grid(), [=](std::size_t i) { return phi_sigma0_max * (s[i] + 1.0) / 2.0; });
}

ScalarField psi_M_from_phi(const ScalarField& phi_M) {
  const double* m = phi_M.data();
  return pointwise(phi_M.grid(), [=](std::size_t i) { return 2.0 * m[i] - 1.0; });
}

ScalarField phi_M_from_psi(const ScalarField& psi_M) {
  const double* m = psi_M.data();
  return pointwise(psi_M.grid(), [=](std::size_t i) { return (m[i] + 1.0) / 2.0; });
}

}  // namespace tumorpf
