#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tumorpf/grid.hpp"

namespace tumorpf {

/// Dimensionless model parameters. Defaults are the baseline tumour.
///
/// The stabilisation constants are derived:
///   kappa_T1    = 2 M_T E_bar
///   kappa_T2    = (C_stab eps_T)^2
///   kappa_sigma = lambda_sigma                                  (lower bound)
///   kappa_M     = lambda_M_dec + (lambda_M_pro + lambda_theta_dec) theta0_max
/// kappa_sigma and kappa_M may be raised above their lower bound but never below.
struct ModelParams {
  double eps_T = 0.005;
  double E_bar = 0.045;
  double M_T = 2.0;
  double M_M = 0.1;
  double M_sigma = 0.001;  // tabulated as the nutrient coefficient D_sigma
  double delta_sigma = 0.01;
  double chi_H = 0.001;
  double lambda_T_pro = 2.0;
  double lambda_T_apo = 0.005;
  double lambda_VN = 1.0;
  double lambda_sigma = 1.5;
  double lambda_M_pro = 1.0;
  double lambda_M_dec = 1.0;
  double lambda_theta_deg = 1.0;
  double lambda_theta_dec = 0.1;
  double sigma_VN = 0.44;
  double sigma_H = 0.6;
  double eps1 = 1e-3;
  double C_stab = 0.125;
  double beta_sigma = 1.0;
  double beta_M = 1.0;
  double phi_sigma0_max = 1.0;
  double theta0_max = 1.0;

  std::optional<double> kappa_sigma_override;
  std::optional<double> kappa_M_override;

  double kappa_T1() const noexcept { return 2.0 * M_T * E_bar; }
  double kappa_T2() const noexcept { return (C_stab * eps_T) * (C_stab * eps_T); }
  double kappa_sigma_min() const noexcept { return lambda_sigma; }
  double kappa_M_min() const noexcept {
    return lambda_M_dec + lambda_M_pro * theta0_max + lambda_theta_dec * theta0_max;
  }
  double kappa_sigma() const noexcept { return kappa_sigma_override.value_or(kappa_sigma_min()); }
  double kappa_M() const noexcept { return kappa_M_override.value_or(kappa_M_min()); }
  double nutrient_diffusivity() const noexcept { return M_sigma / delta_sigma; }

  // Throws ConfigError naming the first offending parameter.
  void validate() const;

  // Named access used by config files and --set overrides. "D_sigma" is an
  // alias of M_sigma; "kappa_sigma"/"kappa_M" set the overrides.
  void set(std::string_view key, double value);
  std::optional<double> get(std::string_view key) const;
  static const std::vector<std::string>& keys();
};

/// The five evolved fields at one time level.
struct SimState {
  double t = 0.0;
  ScalarField phi_T;
  ScalarField phi_N;
  ScalarField phi_sigma;
  ScalarField phi_M;
  ScalarField theta;

  const GridSpec& grid() const { return phi_T.grid(); }
};

// Smooth Heaviside 1/2 (1 + (2/pi) atan(x / eps1)), strictly inside (0,1).
double heaviside_smooth(double x, double eps1);

double cutoff(double v) noexcept;
// Pointwise clamp to [0,1].
ScalarField cutoff(const ScalarField& f);

// Degenerate cell mobility M_T phi^2 (1-phi)^2.
double mobility(double phi_V, double M_T) noexcept;

// phi_V = cutoff(phi_T) - phi_N
ScalarField viable_fraction(const ScalarField& phi_T, const ScalarField& phi_N);

// mu = E_bar (4 phi^3 - 6 phi^2 + 2 phi) - eps_T^2 lap(phi)
ScalarField chemical_potential(const ScalarField& phi_T, const ModelParams& p);

// Nonlinear part of the stabilised phase-field equation
//   d_t phi_T + (-kappa_T1 lap + kappa_T2 lap^2) phi_T = N_T.
ScalarField nonlinear_T(const ScalarField& phi_T, const ScalarField& phi_V,
                        const ScalarField& phi_sigma, const ScalarField& theta,
                        const ModelParams& p);

// Right-hand side of the phase-field equation without stabilisation: mobility
// flux minus haptotaxis flux plus proliferation minus apoptosis.
ScalarField phase_field_rhs(const ScalarField& phi_T, const ScalarField& phi_V,
                            const ScalarField& phi_sigma, const ScalarField& theta,
                            const ModelParams& p);

double nonlinear_sigma(double phi_V, double psi_sigma, const ModelParams& p) noexcept;
ScalarField nonlinear_sigma(const ScalarField& phi_V, const ScalarField& psi_sigma,
                            const ModelParams& p);

double nonlinear_M(double phi_V, double psi_M, double phi_sigma, double theta,
                   const ModelParams& p) noexcept;
ScalarField nonlinear_M(const ScalarField& phi_V, const ScalarField& psi_M,
                        const ScalarField& phi_sigma, const ScalarField& theta,
                        const ModelParams& p);

// Affine maps between physical fields and their [-1,1] images.
ScalarField psi_sigma_from_phi(const ScalarField& phi_sigma, double phi_sigma0_max);
ScalarField phi_sigma_from_psi(const ScalarField& psi_sigma, double phi_sigma0_max);
ScalarField psi_M_from_phi(const ScalarField& phi_M);
ScalarField phi_M_from_psi(const ScalarField& psi_M);

}  // namespace tumorpf
