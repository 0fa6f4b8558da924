#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "tumorpf/dct.hpp"
#include "tumorpf/model.hpp"
#include "tumorpf/spectral.hpp"

namespace tumorpf {

enum class Scheme { etd1, etdrk2 };

Scheme parse_scheme(std::string_view name);
std::string_view to_string(Scheme scheme);

struct StepConfig {
  double tau = 1e-3;
  Scheme scheme = Scheme::etdrk2;
  // Reset the x = +1 node layer of phi_sigma to phi_sigma0_max after each step.
  bool nutrient_right_edge_source = false;

  // Rejects tau <= 0, tau > 2/lambda_VN and tau > 2/lambda_theta_deg.
  void validate(const ModelParams& params) const;
};

/// The three Upsilon tables sharing one transform plan.
struct StepOperators {
  std::shared_ptr<const DctTransform> dct;
  PhiTable T;
  PhiTable sigma;
  PhiTable M;
};

StepOperators make_step_operators(const GridSpec& grid, const ModelParams& params, double tau);

/// Accumulated wall time per stage group, in seconds.
struct StageTimings {
  double nonlinear = 0.0;
  double spectral = 0.0;
  double closed_form = 0.0;
};

SimState etdrk2_step(const SimState& state, const StepConfig& cfg, const StepOperators& ops,
                     const ModelParams& params, std::size_t step = 0, StageTimings* timings = nullptr);

SimState etd1_step(const SimState& state, const StepConfig& cfg, const StepOperators& ops,
                   const ModelParams& params, std::size_t step = 0, StageTimings* timings = nullptr);

// Dispatches on cfg.scheme.
SimState advance(const SimState& state, const StepConfig& cfg, const StepOperators& ops,
                 const ModelParams& params, std::size_t step = 0, StageTimings* timings = nullptr);

/// Closed form of the trapezoidal necrosis update
///   phi_N' = [(1 - a H_n) phi_N + a (H_n phi_T + H' phi_T')] / (1 + a H'),
/// a = tau lambda_VN / 2, H_n = H(sigma_VN - phi_sigma), H' = H(sigma_VN - phi_sigma_pred).
ScalarField trapezoid_N(const ScalarField& phi_N_n, const ScalarField& phi_T_n, const ScalarField& phi_T_np1,
                        const ScalarField& phi_sigma_n, const ScalarField& phi_sigma_pred,
                        const ModelParams& params, double tau);

/// theta' = theta (1 - a phi_M) / (1 + a phi_M'), a = tau lambda_theta_deg / 2.
ScalarField trapezoid_theta(const ScalarField& theta_n, const ScalarField& phi_M_n, const ScalarField& phi_M_np1,
                            const ModelParams& params, double tau);

struct Violation {
  std::string check;  // e.g. "psi_sigma_norm", "phiN_le_phiT"
  std::size_t node = 0;
  double value = 0.0;
  double bound = 0.0;

  std::string describe() const;
};

inline constexpr double kInvariantSlack = 1e-12;

/// First pointwise violation of the structure properties in `next`, or nullopt.
/// With `prev` given, theta must also be nonincreasing node by node.
std::optional<Violation> check_invariants(const SimState* prev, const SimState& next, const ModelParams& params,
                                          double slack = kInvariantSlack);

}  // namespace tumorpf
