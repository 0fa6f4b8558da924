#pragma once

#include <array>
#include <memory>
#include <string_view>
#include <vector>

#include "tumorpf/dct.hpp"
#include "tumorpf/grid.hpp"
#include "tumorpf/model.hpp"

namespace tumorpf {

enum class OperatorKind { phase_field, nutrient, mde };

OperatorKind parse_operator_kind(std::string_view name);
std::string_view to_string(OperatorKind kind);

/// Exponential-integrator kernels for x >= 0:
///   upsilon(0,x) = e^{-x}
///   upsilon(1,x) = (1 - e^{-x}) / x
///   upsilon(2,x) = (e^{-x} - 1 + x) / x^2
/// with Taylor series below kUpsilonSeriesThreshold. Throws DomainError for
/// x < 0 or i outside {0,1,2}.
double upsilon(int i, double x);

inline constexpr double kUpsilonSeriesThreshold = 0.25;

/// Sum of the per-axis Laplacian eigenvalues at every spectral index, laid out
/// like a ScalarField.
std::vector<double> laplacian_symbol(const GridSpec& grid);

/// iDCT(mult * DCT(f)).
ScalarField apply_multiplier(const DctTransform& dct, const std::vector<double>& mult, const ScalarField& f);

/// Eigenvalues of one stabilised linear operator:
///   phase_field: -kappa_T1 s + kappa_T2 s^2
///   nutrient:    kappa_sigma - (M_sigma / delta_sigma) s
///   mde:         kappa_M - M_M s
/// where s is the Laplacian symbol.
class SpectralOperator {
 public:
  SpectralOperator(const GridSpec& grid, OperatorKind kind, std::vector<double> eigs);

  const GridSpec& grid() const noexcept { return grid_; }
  OperatorKind kind() const noexcept { return kind_; }
  const std::vector<double>& eigs() const noexcept { return eigs_; }

 private:
  GridSpec grid_;
  OperatorKind kind_;
  std::vector<double> eigs_;
};

SpectralOperator build_operator(const GridSpec& grid, OperatorKind kind, const ModelParams& params);

/// Upsilon_0/1/2(lambda tau) tabulated over the spectrum of one operator.
/// Immutable; application is reentrant.
class PhiTable {
 public:
  PhiTable(std::shared_ptr<const DctTransform> dct, SpectralOperator op, double tau);

  const SpectralOperator& op() const noexcept { return op_; }
  const GridSpec& grid() const noexcept { return op_.grid(); }
  double tau() const noexcept { return tau_; }
  const std::vector<double>& table(int i) const;

  // iDCT(Upsilon_i * DCT(f))
  ScalarField apply(int i, const ScalarField& f) const;

  // Upsilon_0 x + tau Upsilon_1 n, with a single inverse transform.
  ScalarField etd_predictor(const ScalarField& x, const ScalarField& n) const;

 private:
  std::shared_ptr<const DctTransform> dct_;
  SpectralOperator op_;
  double tau_;
  std::array<std::vector<double>, 3> tables_;
};

ScalarField apply_phi(const PhiTable& table, int i, const ScalarField& f);

}  // namespace tumorpf
