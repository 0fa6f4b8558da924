#include "tumorpf/spectral.hpp"

#include <cmath>
#include <string>

#include <fmt/format.h>

#include "tumorpf/errors.hpp"

namespace tumorpf {

OperatorKind parse_operator_kind(std::string_view name) {
  if (name == "phase_field") return OperatorKind::phase_field;
  if (name == "nutrient") return OperatorKind::nutrient;
  if (name == "mde") return OperatorKind::mde;
  throw ConfigError(fmt::format("unknown operator kind '{}'", name));
}

std::string_view to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::phase_field:
      return "phase_field";
    case OperatorKind::nutrient:
      return "nutrient";
    case OperatorKind::mde:
      return "mde";
  }
  return "unknown";
}

namespace {

// sum_{k>=0} (-x)^k / (k + offset)!, 14 terms in Horner form. At the 0.25
// threshold the first dropped term is below 1e-26.
double upsilon_series(double x, int offset) {
  constexpr int kTerms = 14;
  double fact = 1.0;
  for (int j = 2; j <= offset; ++j) fact *= j;
  // coefficients c_k = 1/(k+offset)!
  double coeff[kTerms];
  coeff[0] = 1.0 / fact;
  for (int k = 1; k < kTerms; ++k) coeff[k] = coeff[k - 1] / (k + offset);
  double acc = coeff[kTerms - 1];
  for (int k = kTerms - 2; k >= 0; --k) acc = coeff[k] - x * acc;
  return acc;
}

}  // namespace

double upsilon(int i, double x) {
  if (!(x >= 0.0)) throw DomainError(fmt::format("upsilon argument must be >= 0, got {}", x));
  switch (i) {
    case 0:
      return std::exp(-x);
    case 1:
      if (x < kUpsilonSeriesThreshold) return upsilon_series(x, 1);
      return -std::expm1(-x) / x;
    case 2:
      if (x < kUpsilonSeriesThreshold) return upsilon_series(x, 2);
      return (std::expm1(-x) + x) / (x * x);
    default:
      throw DomainError(fmt::format("upsilon index must be 0, 1 or 2, got {}", i));
  }
}

std::vector<double> laplacian_symbol(const GridSpec& grid) {
  const std::vector<double> d = laplacian_eigs(grid);
  std::vector<double> s(grid.size());
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const auto c = grid.unflatten(idx);
    double acc = 0.0;
    for (int a = 0; a < grid.dim(); ++a) acc += d[static_cast<std::size_t>(c[static_cast<std::size_t>(a)])];
    s[idx] = acc;
  }
  return s;
}

ScalarField apply_multiplier(const DctTransform& dct, const std::vector<double>& mult, const ScalarField& f) {
  if (!(f.grid() == dct.grid())) throw ConfigError("spectral multiplier applied to a field on a different grid");
  std::vector<double> v(f.values().begin(), f.values().end());
  dct.forward_inplace(v);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= mult[i];
  dct.inverse_inplace(v);
  return ScalarField(f.grid(), std::move(v));
}

SpectralOperator::SpectralOperator(const GridSpec& grid, OperatorKind kind, std::vector<double> eigs)
    : grid_(grid), kind_(kind), eigs_(std::move(eigs)) {
  if (eigs_.size() != grid_.size()) throw ConfigError("operator eigenvalue table has the wrong length");
}

SpectralOperator build_operator(const GridSpec& grid, OperatorKind kind, const ModelParams& params) {
  std::vector<double> eigs = laplacian_symbol(grid);
  switch (kind) {
    case OperatorKind::phase_field: {
      const double k1 = params.kappa_T1();
      const double k2 = params.kappa_T2();
      for (double& s : eigs) s = -k1 * s + k2 * s * s;
      break;
    }
    case OperatorKind::nutrient: {
      const double kappa = params.kappa_sigma();
      const double diff = params.nutrient_diffusivity();
      for (double& s : eigs) s = kappa - diff * s;
      break;
    }
    case OperatorKind::mde: {
      const double kappa = params.kappa_M();
      for (double& s : eigs) s = kappa - params.M_M * s;
      break;
    }
  }
  return SpectralOperator(grid, kind, std::move(eigs));
}

PhiTable::PhiTable(std::shared_ptr<const DctTransform> dct, SpectralOperator op, double tau)
    : dct_(std::move(dct)), op_(std::move(op)), tau_(tau) {
  if (!dct_ || !(dct_->grid() == op_.grid())) throw ConfigError("PhiTable: transform and operator grids differ");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError(fmt::format("time step 'tau' must be > 0, got {}", tau));
  for (int i = 0; i < 3; ++i) {
    auto& t = tables_[static_cast<std::size_t>(i)];
    t.resize(op_.eigs().size());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = upsilon(i, op_.eigs()[k] * tau_);
  }
}

const std::vector<double>& PhiTable::table(int i) const {
  if (i < 0 || i > 2) throw DomainError(fmt::format("upsilon index must be 0, 1 or 2, got {}", i));
  return tables_[static_cast<std::size_t>(i)];
}

ScalarField PhiTable::apply(int i, const ScalarField& f) const {
  if (!(f.grid() == grid())) throw ConfigError("apply_phi: field grid does not match the table");
  return apply_multiplier(*dct_, table(i), f);
}

ScalarField PhiTable::etd_predictor(const ScalarField& x, const ScalarField& n) const {
  if (!(x.grid() == grid()) || !(n.grid() == grid())) {
    throw ConfigError("etd_predictor: field grid does not match the table");
  }
  std::vector<double> xv(x.values().begin(), x.values().end());
  std::vector<double> nv(n.values().begin(), n.values().end());
  dct_->forward_inplace(xv);
  dct_->forward_inplace(nv);
  const auto& u0 = tables_[0];
  const auto& u1 = tables_[1];
  for (std::size_t k = 0; k < xv.size(); ++k) xv[k] = u0[k] * xv[k] + tau_ * u1[k] * nv[k];
  dct_->inverse_inplace(xv);
  return ScalarField(grid(), std::move(xv));
}

ScalarField apply_phi(const PhiTable& table, int i, const ScalarField& f) { return table.apply(i, f); }

}  // namespace tumorpf
