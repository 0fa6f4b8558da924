#include "tumorpf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tumorpf/errors.hpp"

namespace tumorpf {

GridSpec::GridSpec(int dim, int cells_per_axis) : dim_(dim), n_(cells_per_axis) {
  if (dim != 2 && dim != 3) {
    throw ConfigError("grid dimension must be 2 or 3, got " + std::to_string(dim));
  }
  if (cells_per_axis < 4) {
    throw ConfigError("cells per axis must be >= 4, got " + std::to_string(cells_per_axis));
  }
  h_ = 2.0 / n_;
  size_ = 1;
  for (int a = 0; a < dim_; ++a) size_ *= static_cast<std::size_t>(n_ + 1);
}

std::array<int, 3> GridSpec::unflatten(std::size_t idx) const noexcept {
  const auto n = static_cast<std::size_t>(n_ + 1);
  std::array<int, 3> c{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    c[static_cast<std::size_t>(a)] = static_cast<int>(idx % n);
    idx /= n;
  }
  return c;
}

double GridSpec::quadrature_weight(std::size_t idx) const noexcept {
  const auto c = unflatten(idx);
  double w = 1.0;
  for (int a = 0; a < dim_; ++a) {
    const int ci = c[static_cast<std::size_t>(a)];
    w *= (ci == 0 || ci == n_) ? 0.5 * h_ : h_;
  }
  return w;
}

ScalarField::ScalarField(const GridSpec& grid, std::vector<double> data)
    : grid_(grid), data_(std::move(data)) {
  if (data_.size() != grid_.size()) {
    throw ConfigError("field length " + std::to_string(data_.size()) + " does not match grid size " +
                      std::to_string(grid_.size()));
  }
}

double ScalarField::max() const { return *std::max_element(data_.begin(), data_.end()); }

double ScalarField::min() const { return *std::min_element(data_.begin(), data_.end()); }

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool ScalarField::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* what) {
  if (!(a.grid() == b.grid())) {
    throw ConfigError(std::string("grid mismatch in ") + what);
  }
}

}  // namespace tumorpf
