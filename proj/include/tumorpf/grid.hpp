#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace tumorpf {

/// Node-centred uniform grid on [-1,1]^dim with N cells (N+1 nodes) per axis.
///
/// Storage is row-major with x varying fastest:
///   index(i, j, k) = i + (N+1) * (j + (N+1) * k).
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(int dim, int cells_per_axis);

  int dim() const noexcept { return dim_; }
  int cells() const noexcept { return n_; }
  int nodes_per_axis() const noexcept { return n_ + 1; }
  double spacing() const noexcept { return h_; }
  std::size_t size() const noexcept { return size_; }

  std::size_t index(int i, int j, int k = 0) const noexcept {
    const auto n = static_cast<std::size_t>(n_ + 1);
    return static_cast<std::size_t>(i) + n * (static_cast<std::size_t>(j) + n * static_cast<std::size_t>(k));
  }

  // Stride of one step along the given axis.
  std::size_t stride(int axis) const noexcept {
    std::size_t s = 1;
    for (int a = 0; a < axis; ++a) s *= static_cast<std::size_t>(n_ + 1);
    return s;
  }

  double coord(int i) const noexcept { return -1.0 + i * h_; }

  // Integer node coordinates of a flat index; unused axes are 0.
  std::array<int, 3> unflatten(std::size_t idx) const noexcept;

  // Trapezoidal quadrature weight of a node (h^dim times 1/2 per boundary axis).
  double quadrature_weight(std::size_t idx) const noexcept;

  bool operator==(const GridSpec& other) const noexcept {
    return dim_ == other.dim_ && n_ == other.n_;
  }

 private:
  int dim_ = 2;
  int n_ = 4;
  double h_ = 0.5;
  std::size_t size_ = 25;
};

/// Node values of one physical field on a GridSpec.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const GridSpec& grid, double value = 0.0)
      : grid_(grid), data_(grid.size(), value) {}
  ScalarField(const GridSpec& grid, std::vector<double> data);

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  double max() const;
  double min() const;
  double max_abs() const;
  bool all_finite() const;

 private:
  GridSpec grid_;
  std::vector<double> data_;
};

// Throws ConfigError naming `what` when the grids differ.
void require_same_grid(const ScalarField& a, const ScalarField& b, const char* what);

}  // namespace tumorpf
