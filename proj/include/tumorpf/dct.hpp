#pragma once

#include <memory>
#include <vector>

#include "tumorpf/grid.hpp"

namespace tumorpf {

/// Eigenvalues of the 1D mirror-ghost Neumann Laplacian on N+1 nodes:
/// d_k = -(4/h^2) sin^2(k pi / (2N)), k = 0..N (zero-based).
std::vector<double> laplacian_eigs(const GridSpec& grid);

/// Separable cosine transform that diagonalises the Neumann stencil operators.
///
/// Along each axis a line (f_0..f_N) is extended by its reflection
/// (f_{N-1}..f_1) to length 2N, pushed through a real 2N-point FFT, and the
/// real parts of the first N+1 outputs are halved. The inverse is the same
/// transform scaled by 2/N per axis.
///
/// Plans are built once; forward/inverse are const and reentrant.
class DctTransform {
 public:
  explicit DctTransform(const GridSpec& grid);
  ~DctTransform();
  DctTransform(const DctTransform&) = delete;
  DctTransform& operator=(const DctTransform&) = delete;

  const GridSpec& grid() const noexcept { return grid_; }

  ScalarField forward(const ScalarField& f) const;
  ScalarField inverse(const ScalarField& coeffs) const;

  // In-place variants on a buffer of grid().size() values.
  void forward_inplace(std::vector<double>& v) const;
  void inverse_inplace(std::vector<double>& v) const;

 private:
  void transform_axis(double* data, int axis) const;

  GridSpec grid_;
  struct Plan;
  std::unique_ptr<Plan> plan_;
  // Flat index of the first node of every line along each axis.
  std::vector<std::vector<std::size_t>> line_starts_;
};

}  // namespace tumorpf
