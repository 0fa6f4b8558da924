#include "tumorpf/dct.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "tumorpf/errors.hpp"

namespace tumorpf {

namespace {

// FFTW's planner is not thread-safe; execution with the new-array API is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n_real, std::size_t n_complex)
      : real(static_cast<double*>(fftw_malloc(sizeof(double) * n_real))),
        spec(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_complex))) {}
  ~FftwBuffer() {
    fftw_free(real);
    fftw_free(spec);
  }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  double* real;
  fftw_complex* spec;
};

}  // namespace

std::vector<double> laplacian_eigs(const GridSpec& grid) {
  const int n = grid.cells();
  const double h = grid.spacing();
  std::vector<double> d(static_cast<std::size_t>(n + 1));
  for (int k = 0; k <= n; ++k) {
    const double s = std::sin(k * std::numbers::pi / (2.0 * n));
    d[static_cast<std::size_t>(k)] = -4.0 / (h * h) * s * s;
  }
  return d;
}

struct DctTransform::Plan {
  fftw_plan r2c = nullptr;
};

DctTransform::DctTransform(const GridSpec& grid) : grid_(grid), plan_(std::make_unique<Plan>()) {
  const int n = grid_.cells();
  {
    FftwBuffer probe(static_cast<std::size_t>(2 * n), static_cast<std::size_t>(n + 1));
    std::lock_guard lock(planner_mutex());
    // ESTIMATE keeps the plan (and thus the rounding) identical from run to run.
    plan_->r2c = fftw_plan_dft_r2c_1d(2 * n, probe.real, probe.spec, FFTW_ESTIMATE);
  }
  if (plan_->r2c == nullptr) throw ConfigError("FFTW could not plan a transform of size " + std::to_string(2 * n));

  const int np = grid_.nodes_per_axis();
  line_starts_.resize(static_cast<std::size_t>(grid_.dim()));
  for (int axis = 0; axis < grid_.dim(); ++axis) {
    auto& starts = line_starts_[static_cast<std::size_t>(axis)];
    starts.reserve(grid_.size() / static_cast<std::size_t>(np));
    for (std::size_t idx = 0; idx < grid_.size(); ++idx) {
      if (grid_.unflatten(idx)[static_cast<std::size_t>(axis)] == 0) starts.push_back(idx);
    }
  }
}

DctTransform::~DctTransform() {
  if (plan_ && plan_->r2c) {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_->r2c);
  }
}

void DctTransform::transform_axis(double* data, int axis) const {
  const int n = grid_.cells();
  const std::size_t stride = grid_.stride(axis);
  const auto& starts = line_starts_[static_cast<std::size_t>(axis)];
  const long lines = static_cast<long>(starts.size());
  fftw_plan plan = plan_->r2c;
#pragma omp parallel
  {
    FftwBuffer buf(static_cast<std::size_t>(2 * n), static_cast<std::size_t>(n + 1));
#pragma omp for schedule(static)
    for (long line = 0; line < lines; ++line) {
      double* base = data + starts[static_cast<std::size_t>(line)];
      // [f_0 .. f_N, f_{N-1} .. f_1]
      for (int i = 0; i <= n; ++i) buf.real[i] = base[static_cast<std::size_t>(i) * stride];
      for (int i = 1; i < n; ++i) buf.real[n + i] = base[static_cast<std::size_t>(n - i) * stride];
      fftw_execute_dft_r2c(plan, buf.real, buf.spec);
      for (int k = 0; k <= n; ++k) base[static_cast<std::size_t>(k) * stride] = 0.5 * buf.spec[k][0];
    }
  }
}

void DctTransform::forward_inplace(std::vector<double>& v) const {
  if (v.size() != grid_.size()) {
    throw ConfigError("DCT input length " + std::to_string(v.size()) + " does not match grid size " +
                      std::to_string(grid_.size()));
  }
  for (int axis = 0; axis < grid_.dim(); ++axis) transform_axis(v.data(), axis);
}

void DctTransform::inverse_inplace(std::vector<double>& v) const {
  forward_inplace(v);
  const double scale = std::pow(2.0 / grid_.cells(), grid_.dim());
  for (double& x : v) x *= scale;
}

ScalarField DctTransform::forward(const ScalarField& f) const {
  if (!(f.grid() == grid_)) throw ConfigError("DCT applied to a field on a different grid");
  std::vector<double> v(f.values().begin(), f.values().end());
  forward_inplace(v);
  return ScalarField(grid_, std::move(v));
}

ScalarField DctTransform::inverse(const ScalarField& coeffs) const {
  if (!(coeffs.grid() == grid_)) throw ConfigError("inverse DCT applied to coefficients on a different grid");
  std::vector<double> v(coeffs.values().begin(), coeffs.values().end());
  inverse_inplace(v);
  return ScalarField(grid_, std::move(v));
}

}  // namespace tumorpf
