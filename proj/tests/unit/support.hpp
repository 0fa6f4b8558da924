#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "tumorpf/grid.hpp"
#include "tumorpf/model.hpp"
#include "tumorpf/spectral.hpp"

namespace tumorpf::testing {

inline ScalarField random_field(const GridSpec& g, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  ScalarField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = dist(rng);
  return f;
}

template <class Fn>
ScalarField sample(const GridSpec& g, Fn fn) {
  ScalarField f(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto c = g.unflatten(idx);
    f[idx] = fn(g.coord(c[0]), g.coord(c[1]), g.dim() == 3 ? g.coord(c[2]) : 0.0);
  }
  return f;
}

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline Eigen::VectorXd to_eigen(const ScalarField& f) {
  return Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
}

inline ScalarField from_eigen(const GridSpec& g, const Eigen::VectorXd& v) {
  return ScalarField(g, std::vector<double>(v.data(), v.data() + v.size()));
}

// Dense matrix of the mirror-ghost Neumann Laplacian, built node by node
// without the production stencil code.
inline Eigen::MatrixXd dense_laplacian(const GridSpec& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  const int last = g.cells();
  const double w = 1.0 / (g.spacing() * g.spacing());
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto c = g.unflatten(idx);
    const auto row = static_cast<Eigen::Index>(idx);
    for (int a = 0; a < g.dim(); ++a) {
      const int i = c[static_cast<std::size_t>(a)];
      const int lo = i == 0 ? 1 : i - 1;
      const int hi = i == last ? last - 1 : i + 1;
      const auto s = static_cast<long>(g.stride(a));
      L(row, row + (lo - i) * s) += w;
      L(row, row + (hi - i) * s) += w;
      L(row, row) -= 2.0 * w;
    }
  }
  return L;
}

// Dense operator matrix built from the dense Laplacian (no DCT involved).
inline Eigen::MatrixXd dense_operator(const GridSpec& g, OperatorKind kind, const ModelParams& p) {
  const Eigen::MatrixXd L = dense_laplacian(g);
  const auto I = Eigen::MatrixXd::Identity(L.rows(), L.cols());
  switch (kind) {
    case OperatorKind::phase_field:
      return -p.kappa_T1() * L + p.kappa_T2() * L * L;
    case OperatorKind::nutrient:
      return p.kappa_sigma() * I - p.nutrient_diffusivity() * L;
    case OperatorKind::mde:
      return p.kappa_M() * I - p.M_M * L;
  }
  return {};
}

// Upsilon_i(tau A) by exponentiating the block matrix [[-tau A, I, 0], [0, 0, I], [0, 0, 0]].
inline Eigen::MatrixXd dense_upsilon(const Eigen::MatrixXd& A, double tau, int i) {
  const Eigen::Index n = A.rows();
  if (i == 0) return (-tau * A).exp();
  const Eigen::Index blocks = i + 1;
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(blocks * n, blocks * n);
  Z.topLeftCorner(n, n) = -tau * A;
  for (Eigen::Index b = 0; b + 1 < blocks; ++b) Z.block(b * n, (b + 1) * n, n, n).setIdentity();
  const Eigen::MatrixXd E = Z.exp();
  return E.block(0, i * n, n, n);
}

// Implicit trapezoid updates solved by fixed-point iteration.
inline double picard_N(double N0, double T0, double T1, double H0, double H1, double a) {
  double x = N0;
  for (int it = 0; it < 100000; ++it) {
    const double next = N0 + a * (H0 * (T0 - N0) + H1 * (T1 - x));
    if (next == x) break;
    x = next;
  }
  return x;
}

inline double picard_theta(double th0, double m0, double m1, double a) {
  double x = th0;
  for (int it = 0; it < 100000; ++it) {
    const double next = th0 - a * (m0 * th0 + m1 * x);
    if (next == x) break;
    x = next;
  }
  return x;
}

}  // namespace tumorpf::testing
