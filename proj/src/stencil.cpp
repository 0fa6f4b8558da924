#include "tumorpf/stencil.hpp"

#include <array>
#include <cstddef>

#include "tumorpf/errors.hpp"

namespace tumorpf {

namespace {

// Neighbour offsets of one node along every axis, mirror-reflected at the
// boundary. The arithmetic in the kernels below follows the serial reference
// term for term so both produce identical bits.
struct Neighbours {
  std::array<std::size_t, 3> plus{};
  std::array<std::size_t, 3> minus{};
};

inline Neighbours neighbours(const GridSpec& g, std::size_t idx, int i, int j, int k) {
  const int n = g.cells();
  const std::array<int, 3> c{i, j, k};
  Neighbours nb;
  for (int a = 0; a < g.dim(); ++a) {
    const std::size_t s = g.stride(a);
    const int ca = c[static_cast<std::size_t>(a)];
    nb.plus[static_cast<std::size_t>(a)] = (ca == n) ? idx - s : idx + s;
    nb.minus[static_cast<std::size_t>(a)] = (ca == 0) ? idx + s : idx - s;
  }
  return nb;
}

template <class Body>
void for_each_node(const GridSpec& g, Body body) {
  const int np = g.nodes_per_axis();
  const int nz = g.dim() == 3 ? np : 1;
  const long lines = static_cast<long>(nz) * np;
#pragma omp parallel for schedule(static)
  for (long line = 0; line < lines; ++line) {
    const int j = static_cast<int>(line % np);
    const int k = static_cast<int>(line / np);
    std::size_t idx = g.index(0, j, k);
    for (int i = 0; i < np; ++i, ++idx) body(idx, i, j, k);
  }
}

template <class EdgeCoef>
ScalarField div_flux(const ScalarField& coef, const ScalarField& pot, EdgeCoef edge) {
  require_same_grid(coef, pot, "div_mobility_grad");
  const GridSpec& g = coef.grid();
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  const double* cf = coef.data();
  const double* p = pot.data();
  ScalarField out(g);
  double* o = out.data();
  const int dim = g.dim();
  for_each_node(g, [&](std::size_t idx, int i, int j, int k) {
    const Neighbours nb = neighbours(g, idx, i, j, k);
    double acc = 0.0;
    for (int a = 0; a < dim; ++a) {
      const std::size_t ip = nb.plus[static_cast<std::size_t>(a)];
      const std::size_t im = nb.minus[static_cast<std::size_t>(a)];
      const double c0 = cf[idx];
      const double p0 = p[idx];
      const double flux_plus = edge(0.5 * (c0 + cf[ip])) * (p[ip] - p0);
      const double flux_minus = edge(0.5 * (cf[im] + c0)) * (p0 - p[im]);
      acc += flux_plus - flux_minus;
    }
    o[idx] = acc * inv_h2;
  });
  return out;
}

}  // namespace

ScalarField laplacian(const ScalarField& f) {
  const GridSpec& g = f.grid();
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  const double* in = f.data();
  ScalarField out(g);
  double* o = out.data();
  const int dim = g.dim();
  for_each_node(g, [&](std::size_t idx, int i, int j, int k) {
    const Neighbours nb = neighbours(g, idx, i, j, k);
    double acc = 0.0;
    for (int a = 0; a < dim; ++a) {
      acc += in[nb.plus[static_cast<std::size_t>(a)]] + in[nb.minus[static_cast<std::size_t>(a)]] -
             2.0 * in[idx];
    }
    o[idx] = acc * inv_h2;
  });
  return out;
}

ScalarField biharmonic(const ScalarField& f) { return laplacian(laplacian(f)); }

ScalarField div_mobility_grad(const ScalarField& coef, const ScalarField& pot, double scale) {
  return div_flux(coef, pot, [scale](double a) { return scale * a; });
}

ScalarField div_degenerate_mobility_grad(const ScalarField& phi, const ScalarField& pot,
                                         double mobility) {
  return div_flux(phi, pot, [mobility](double a) { return mobility * a * a * (1.0 - a) * (1.0 - a); });
}

}  // namespace tumorpf
