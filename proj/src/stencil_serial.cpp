// Straightforward reference stencils. Every neighbour access goes through an
// explicit mirror-ghost lookup; no loop splitting, no threading.

#include <array>

#include "tumorpf/errors.hpp"
#include "tumorpf/stencil.hpp"

namespace tumorpf::serial {

namespace {

int mirror(int i, int n) {
  if (i < 0) return -i;
  if (i > n) return 2 * n - i;
  return i;
}

double at(const ScalarField& f, std::array<int, 3> c) {
  const int n = f.grid().cells();
  return f[f.grid().index(mirror(c[0], n), mirror(c[1], n), mirror(c[2], n))];
}

template <class EdgeCoef>
ScalarField div_flux(const ScalarField& coef, const ScalarField& pot, EdgeCoef edge) {
  require_same_grid(coef, pot, "div_mobility_grad");
  const GridSpec& g = coef.grid();
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  ScalarField out(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto c = g.unflatten(idx);
    double acc = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      auto cp = c;
      auto cm = c;
      cp[static_cast<std::size_t>(a)] += 1;
      cm[static_cast<std::size_t>(a)] -= 1;
      const double c0 = at(coef, c);
      const double p0 = at(pot, c);
      const double flux_plus = edge(0.5 * (c0 + at(coef, cp))) * (at(pot, cp) - p0);
      const double flux_minus = edge(0.5 * (at(coef, cm) + c0)) * (p0 - at(pot, cm));
      acc += flux_plus - flux_minus;
    }
    out[idx] = acc * inv_h2;
  }
  return out;
}

}  // namespace

ScalarField laplacian(const ScalarField& f) {
  const GridSpec& g = f.grid();
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  ScalarField out(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto c = g.unflatten(idx);
    double acc = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      auto cp = c;
      auto cm = c;
      cp[static_cast<std::size_t>(a)] += 1;
      cm[static_cast<std::size_t>(a)] -= 1;
      acc += at(f, cp) + at(f, cm) - 2.0 * f[idx];
    }
    out[idx] = acc * inv_h2;
  }
  return out;
}

ScalarField biharmonic(const ScalarField& f) { return serial::laplacian(serial::laplacian(f)); }

ScalarField div_mobility_grad(const ScalarField& coef, const ScalarField& pot, double scale) {
  return div_flux(coef, pot, [scale](double a) { return scale * a; });
}

ScalarField div_degenerate_mobility_grad(const ScalarField& phi, const ScalarField& pot,
                                         double mobility) {
  return div_flux(phi, pot, [mobility](double a) { return mobility * a * a * (1.0 - a) * (1.0 - a); });
}

}  // namespace tumorpf::serial
