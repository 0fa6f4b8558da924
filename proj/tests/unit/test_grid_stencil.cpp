#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "support.hpp"
#include "tumorpf/errors.hpp"
#include "tumorpf/stencil.hpp"

using namespace tumorpf;
using tumorpf::testing::max_abs_diff;
using tumorpf::testing::random_field;
using tumorpf::testing::sample;

namespace {

double weighted_sum(const ScalarField& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f.grid().quadrature_weight(i) * f[i];
  return s;
}

double weighted_dot(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.grid().quadrature_weight(i) * a[i] * b[i];
  return s;
}

bool bitwise_equal(const ScalarField& a, const ScalarField& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("grid geometry and indexing") {
  const GridSpec g(2, 4);
  CHECK(g.size() == 25);
  CHECK(g.spacing() == doctest::Approx(0.5));
  CHECK(g.coord(0) == -1.0);
  CHECK(g.coord(4) == doctest::Approx(1.0));
  CHECK(g.index(1, 2) == 11);
  const auto c = g.unflatten(11);
  CHECK(c[0] == 1);
  CHECK(c[1] == 2);
  CHECK(c[2] == 0);

  const GridSpec g3(3, 4);
  CHECK(g3.size() == 125);
  CHECK(g3.index(1, 2, 3) == 1 + 5 * (2 + 5 * 3));
  CHECK(g3.stride(2) == 25);
}

TEST_CASE("trapezoid weights integrate constants over the box") {
  ScalarField one2(GridSpec(2, 16), 1.0);
  CHECK(weighted_sum(one2) == doctest::Approx(4.0).epsilon(1e-14));
  ScalarField one3(GridSpec(3, 8), 1.0);
  CHECK(weighted_sum(one3) == doctest::Approx(8.0).epsilon(1e-14));
}

TEST_CASE("grid construction rejects bad shapes") {
  CHECK_THROWS_AS(GridSpec(1, 16), ConfigError);
  CHECK_THROWS_AS(GridSpec(2, 2), ConfigError);
  CHECK_THROWS_AS(ScalarField(GridSpec(2, 4), std::vector<double>(3)), ConfigError);
  CHECK_THROWS_AS(div_mobility_grad(ScalarField(GridSpec(2, 4)), ScalarField(GridSpec(2, 8)), 1.0), ConfigError);
}

TEST_CASE("laplacian annihilates constants and matches the dense Neumann matrix") {
  for (int dim : {2, 3}) {
    const GridSpec g(dim, 8);
    CHECK(laplacian(ScalarField(g, 3.25)).max_abs() == 0.0);
    const ScalarField f = random_field(g, 11 + dim);
    const ScalarField dense = tumorpf::testing::from_eigen(g, tumorpf::testing::dense_laplacian(g) * tumorpf::testing::to_eigen(f));
    CHECK(max_abs_diff(laplacian(f), dense) <= 1e-11 * dense.max_abs());
  }
}

TEST_CASE("laplacian of x^2 is 2 in the interior") {
  const GridSpec g(2, 16);
  const ScalarField f = sample(g, [](double x, double, double) { return x * x; });
  const ScalarField l = laplacian(f);
  for (int j = 0; j <= 16; ++j) {
    for (int i = 1; i < 16; ++i) CHECK(l[g.index(i, j)] == doctest::Approx(2.0).epsilon(1e-10));
  }
}

TEST_CASE("laplacian is second-order accurate on a Neumann-compatible mode") {
  const double pi = std::numbers::pi;
  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    const GridSpec g(2, n);
    const ScalarField f = sample(g, [&](double x, double y, double) { return std::cos(pi * x) * std::cos(2 * pi * y); });
    const ScalarField exact =
        sample(g, [&](double x, double y, double) { return -5 * pi * pi * std::cos(pi * x) * std::cos(2 * pi * y); });
    const double err = max_abs_diff(laplacian(f), exact);
    if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("biharmonic is the laplacian applied twice") {
  const GridSpec g(2, 16);
  const ScalarField f = random_field(g, 5);
  CHECK(bitwise_equal(biharmonic(f), laplacian(laplacian(f))));
}

TEST_CASE("variable-coefficient divergence: constant coefficient, conservation, symmetry") {
  for (int dim : {2, 3}) {
    const GridSpec g(dim, dim == 2 ? 16 : 8);
    const ScalarField p = random_field(g, 21);
    const ScalarField q = random_field(g, 22);
    const ScalarField c = random_field(g, 23, 0.1, 2.0);

    const ScalarField lap = laplacian(p);
    const ScalarField flux = div_mobility_grad(ScalarField(g, 0.7), p, 2.0);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(flux[i] == doctest::Approx(1.4 * lap[i]).epsilon(1e-12));

    CHECK(div_mobility_grad(c, ScalarField(g, -4.0), 1.0).max_abs() == 0.0);

    const ScalarField dp = div_mobility_grad(c, p, 1.0);
    const ScalarField dq = div_mobility_grad(c, q, 1.0);
    const double scale = dp.max_abs();
    CHECK(std::abs(weighted_sum(dp)) <= 1e-12 * scale);
    CHECK(std::abs(weighted_dot(q, dp) - weighted_dot(p, dq)) <= 1e-12 * scale);
  }
}

TEST_CASE("degenerate mobility vanishes for pure phases and matches the explicit edge form") {
  const GridSpec g(2, 16);
  const ScalarField pot = random_field(g, 31);
  CHECK(div_degenerate_mobility_grad(ScalarField(g, 0.0), pot, 2.0).max_abs() == 0.0);
  CHECK(div_degenerate_mobility_grad(ScalarField(g, 1.0), pot, 2.0).max_abs() == 0.0);
  // With a constant phase value a the mobility is M a^2 (1-a)^2 on every edge.
  const double a = 0.3;
  const double m = 2.0 * a * a * (1 - a) * (1 - a);
  const ScalarField lhs = div_degenerate_mobility_grad(ScalarField(g, a), pot, 2.0);
  const ScalarField rhs = div_mobility_grad(ScalarField(g, 1.0), pot, m);
  CHECK(max_abs_diff(lhs, rhs) <= 1e-12 * rhs.max_abs());
}

TEST_CASE("OpenMP kernels are bit-identical to the serial reference") {
  for (int dim : {2, 3}) {
    const GridSpec g(dim, dim == 2 ? 64 : 16);
    const ScalarField f = random_field(g, 41);
    const ScalarField c = random_field(g, 42, 0.0, 1.0);
    CHECK(bitwise_equal(laplacian(f), serial::laplacian(f)));
    CHECK(bitwise_equal(biharmonic(f), serial::biharmonic(f)));
    CHECK(bitwise_equal(div_mobility_grad(c, f, 0.3), serial::div_mobility_grad(c, f, 0.3)));
    CHECK(bitwise_equal(div_degenerate_mobility_grad(c, f, 2.0), serial::div_degenerate_mobility_grad(c, f, 2.0)));
  }
}

TEST_CASE("field reductions") {
  const GridSpec g(2, 4);
  ScalarField f(g, 0.5);
  f[3] = -2.0;
  f[7] = 1.5;
  CHECK(f.max() == 1.5);
  CHECK(f.min() == -2.0);
  CHECK(f.max_abs() == 2.0);
  CHECK(f.all_finite());
  f[0] = std::nan("");
  CHECK_FALSE(f.all_finite());
}
