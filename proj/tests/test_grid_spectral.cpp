#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qflow/errors.hpp"
#include "qflow/grid.hpp"
#include "qflow/spectral.hpp"

using namespace qflow;
using std::numbers::pi;

namespace {

double max_abs_diff(const Field2D& a, const Field2D& b) { return (a - b).max_abs(); }

Field2D sinxsiny(const Grid& g) {
  return Field2D::from_function(g, [](double x, double y) { return std::sin(x) * std::sin(y); });
}

}  // namespace

TEST_CASE("make_grid geometry and wavenumbers") {
  const Grid g = make_grid(128, 128, 32, 32);
  CHECK(g.hx() == 0.25);
  CHECK(g.hy() == 0.25);

  const Grid big = make_grid(256, 256, 100, 100, {-50, -50});
  CHECK(big.x(0) == -50.0);
  CHECK(big.y(0) == -50.0);
  CHECK(big.x(255) + big.hx() == doctest::Approx(50.0));

  const Grid small = make_grid(4, 4, 2 * pi, 2 * pi);
  CHECK(small.kx(0) == doctest::Approx(0.0));
  CHECK(small.kx(1) == doctest::Approx(1.0));
  CHECK(small.kx(2) == doctest::Approx(2.0));  // wrap(j) = j for j <= n/2
  CHECK(std::abs(small.kx(2)) == doctest::Approx(2.0));
  CHECK(small.kx(3) == doctest::Approx(-1.0));
  CHECK(small.ky(3) == doctest::Approx(-1.0));
}

TEST_CASE("make_grid rejects bad sizes") {
  CHECK_THROWS_AS(make_grid(5, 8, 1, 1), ConfigError);
  CHECK_THROWS_AS(make_grid(2, 8, 1, 1), ConfigError);
  CHECK_THROWS_AS(make_grid(8, 8, 0, 1), ConfigError);
  CHECK_THROWS_AS(make_grid(8, 8, 1, -1), ConfigError);
}

TEST_CASE("laplacian_symbol") {
  const Grid g = make_grid(16, 16, 2 * pi, 2 * pi);
  const SymbolField lap = laplacian_symbol(g);
  CHECK(lap(1, 1) == doctest::Approx(-2.0));
  CHECK(lap(0, 0) == 0.0);
  CHECK(lap.max() <= 0.0);

  const Grid g32 = make_grid(128, 128, 32, 32);
  CHECK(laplacian_symbol(g32)(1, 0) == doctest::Approx(-std::pow(2 * pi / 32, 2)).epsilon(1e-14));
  CHECK(laplacian_symbol(g32)(1, 0) == doctest::Approx(-3.8553e-2).epsilon(1e-4));
}

TEST_CASE("compose_symbol") {
  const Grid g = make_grid(16, 16, 2 * pi, 2 * pi);
  const SymbolField lap = laplacian_symbol(g);
  const double sq[] = {1.0, 2.0, 1.0};
  const SymbolField sh = compose_symbol(lap, sq);
  CHECK(sh(1, 1) == doctest::Approx(1.0));  // (1 - 2)^2
  CHECK(sh(0, 0) == 1.0);
  CHECK(sh.min() >= 0.0);
  const double scale[] = {0.0, -1e-4};
  CHECK(compose_symbol(lap, scale)(1, 1) == doctest::Approx(2e-4));
}

TEST_CASE("apply_symbol examples") {
  const Grid g = make_grid(32, 32, 2 * pi, 2 * pi);
  const Field2D f = sinxsiny(g);
  const Field2D lf = apply_symbol(laplacian_symbol(g), f);
  CHECK(max_abs_diff(lf, -2.0 * f) <= 1e-10 * f.max_abs());

  std::mt19937_64 rng(3);
  const Field2D r = oracle::random_field(g, rng);
  CHECK(max_abs_diff(apply_symbol(SymbolField(g, 1.0), r), r) <= 1e-12);
  CHECK(apply_symbol(SymbolField(g, 0.0), r).max_abs() == 0.0);
  CHECK(apply_symbol(laplacian_symbol(g), Field2D(g, 3.0)).max_abs() <= 1e-12);
}

TEST_CASE("apply_symbol rejects grid mismatch") {
  const Grid a = make_grid(8, 8, 1, 1);
  const Grid b = make_grid(8, 8, 2, 1);
  CHECK_THROWS_AS(apply_symbol(laplacian_symbol(a), Field2D(b)), Error);
}

TEST_CASE("apply_symbol matches the dense DFT oracle") {
  const Grid g = make_grid(8, 6, 3.0, 2.0);
  std::mt19937_64 rng(11);
  const double sq[] = {1.0, 2.0, 1.0};
  const SymbolField sym = compose_symbol(laplacian_symbol(g), sq);
  const Field2D f = oracle::random_field(g, rng);
  const oracle::Vector expect = oracle::symbol_matrix(sym) * oracle::to_vec(f);
  CHECK(oracle::rel_diff(apply_symbol(sym, f), expect) <= 1e-12);
}

TEST_CASE("solve_shifted examples") {
  const Grid g = make_grid(32, 32, 2 * pi, 2 * pi);
  std::mt19937_64 rng(5);
  const Field2D r = oracle::random_field(g, rng);
  CHECK(max_abs_diff(solve_shifted(1.0, SymbolField(g, 0.0), r), r) <= 1e-14);

  const Field2D f = sinxsiny(g);
  const Field2D u = solve_shifted(1.0, laplacian_symbol(g), f);
  CHECK(max_abs_diff(u, (1.0 / 3.0) * f) <= 1e-12);

  // alpha = 0 with the Laplacian: zero-mean data has the zero-mean solution.
  const Field2D zm = solve_shifted(0.0, laplacian_symbol(g), f);
  CHECK(std::abs(zm.mean()) <= 1e-14);
  CHECK(max_abs_diff(apply_symbol(laplacian_symbol(g), zm), -1.0 * f) <= 1e-12);
  Field2D shifted = f;
  for (auto& v : shifted.values()) v += 1.0;
  CHECK_THROWS_AS(solve_shifted(0.0, laplacian_symbol(g), shifted), SolverError);
}

TEST_CASE("solve_shifted residual and singular-mode message") {
  const Grid g = make_grid(16, 16, 10.0, 10.0);
  std::mt19937_64 rng(8);
  const SymbolField lap = laplacian_symbol(g);
  const Field2D rhs = oracle::random_field(g, rng);
  const double alpha = 0.7;
  const Field2D u = solve_shifted(alpha, lap, rhs);
  Field2D res = alpha * u - apply_symbol(lap, u) - rhs;
  CHECK(norm2(res) / norm2(rhs) <= 1e-12);

  try {
    solve_shifted(0.0, lap, Field2D(g, 1.0));
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(std::string(e.what()).find("wavenumber") != std::string::npos);
  }
}

TEST_CASE("inner and norm2") {
  const Grid g = make_grid(64, 64, 32, 32);
  CHECK(inner(Field2D(g, 1.0), Field2D(g, 1.0)) == doctest::Approx(1024.0));

  const Grid t = make_grid(64, 64, 2 * pi, 2 * pi);
  const Field2D s = Field2D::from_function(t, [](double x, double) { return std::sin(x); });
  const Field2D c = Field2D::from_function(t, [](double x, double) { return std::cos(x); });
  CHECK(std::abs(inner(s, c)) <= 1e-12);
  CHECK(norm2(s) == doctest::Approx(std::sqrt(2 * pi * pi)).epsilon(1e-13));
  CHECK(norm2(s) == doctest::Approx(4.442883).epsilon(1e-6));

  std::mt19937_64 rng(1);
  const Field2D a = oracle::random_field(t, rng), b = oracle::random_field(t, rng), d = oracle::random_field(t, rng);
  CHECK(inner(a, b) == doctest::Approx(inner(b, a)).epsilon(1e-14));
  CHECK(inner(2.0 * a + d, b) == doctest::Approx(2.0 * inner(a, b) + inner(d, b)).epsilon(1e-12));
}

TEST_CASE("round trip forward/inverse on all grid sizes 4..512") {
  std::mt19937_64 rng(21);
  for (std::size_t n = 4; n <= 512; n *= 2) {
    for (std::size_t m : {n, std::size_t{6}}) {
      const Grid g = make_grid(n, m, 1.0, 2.0);
      const Field2D f = oracle::random_field(g, rng);
      std::vector<std::complex<double>> spec(g.spectral_size());
      g.forward(f.values(), spec);
      Field2D back(g);
      g.inverse(spec, back.values());
      CHECK(max_abs_diff(back, f) <= 1e-12 * (1.0 + f.max_abs()));
    }
  }
}

TEST_CASE("apply_symbol is linear and solve_shifted inverts it") {
  const Grid g = make_grid(32, 16, 7.0, 3.0);
  std::mt19937_64 rng(99);
  const SymbolField lap = laplacian_symbol(g);
  for (int trial = 0; trial < 5; ++trial) {
    const Field2D f = oracle::random_field(g, rng), h = oracle::random_field(g, rng);
    const double a = 1.7, b = -0.4;
    const Field2D lhs = apply_symbol(lap, a * f + b * h);
    const Field2D rhs = a * apply_symbol(lap, f) + b * apply_symbol(lap, h);
    CHECK(max_abs_diff(lhs, rhs) <= 1e-12 * (1.0 + rhs.max_abs()));

    const double alpha = 2.5;
    const Field2D img = alpha * f - apply_symbol(lap, f);
    CHECK(max_abs_diff(solve_shifted(alpha, lap, img), f) <= 1e-10);

    CHECK(inner(f, apply_symbol(lap, f)) <= 0.0);
  }
}
