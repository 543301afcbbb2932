#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qflow/errors.hpp"
#include "qflow/potential.hpp"

using namespace qflow;

namespace {

std::vector<double> as_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

void check_coeffs(std::span<const double> got, std::vector<double> want, double tol = 1e-12) {
  const std::size_t n = std::max(got.size(), want.size());
  want.resize(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double g = k < got.size() ? got[k] : 0.0;
    CHECK_MESSAGE(std::abs(g - want[k]) <= tol, "coefficient " << k << ": " << g << " vs " << want[k]);
  }
}

PolynomialPotential random_poly(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> deg(0, 8);
  std::uniform_real_distribution<double> c(-5.0, 5.0);
  std::vector<double> a(static_cast<std::size_t>(deg(rng)) + 1);
  for (auto& v : a) v = c(rng);
  return PolynomialPotential(a);
}

bool nonnegative_everywhere(const PolynomialPotential& p) {
  const std::vector<double> c = as_vec(p.coeffs());
  auto ok = [&](double phi) { return p.value(phi) >= -1e-12 * (1.0 + p.magnitude(phi)); };
  for (double r : oracle::real_roots(oracle::derivative(c)))
    if (!ok(r)) return false;
  for (int i = 0; i <= 20000; ++i)
    if (!ok(-10.0 + 20.0 * i / 20000.0)) return false;
  return true;
}

}  // namespace

TEST_CASE("PolynomialPotential trims trailing zeros") {
  CHECK(PolynomialPotential({1.0, 2.0, 0.0, 0.0}).degree() == 1);
  CHECK(PolynomialPotential({0.0, 0.0}).is_zero());
  CHECK(PolynomialPotential().degree() == -1);
  CHECK_THROWS_AS(PolynomialPotential(std::vector<double>(18, 1.0)), ConfigError);
  CHECK_THROWS_AS(PolynomialPotential({1.0, NAN}), ConfigError);
}

TEST_CASE("eval_poly examples") {
  const Grid g = make_grid(8, 8, 1.0, 1.0);
  const PolynomialPotential dw({0.25, 0.0, -0.5, 0.0, 0.25});
  const Field2D one(g, 1.0);
  CHECK(eval_poly(dw, one, 0).max_abs() == 0.0);
  CHECK(eval_poly(dw, one, 1).max_abs() == 0.0);

  const PolynomialPotential pfc({0.0, 0.0, -0.1, 0.0, 0.25});
  const Field2D two(g, 2.0);
  CHECK(eval_poly(pfc, two, 0)[5] == doctest::Approx(3.6).epsilon(1e-15));
  CHECK(eval_poly(pfc, two, 1)[5] == doctest::Approx(7.6).epsilon(1e-15));

  CHECK(eval_poly(PolynomialPotential(), two, 0).max_abs() == 0.0);
  CHECK(eval_poly(PolynomialPotential(), two, 1).max_abs() == 0.0);
  CHECK_THROWS_AS(eval_poly(pfc, two, 2), Error);
}

TEST_CASE("build_positive_split examples") {
  SUBCASE("phase field crystal") {
    const SplitPotential sp = build_positive_split(PolynomialPotential({0.0, 0.0, -0.1, 0.0, 0.25}), 0.0);
    check_coeffs(sp.m().coeffs(), {0.0, 0.0, 0.1});
    check_coeffs(sp.ftilde().coeffs(), {0.0, 0.0, 0.0, 0.0, 0.25});
    CHECK(sp.m_nonnegative());
    CHECK(sp.kappa() == 0.0);
  }
  SUBCASE("swift-hohenberg") {
    const SplitPotential sp = build_positive_split(PolynomialPotential({0.0, 0.0, -0.0125, -2.0 / 3.0, 0.25}));
    check_coeffs(sp.m().coeffs(), {0.0, 0.0, 1.0 / 3.0 + 0.0125, 0.0, 1.0 / 3.0});
    // 0.25 phi^4 + (1/3) phi^2 (phi - 1)^2
    check_coeffs(sp.ftilde().coeffs(), {0.0, 0.0, 1.0 / 3.0, -2.0 / 3.0, 0.25 + 1.0 / 3.0});
    CHECK(sp.ftilde().value(1.0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(sp.original().value(1.0) + sp.m().value(1.0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(sp.kappa() == 1e-8);
  }
  SUBCASE("even non-negative coefficients need no compensation") {
    const PolynomialPotential f({1.0, 0.0, 2.0, 0.0, 0.5});
    const SplitPotential sp = build_positive_split(f);
    CHECK(sp.m().is_zero());
    check_coeffs(sp.ftilde().coeffs(), as_vec(f.coeffs()), 0.0);
  }
  SUBCASE("negative constant is lifted") {
    const SplitPotential sp = build_positive_split(PolynomialPotential({-3.0, 0.0, 1.0}));
    check_coeffs(sp.m().coeffs(), {3.0});
    CHECK(sp.ftilde_minimum().value == doctest::Approx(0.0));
  }
  CHECK_THROWS_AS(build_positive_split(PolynomialPotential({1.0}), -1.0), ConfigError);
}

TEST_CASE("positive split on 1000 random polynomials") {
  std::mt19937_64 rng(2024);
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const PolynomialPotential f = random_poly(rng);
    const SplitPotential sp = build_positive_split(f);
    if (!nonnegative_everywhere(sp.ftilde())) ++failures;
    if (!nonnegative_everywhere(sp.m())) ++failures;

    const std::vector<double> closed = oracle::closed_form_ftilde(as_vec(f.coeffs()));
    std::vector<double> sum(std::max(closed.size(), sp.ftilde().coeffs().size()), 0.0);
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = f.coeff(k) + sp.m().coeff(k);
    for (std::size_t k = 0; k < sum.size(); ++k) {
      const double want = k < closed.size() ? closed[k] : 0.0;
      if (std::abs(sum[k] - want) > 1e-12) ++failures;
    }
  }
  CHECK(failures == 0);
}

TEST_CASE("real_roots agrees with the sampling oracle") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const PolynomialPotential p = random_poly(rng);
    if (p.degree() < 1) continue;
    const std::vector<double> ours = real_roots(p);
    for (double r : oracle::real_roots(as_vec(p.coeffs()))) {
      double best = INFINITY;
      for (double q : ours) best = std::min(best, std::abs(q - r));
      CHECK_MESSAGE(best <= 1e-6 * (1.0 + std::abs(r)), "root " << r << " missing for " << p.to_string());
    }
  }
}

TEST_CASE("global_minimum") {
  const GlobalMinimum m = global_minimum(PolynomialPotential({0.25, 0.0, -0.5, 0.0, 0.25}));
  CHECK(m.bounded);
  CHECK(m.value == doctest::Approx(0.0));
  CHECK(std::abs(std::abs(m.phi) - 1.0) <= 1e-7);
  CHECK_FALSE(global_minimum(PolynomialPotential({0.0, 0.0, 0.0, 1.0})).bounded);
  CHECK_FALSE(global_minimum(PolynomialPotential({0.0, 0.0, 0.0, 0.0, -1.0})).bounded);
}

TEST_CASE("quadratic_split validates S") {
  const PolynomialPotential pfc({0.0, 0.0, -0.1, 0.0, 0.25});
  const SplitPotential ok = quadratic_split(pfc, 0.1);
  check_coeffs(ok.m().coeffs(), {0.0, 0.0, 0.1});
  CHECK(ok.origin() == SplitPotential::Origin::Quadratic);
  try {
    quadratic_split(pfc, 0.05);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("phi") != std::string::npos);
  }
  // The cubic makes F unbounded below for any S.
  CHECK_THROWS_AS(quadratic_split(PolynomialPotential({0.0, 0.0, 0.0, 1.0}), 100.0), ConfigError);
}

TEST_CASE("custom_split keeps an indefinite M") {
  const PolynomialPotential sh({0.0, 0.0, -0.0125, -2.0 / 3.0, 0.25});
  const SplitPotential sp = custom_split(sh, PolynomialPotential({0.0, 0.0, 4.0, 2.0}));
  CHECK_FALSE(sp.m_nonnegative());
  CHECK(sp.ftilde_minimum().value >= -1e-12);
  CHECK_THROWS_AS(custom_split(sh, PolynomialPotential({0.0, 0.0, 0.0, -1.0})), ConfigError);
}

TEST_CASE("quadratization_ratio examples") {
  const Grid g = make_grid(4, 4, 1.0, 1.0);
  const SplitPotential quartic = build_positive_split(PolynomialPotential({0.0, 0.0, 0.0, 0.0, 0.25}), 0.0);
  CHECK(quadratization_ratio(quartic, Field2D(g, 2.0), SplitPart::Ftilde)[3] == doctest::Approx(2.0).epsilon(1e-15));
  const Field2D at_zero = quadratization_ratio(quartic, Field2D(g, 0.0), SplitPart::Ftilde);
  CHECK(at_zero.all_finite());
  CHECK(at_zero.max_abs() == 0.0);

  const SplitPotential with_kappa = build_positive_split(PolynomialPotential({0.0, 0.0, -0.1, 0.0, 0.25}), 1.0);
  CHECK(quadratization_ratio(with_kappa, Field2D(g, 0.0), SplitPart::Ftilde).max_abs() == 0.0);
  CHECK(quadratization_ratio(with_kappa, Field2D(g, 0.0), SplitPart::M).max_abs() == 0.0);
}

TEST_CASE("quadratization_ratio matches a finite-difference derivative of the square root") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const Grid g = make_grid(4, 4, 1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const SplitPotential sp = build_positive_split(random_poly(rng), 1e-8);
    for (SplitPart part : {SplitPart::Ftilde, SplitPart::M}) {
      const PolynomialPotential& p = part == SplitPart::Ftilde ? sp.ftilde() : sp.m();
      const double phi = u(rng);
      if (p.value(phi) + sp.kappa() < 1e-3) continue;
      const double h = 1e-6;
      const double fd = (std::sqrt(p.value(phi + h) + sp.kappa()) - std::sqrt(p.value(phi - h) + sp.kappa())) / (2 * h);
      const double got = quadratization_ratio(sp, Field2D(g, phi), part)[0];
      CHECK(std::abs(got - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("radicand guard") {
  const Grid g = make_grid(4, 4, 1.0, 1.0);
  const PolynomialPotential neg({0.0, 0.0, 0.0, 1.0});
  try {
    sqrt_ratio(neg, 0.0, Field2D(g, -1.0), "C");
    FAIL("expected RadicandError");
  } catch (const RadicandError& e) {
    CHECK(std::string(e.what()).find("C") != std::string::npos);
  }
  CHECK(sqrt_field(neg, 2.0, Field2D(g, -1.0), "C")[0] == doctest::Approx(1.0));
  CHECK(guarded_sqrt(-1e-14, 1.0, "r", "C") == 0.0);
  CHECK_THROWS_AS(guarded_sqrt(-1e-6, 1.0, "r", "C"), RadicandError);
}

TEST_CASE("integral_split examples") {
  const Grid sq = make_grid(8, 8, 1.0, 1.0);
  const PolynomialPotential pfc({0.0, 0.0, -0.1, 0.0, 0.25});
  const SplitIntegrals s = integral_split(build_positive_split(pfc), Field2D(sq, 2.0));
  CHECK(s.e1 == doctest::Approx(3.6).epsilon(1e-14));
  CHECK(s.e0 == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(s.etilde == doctest::Approx(4.0).epsilon(1e-14));

  const Grid big = make_grid(16, 16, 3.0, 2.0);
  const PolynomialPotential dw({0.25, 0.0, -0.5, 0.0, 0.25});
  const SplitIntegrals d = integral_split(build_positive_split(dw), Field2D(big, 0.0));
  CHECK(d.e1 == doctest::Approx(0.25 * 6.0));
  CHECK(d.e0 == 0.0);
  CHECK(d.etilde == d.e1);
}
