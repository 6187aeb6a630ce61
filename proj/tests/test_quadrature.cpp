#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hypocert/interp.hpp"
#include "hypocert/linalg.hpp"
#include "hypocert/quadrature.hpp"

#include <cmath>
#include <numbers>

using namespace hypo;

TEST_CASE("finite interval against antiderivatives") {
  QuadratureCfg cfg;
  CHECK(adaptive_gk([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, cfg).value ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(adaptive_gk([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, cfg).value ==
        doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("upper tail map") {
  QuadratureCfg cfg;
  // int_1^inf x^-2 = 1, int_2^inf e^-x = e^-2
  CHECK(integrate_upper_tail([](double x) { return 1.0 / (x * x); }, 1.0, cfg).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(integrate_upper_tail([](double x) { return std::exp(-x); }, 2.0, cfg).value ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-10));
  // Heavy tail int_1^inf x^-1.5 = 2.
  CHECK(integrate_upper_tail([](double x) { return std::pow(x, -1.5); }, 1.0, cfg).value ==
        doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("non-convergence carries the bracket") {
  QuadratureCfg cfg;
  cfg.max_subdivisions = 5;
  bool thrown = false;
  try {
    adaptive_gk([](double x) { return 1.0 / x; }, 0.0, 1.0, cfg);
  } catch (const QuadratureFailure& e) {
    thrown = true;
    CHECK(e.lo == doctest::Approx(0.0));
    CHECK(e.hi > e.lo);
  }
  CHECK(thrown);
}

TEST_CASE("config validation") {
  QuadratureCfg cfg;
  cfg.tail_mass = 1e-3;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.tail_mass = 1e-8;
  cfg.rel_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("monotone table reproduces data and extends linearly") {
  std::vector<double> x{0, 1, 2, 3, 4}, y{0, 1, 4, 9, 16};
  MonotoneTable t(x, y);
  CHECK(t(2.0) == doctest::Approx(4.0));
  CHECK(t(5.0) == doctest::Approx(16.0 + 7.0));
  CHECK(t(-1.0) == doctest::Approx(-1.0));
  for (double s = 0.0; s < 4.0; s += 0.01) CHECK(t(s + 0.01) >= t(s));
}

TEST_CASE("jacobi eigenvalues") {
  SymMatrix m(3);
  m(0, 0) = 2; m(1, 1) = 3; m(2, 2) = 4;
  m(0, 1) = m(1, 0) = 1;
  m(1, 2) = m(2, 1) = 1;
  const auto ev = jacobi_eigenvalues(m);
  // Characteristic polynomial roots of this matrix: 3 - sqrt(3), 3, 3 + sqrt(3).
  CHECK(ev[0] == doctest::Approx(3.0 - std::sqrt(3.0)).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(ev[2] == doctest::Approx(3.0 + std::sqrt(3.0)).epsilon(1e-12));
  const SymMatrix inv = spd_inverse(m);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += m(i, k) * inv(k, j);
      CHECK(s == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
    }
}

TEST_CASE("sturm bisection on the discrete Laplacian") {
  const int n = 50;
  std::vector<double> diag(n, 2.0), off(n - 1, -1.0);
  for (int k = 0; k < 3; ++k) {
    const double exact = 2.0 - 2.0 * std::cos((k + 1) * std::numbers::pi / (n + 1));
    CHECK(tridiagonal_eigenvalue(diag, off, k) == doctest::Approx(exact).epsilon(1e-10));
  }
}
