#include <cmath>
#include <vector>

#include "doctest.h"
#include "nvcycle/errors.hpp"
#include "nvcycle/franck_condon.hpp"

using namespace nvcycle;

namespace {

double log_factorial(int n) { return std::lgamma(double(n) + 1.0); }

double poisson_overlap(double S, int n) {
  if (S == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(-S + n * std::log(S) - log_factorial(n));
}

}  // namespace

TEST_CASE("zero-zero overlap is exp(-S)") {
  CHECK(fc_overlap_sq(0.7, 0, 0) == doctest::Approx(0.496585).epsilon(1e-5));
  CHECK(fc_overlap_sq(0.0, 0, 0) == 1.0);
}

TEST_CASE("zero displacement reduces to orthonormality") {
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; b <= 6; ++b)
      CHECK(fc_overlap_sq(0.0, a, b) == (a == b ? 1.0 : 0.0));
}

TEST_CASE("known one-one overlap") {
  // exp(-S) (1 - S)^2 at S = 0.5.
  CHECK(fc_overlap_sq(0.5, 1, 1) == doctest::Approx(0.151633).epsilon(1e-5));
}

TEST_CASE("overlap from the vibrational ground state is Poissonian") {
  for (double S : {0.3, 0.7, 1.3, 2.0})
    for (int n = 0; n <= 15; ++n) {
      const double expected = poisson_overlap(S, n);
      CHECK(fc_overlap_sq(S, 0, n) ==
            doctest::Approx(expected).epsilon(1e-12));
      CHECK(fc_overlap_sq(S, n, 0) ==
            doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("overlap is symmetric in the two occupations") {
  for (double S : {0.3, 1.3, 2.7})
    for (int a = 0; a <= 8; ++a)
      for (int b = 0; b <= 8; ++b)
        CHECK(fc_overlap_sq(S, a, b) == fc_overlap_sq(S, b, a));
}

TEST_CASE("overlaps are probabilities") {
  for (double S : {0.0, 0.5, 1.0, 3.0})
    for (int a = 0; a <= 10; ++a)
      for (int b = 0; b <= 10; ++b) {
        const double p = fc_overlap_sq(S, a, b);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
      }
}

TEST_CASE("completeness: overlaps from one level sum to one") {
  for (double S : {0.25, 1.0, 2.0})
    for (int n_g = 0; n_g <= 3; ++n_g) {
      double total = 0.0;
      for (int n_e = 0; n_e <= n_g + 40; ++n_e)
        total += fc_overlap_sq(S, n_g, n_e);
      CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("invalid arguments are rejected") {
  CHECK_THROWS_AS(fc_overlap_sq(-0.1, 0, 0), DomainError);
  CHECK_THROWS_AS(fc_overlap_sq(0.5, -1, 0), DomainError);
  CHECK_THROWS_AS(fc_overlap_sq(0.5, 0, -2), DomainError);
  CHECK_THROWS_AS(fc_overlap_sq(0.5, 40, 30, 60), CapacityError);
  CHECK_NOTHROW(fc_overlap_sq(0.5, 30, 30, 60));
}

TEST_CASE("mode type validates its fields") {
  CHECK_THROWS_AS(PhononMode(-1.0, 0.5), DomainError);
  CHECK_THROWS_AS(PhononMode(0.0, 0.5), DomainError);
  CHECK_THROWS_AS(PhononMode(43.0, -0.1), DomainError);
  CHECK_NOTHROW(PhononMode(43.0, 0.0, "quasi-local"));
}

TEST_CASE("huang-rhys and displacement conversions invert each other") {
  CHECK(huang_rhys_from_displacement(43.0, 0.0) == 0.0);
  const double dq = displacement_from_huang_rhys(43.0, 1.0);
  CHECK(dq > 0.0);
  CHECK(huang_rhys_from_displacement(43.0, dq) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // S is quadratic in the displacement.
  CHECK(huang_rhys_from_displacement(20.0, 2.0 * 0.3) ==
        doctest::Approx(4.0 * huang_rhys_from_displacement(20.0, 0.3))
            .epsilon(1e-12));
  CHECK_THROWS_AS(huang_rhys_from_displacement(0.0, 0.1), DomainError);
  CHECK_THROWS_AS(displacement_from_huang_rhys(-3.0, 0.1), DomainError);
}

TEST_CASE("numeric oracle reproduces simple closed forms") {
  CHECK(numeric_overlap_oracle(0.0, 0, 0) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(numeric_overlap_oracle(0.0, 2, 2) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(numeric_overlap_oracle(0.0, 1, 2)) < 1e-10);
  // S e^{-S} for the 0 -> 1 line.
  CHECK(numeric_overlap_oracle(0.7, 0, 1) ==
        doctest::Approx(0.7 * std::exp(-0.7)).epsilon(1e-8));
}

TEST_CASE("analytic overlaps agree with the quadrature oracle") {
  for (double S : {0.3, 1.3}) {
    for (int a = 0; a <= 4; ++a)
      for (int b = 0; b <= 4; ++b) {
        const double exact = fc_overlap_sq(S, a, b);
        const double numeric = numeric_overlap_oracle(S, a, b);
        CHECK(std::abs(exact - numeric) < 1e-8);
      }
  }
}

TEST_CASE("oracle is independent of the mode energy scale") {
  QuadratureSpec narrow;
  narrow.omega_meV = 9.0;
  QuadratureSpec wide;
  wide.omega_meV = 120.0;
  const double a = numeric_overlap_oracle(0.8, 1, 2, narrow);
  const double b = numeric_overlap_oracle(0.8, 1, 2, wide);
  CHECK(a == doctest::Approx(b).epsilon(1e-9));
}

TEST_CASE("oracle rejects quanta beyond its validated range") {
  CHECK_THROWS_AS(numeric_overlap_oracle(0.5, 11, 0), DomainError);
  CHECK_THROWS_AS(numeric_overlap_oracle(0.5, 0, 12), DomainError);
}
