#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "nvcycle/rng.hpp"

using namespace nvcycle;

namespace {

struct Moments {
  double mean;
  double var;
};

template <typename Draw>
Moments sample_moments(Draw draw, int n) {
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = draw();
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  return {mean, sum_sq / n - mean * mean};
}

}  // namespace

TEST_CASE("same seed reproduces the same sequence") {
  Rng a(12345), b(12345);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds give different sequences") {
  Rng a(1), b(2);
  int same = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() == b.next_u64()) ++same;
  CHECK(same == 0);
}

TEST_CASE("numbered streams are reproducible and distinct") {
  Rng a = Rng::stream(99, 0);
  Rng a2 = Rng::stream(99, 0);
  Rng b = Rng::stream(99, 1);
  CHECK(a.next_u64() == a2.next_u64());
  int same = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() == b.next_u64()) ++same;
  CHECK(same == 0);
}

TEST_CASE("uniform draws live in [0, 1) with the right moments") {
  Rng rng(7);
  const int n = 200000;
  double lo = 1.0, hi = 0.0;
  const Moments m = sample_moments(
      [&] {
        const double u = rng.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        return u;
      },
      n);
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  // 5 sigma band on the sample mean, sd = sqrt(1/12) / sqrt(n).
  CHECK(std::abs(m.mean - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(m.var == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("uniform_pos never returns zero") {
  Rng rng(11);
  for (int i = 0; i < 100000; ++i) CHECK(rng.uniform_pos() > 0.0);
}

TEST_CASE("exponential draws have mean 1/rate") {
  Rng rng(21);
  const int n = 200000;
  const double rate = 4.0;
  const Moments m = sample_moments([&] { return rng.exponential(rate); }, n);
  // mean 1/rate, sd of the sample mean = 1/(rate sqrt(n)).
  CHECK(m.mean == doctest::Approx(0.25).epsilon(5.0 / std::sqrt(double(n))));
  CHECK(m.var == doctest::Approx(1.0 / (rate * rate)).epsilon(0.05));
}

TEST_CASE("normal draws are standard") {
  Rng rng(31);
  const int n = 200000;
  const Moments m = sample_moments([&] { return rng.normal(); }, n);
  CHECK(std::abs(m.mean) < 5.0 / std::sqrt(double(n)));
  CHECK(m.var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("poisson matches mean and variance in both regimes") {
  Rng rng(41);
  const int n = 200000;
  for (double mean : {0.3, 3.0, 200.0}) {
    const Moments m =
        sample_moments([&] { return double(rng.poisson(mean)); }, n);
    CHECK(m.mean == doctest::Approx(mean).epsilon(0.02));
    CHECK(m.var == doctest::Approx(mean).epsilon(0.05));
  }
}

TEST_CASE("poisson of tiny mean is almost always zero") {
  Rng rng(51);
  std::uint32_t total = 0;
  for (int i = 0; i < 10000; ++i) total += rng.poisson(1e-4);
  CHECK(total < 10);
}
