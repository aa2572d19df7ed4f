#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "nvcycle/blink.hpp"
#include "nvcycle/errors.hpp"
#include "nvcycle/rng.hpp"

using namespace nvcycle;

namespace {

PhotonTrace trace_from(std::vector<std::uint32_t> counts, double bin = 0.1) {
  PhotonTrace t;
  t.bin_width_s = bin;
  t.counts = std::move(counts);
  return t;
}

// Alternating blocks of Poisson counts at two intensities.
PhotonTrace two_level_trace(double bright_mean, double dark_mean,
                            int block_bins, int blocks, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint32_t> counts;
  for (int b = 0; b < blocks; ++b) {
    const double mean = (b % 2 == 0) ? dark_mean : bright_mean;
    for (int i = 0; i < block_bins; ++i) counts.push_back(rng.poisson(mean));
  }
  return trace_from(std::move(counts));
}

}  // namespace

TEST_CASE("threshold lands between well-separated intensity modes") {
  const PhotonTrace t = two_level_trace(100.0, 5.0, 50, 40, 1);
  const double thr = choose_threshold(t);
  CHECK(thr > 30.0);
  CHECK(thr < 70.0);
}

TEST_CASE("threshold on a single-level trace reports indistinguishable states") {
  Rng rng(2);
  std::vector<std::uint32_t> counts;
  for (int i = 0; i < 4000; ++i) counts.push_back(rng.poisson(40.0));
  CHECK_THROWS_WITH_AS(choose_threshold(trace_from(std::move(counts))),
                       doctest::Contains("indistinguishable"), AnalysisError);
}

TEST_CASE("nearby intensity modes are not split") {
  // 40 vs 46 counts per bin sits inside the combined shot noise.
  const PhotonTrace t = two_level_trace(46.0, 40.0, 50, 40, 3);
  CHECK_THROWS_AS(choose_threshold(t), AnalysisError);
}

TEST_CASE("fixed threshold passes through untouched") {
  const PhotonTrace t = trace_from({1, 2, 3});
  CHECK(choose_threshold(t, ThresholdMethod::fixed(17.5)) == 17.5);
  CHECK_THROWS_AS(choose_threshold(trace_from({})), ValidationError);
}

TEST_CASE("dwell extraction censors the boundary dwells") {
  std::vector<std::uint32_t> counts;
  for (int i = 0; i < 10; ++i) counts.push_back(0);
  for (int i = 0; i < 20; ++i) counts.push_back(100);
  for (int i = 0; i < 10; ++i) counts.push_back(0);
  const auto dwells = extract_dwells(trace_from(std::move(counts)), 50.0);
  REQUIRE(dwells.size() == 1);
  CHECK(dwells[0].state == DwellState::bright);
  CHECK(dwells[0].duration_s == doctest::Approx(20 * 0.1).epsilon(1e-12));
  CHECK(dwells[0].start_bin == 10);
}

TEST_CASE("debouncing absorbs runs shorter than the minimum dwell") {
  std::vector<std::uint32_t> counts;
  for (int i = 0; i < 10; ++i) counts.push_back(0);
  for (int i = 0; i < 2; ++i) counts.push_back(100);
  for (int i = 0; i < 10; ++i) counts.push_back(0);

  const PhotonTrace t = trace_from(counts);
  const auto kept = extract_dwells(t, 50.0, 1);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].state == DwellState::bright);
  CHECK(kept[0].duration_s == doctest::Approx(0.2).epsilon(1e-12));

  // With a 3-bin floor the spike merges into one long dark run, which is
  // then censored as a boundary dwell.
  const auto absorbed = extract_dwells(t, 50.0, 3);
  CHECK(absorbed.empty());

  CHECK_THROWS_AS(extract_dwells(t, 50.0, 0), DomainError);
}

TEST_CASE("rate estimate from explicit dwells") {
  std::vector<DwellRecord> dwells{{DwellState::dark, 2.0, 0},
                                  {DwellState::bright, 1.0, 20},
                                  {DwellState::dark, 2.0, 30},
                                  {DwellState::dark, 2.0, 50}};
  const auto [rate, se] = estimate_rate(dwells, DwellState::dark);
  CHECK(rate == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(se == 0.0);
  CHECK_THROWS_AS(estimate_rate(dwells, DwellState::bright),
                  InsufficientDataError);
  CHECK_THROWS_AS(estimate_rate({}, DwellState::dark), InsufficientDataError);
}

TEST_CASE("rate estimate has delta-method scaling") {
  // Exponential dwells at 2 Hz: relative stderr should be ~ 1/sqrt(n).
  Rng rng(5);
  std::vector<DwellRecord> dwells;
  const int n = 400;
  for (int i = 0; i < n; ++i)
    dwells.push_back({DwellState::dark, rng.exponential(2.0), i});
  const auto [rate, se] = estimate_rate(dwells, DwellState::dark);
  CHECK(std::abs(rate - 2.0) < 5.0 * se);
  CHECK(se / rate == doctest::Approx(1.0 / std::sqrt(double(n))).epsilon(0.25));
}

TEST_CASE("full pipeline recovers the dark-to-bright rate") {
  CycleSpec cycle;
  cycle.chain = {1.0, 1e9, 0.0};  // effective 1 Hz recombination
  cycle.ionization_rate_Hz = 1.0;
  cycle.bright_count_rate_Hz = 2500.0;
  cycle.dark_count_rate_Hz = 50.0;
  const double bin = 0.01;
  const PhotonTrace trace = simulate_blinking(cycle, 1500.0, bin, 12);

  const double thr = choose_threshold(trace);
  CHECK(thr > 50.0 * bin);
  CHECK(thr < 2500.0 * bin);

  const auto dwells = extract_dwells(trace, thr);
  long n_dark = 0;
  for (const auto& d : dwells)
    if (d.state == DwellState::dark) ++n_dark;
  CHECK(n_dark > 300);

  const auto [rate, se] = estimate_rate(dwells, DwellState::dark);
  CHECK(std::abs(rate - 1.0) < 4.0 * se);
  CHECK(se < 0.15);

  // The bright-side estimate inverts the ionization rate the same way.
  const auto [ion, ion_se] = estimate_rate(dwells, DwellState::bright);
  CHECK(std::abs(ion - 1.0) < 4.0 * ion_se);
}

TEST_CASE("threshold placement inside the valley barely moves the estimate") {
  // Counting contrast high enough that a 20% threshold shift stays many
  // shot-noise sigmas away from both intensity levels; otherwise spurious
  // two-bin dwells appear near the closer level and the premise is void.
  CycleSpec cycle;
  cycle.chain = {0.5, 1e9, 0.0};
  cycle.ionization_rate_Hz = 0.5;
  cycle.bright_count_rate_Hz = 8000.0;
  cycle.dark_count_rate_Hz = 50.0;
  const PhotonTrace trace = simulate_blinking(cycle, 1200.0, 0.01, 13);
  const double thr = choose_threshold(trace);

  const auto base = estimate_rate(extract_dwells(trace, thr), DwellState::dark);
  const auto low =
      estimate_rate(extract_dwells(trace, 0.8 * thr), DwellState::dark);
  const auto high =
      estimate_rate(extract_dwells(trace, 1.2 * thr), DwellState::dark);
  CHECK(std::abs(low.first - base.first) < base.second);
  CHECK(std::abs(high.first - base.first) < base.second);
}
