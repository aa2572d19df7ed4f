#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "nvcycle/csv.hpp"
#include "nvcycle/errors.hpp"
#include "nvcycle/quasi_continuum.hpp"
#include "nvcycle/rng.hpp"
#include "nvcycle/units.hpp"

using namespace nvcycle;

namespace {

const WavelengthNm kZpl{constants::zpl_nv0_nm};

WavelengthNm wavelength_at_detuning(double detuning_meV) {
  const double e_zpl = wavelength_to_energy(kZpl).value;
  return energy_to_wavelength(EnergyMeV{e_zpl - detuning_meV});
}

// Narrow triangular line at eps0 with unit-normalised integrated weight w.
// The flanking samples carry zero density, so the trapezoid rule integrates
// the triangle exactly: w * exp(-eps0 / kT) whenever the window contains it.
EmissionSpectrum spike(double eps0, double weight, double half_width = 0.5) {
  EmissionSpectrum s;
  s.samples = {{0.0, 0.0},
               {eps0 - half_width, 0.0},
               {eps0, weight / half_width},
               {eps0 + half_width, 0.0},
               {eps0 + 50.0, 0.0}};
  return s;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("spectrum validation") {
  EmissionSpectrum s;
  s.samples = {{0.0, 1.0}};
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.samples = {{0.0, 1.0}, {-1.0, 1.0}};
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.samples = {{0.0, 1.0}, {5.0, -0.2}};
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.samples = {{0.0, 1.0}, {5.0, 1.0}, {5.0, 2.0}};
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("non-increasing"),
                       ValidationError);
  s.samples = {{0.0, 1.0}, {5.0, 1.0}, {10.0, 0.0}};
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("params validation") {
  QuasiContinuumParams p;
  p.scale = 0.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("narrow line crossed by the window gives the closed form") {
  const double weight = 0.8;
  const EmissionSpectrum s = spike(30.0, weight);
  QuasiContinuumParams params;
  params.scale = 2.0;
  const TemperatureK T{300.0};
  const double kT = constants::kB_meV_per_K * 300.0;

  const double rate =
      qc_rate_per_power(wavelength_at_detuning(20.0), T, s, params);
  const double expected = params.scale * weight * std::exp(-30.0 / kT);
  CHECK(rate == doctest::Approx(expected).epsilon(1e-10));
  CHECK(expected == doctest::Approx(params.scale * weight * 0.3133)
                        .epsilon(1e-3));
}

TEST_CASE("narrow line outside the window contributes nothing") {
  const EmissionSpectrum s = spike(30.0, 1.0);
  const double rate = qc_rate_per_power(wavelength_at_detuning(35.0),
                                        TemperatureK{300.0}, s,
                                        QuasiContinuumParams{});
  CHECK(rate == 0.0);
}

TEST_CASE("infinite temperature recovers the bare spectral weight") {
  EmissionSpectrum s;
  s.samples = {{0.0, 0.5}, {50.0, 0.5}, {100.0, 0.5}};
  const double total = 0.5 * 100.0;
  const double rate = qc_rate_per_power(WavelengthNm{575.0}, TemperatureK{1e10},
                                        s, QuasiContinuumParams{});
  CHECK(rate == doctest::Approx(total).epsilon(1e-6));
}

TEST_CASE("zero temperature freezes the rate") {
  const EmissionSpectrum s = spike(30.0, 1.0);
  CHECK(qc_rate_per_power(wavelength_at_detuning(10.0), TemperatureK{0.0}, s,
                          QuasiContinuumParams{}) == 0.0);
}

TEST_CASE("window cut inside a sample interval interpolates the product") {
  // Density ramp 1 -> 2 over [0, 10]; at near-infinite temperature the
  // Boltzmann factor is flat, so the integral over [4, 10] is elementary.
  EmissionSpectrum s;
  s.samples = {{0.0, 1.0}, {10.0, 2.0}};
  const double rate = qc_rate_per_power(wavelength_at_detuning(4.0),
                                        TemperatureK{1e10}, s,
                                        QuasiContinuumParams{});
  CHECK(rate == doctest::Approx(0.5 * (1.4 + 2.0) * 6.0).epsilon(1e-6));
}

TEST_CASE("rate is linear in the spectrum") {
  const EmissionSpectrum a = spike(15.0, 0.3);
  const EmissionSpectrum b = spike(25.0, 0.6);
  EmissionSpectrum both;
  both.samples = {{0.0, 0.0},   {14.5, 0.0}, {15.0, 0.6}, {15.5, 0.0},
                  {24.5, 0.0},  {25.0, 1.2}, {25.5, 0.0}, {65.0, 0.0}};
  const WavelengthNm lambda = wavelength_at_detuning(10.0);
  const TemperatureK T{250.0};
  const QuasiContinuumParams p;
  const double ra = qc_rate_per_power(lambda, T, a, p);
  const double rb = qc_rate_per_power(lambda, T, b, p);
  const double rboth = qc_rate_per_power(lambda, T, both, p);
  CHECK(rboth == doctest::Approx(ra + rb).epsilon(1e-12));
}

TEST_CASE("rate is monotone in wavelength and temperature") {
  Rng rng(2026);
  for (int trial = 0; trial < 20; ++trial) {
    EmissionSpectrum s;
    double eps = 0.0;
    while (eps < 120.0) {
      s.samples.push_back({eps, 0.05 + rng.uniform()});
      eps += 0.5 + 4.0 * rng.uniform();
    }
    s.samples.push_back({eps, 0.05});
    const QuasiContinuumParams p;

    double last = qc_rate_per_power(WavelengthNm{576.0}, TemperatureK{300.0},
                                    s, p);
    for (double nm = 578.0; nm <= 600.0; nm += 2.0) {
      const double r =
          qc_rate_per_power(WavelengthNm{nm}, TemperatureK{300.0}, s, p);
      CHECK(r <= last);
      last = r;
    }

    last = 0.0;
    for (double T = 50.0; T <= 350.0; T += 50.0) {
      const double r =
          qc_rate_per_power(WavelengthNm{590.0}, TemperatureK{T}, s, p);
      CHECK(r >= last);
      last = r;
    }
  }
}

TEST_CASE("halving the sampling step barely moves a smooth spectrum") {
  const auto density = [](double eps) {
    return std::exp(-(eps - 40.0) * (eps - 40.0) / 200.0);
  };
  const auto sampled = [&](double step) {
    EmissionSpectrum s;
    for (double eps = 0.0; eps <= 100.0 + 1e-9; eps += step)
      s.samples.push_back({eps, density(eps)});
    return s;
  };
  const WavelengthNm lambda = wavelength_at_detuning(20.0);
  const TemperatureK T{300.0};
  const QuasiContinuumParams p;
  const double coarse = qc_rate_per_power(lambda, T, sampled(0.5), p);
  const double fine = qc_rate_per_power(lambda, T, sampled(0.25), p);
  CHECK(coarse == doctest::Approx(fine).epsilon(1e-4));
}

TEST_CASE("grid evaluation covers the wavelength-temperature product") {
  const EmissionSpectrum s = spike(30.0, 1.0);
  std::vector<WavelengthNm> lambdas;
  for (double nm = 580.0; nm <= 600.0; nm += 1.0) lambdas.push_back(WavelengthNm{nm});
  const std::vector<TemperatureK> temps{TemperatureK{100.0}, TemperatureK{200.0},
                                        TemperatureK{300.0}};
  const RateCurve curve = qc_rate_curve(lambdas, temps, s, {});
  CHECK(curve.points.size() == 63);
  for (const RatePoint& pt : curve.points) {
    CHECK(pt.stderr_Hz == 0.0);
    CHECK(pt.n_dwells == 0);
  }
  CHECK(qc_rate_curve({}, temps, s, {}).points.empty());
}

TEST_CASE("spectrum files round-trip through both abscissa conventions") {
  const auto path = temp_file("nvcycle_spectrum_test.csv");
  const EmissionSpectrum s = spike(30.0, 1.0);
  write_spectrum(path.string(), s);
  const EmissionSpectrum back =
      load_spectrum(path.string(), SpectrumConvention::detuning);
  REQUIRE(back.samples.size() == s.samples.size());
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    CHECK(back.samples[i].first == s.samples[i].first);
    CHECK(back.samples[i].second == s.samples[i].second);
  }

  // Photon-energy convention: abscissa E = E_zpl - eps, descending in eps.
  const double e_zpl = wavelength_to_energy(kZpl).value;
  {
    std::ofstream out(path);
    out << "# schema=spectrum/v1\nphoton_energy_meV,density\n";
    for (auto it = s.samples.rbegin(); it != s.samples.rend(); ++it)
      out << csv::format_double(e_zpl - it->first) << ","
          << csv::format_double(it->second) << "\n";
  }
  const EmissionSpectrum conv =
      load_spectrum(path.string(), SpectrumConvention::photon_energy, kZpl);
  REQUIRE(conv.samples.size() == s.samples.size());
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    CHECK(conv.samples[i].first ==
          doctest::Approx(s.samples[i].first).epsilon(1e-12));
    CHECK(conv.samples[i].second == s.samples[i].second);
  }
  std::filesystem::remove(path);
}
