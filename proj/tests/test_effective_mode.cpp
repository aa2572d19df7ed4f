#include <cmath>
#include <utility>
#include <vector>

#include "brute_force.hpp"
#include "doctest.h"
#include "nvcycle/effective_mode.hpp"
#include "nvcycle/errors.hpp"
#include "nvcycle/units.hpp"

using namespace nvcycle;

namespace {

const WavelengthNm kZpl{constants::zpl_nv0_nm};

WavelengthNm wavelength_at_detuning(double detuning_meV) {
  const double e_zpl = wavelength_to_energy(kZpl).value;
  return energy_to_wavelength(EnergyMeV{e_zpl - detuning_meV});
}

ModeSet two_mode_set(double gamma = 5.0, double scale = 1.0) {
  return ModeSet({PhononMode(43.0, 0.3, "quasi-local"),
                  PhononMode(9.0, 0.5, "acoustic")},
                 gamma, scale);
}

EnumerationLimits unpruned_limits(int cap) {
  EnumerationLimits lim;
  lim.max_quanta_per_mode = cap;
  lim.boltzmann_cutoff = 1e-30;
  lim.lorentzian_window_halfwidths = 1e6;
  return lim;
}

}  // namespace

TEST_CASE("mode set construction validates its fields") {
  CHECK_THROWS_AS(ModeSet({}, 5.0), ValidationError);
  CHECK_THROWS_AS(ModeSet({PhononMode(43.0, 0.3)}, 0.0), DomainError);
  CHECK_THROWS_AS(ModeSet({PhononMode(43.0, 0.3)}, 5.0, 0.0), DomainError);
  std::vector<PhononMode> five(5, PhononMode(10.0, 0.1));
  CHECK_THROWS_AS(ModeSet(std::move(five), 5.0), CapacityError);
}

TEST_CASE("enumeration limits validate") {
  EnumerationLimits lim;
  lim.max_quanta_per_mode = 0;
  CHECK_THROWS_AS(lim.validate(), ValidationError);
  lim = {};
  lim.boltzmann_cutoff = 0.0;
  CHECK_THROWS_AS(lim.validate(), ValidationError);
  lim.boltzmann_cutoff = 1.0;
  CHECK_THROWS_AS(lim.validate(), ValidationError);
  lim = {};
  lim.lorentzian_window_halfwidths = 0.0;
  CHECK_THROWS_AS(lim.validate(), ValidationError);
  CHECK_NOTHROW(EnumerationLimits{}.validate());
}

TEST_CASE("thermal weight of simple occupations") {
  const ModeSet quasi_local({PhononMode(43.0, 0.3)}, 5.0);
  CHECK(boltzmann_weight({0}, quasi_local, TemperatureK{300.0}) == 1.0);
  CHECK(boltzmann_weight({1}, quasi_local, TemperatureK{300.0}) ==
        doctest::Approx(0.1896).epsilon(1e-3));
  const ModeSet acoustic({PhononMode(9.0, 0.5)}, 5.0);
  CHECK(boltzmann_weight({1}, acoustic, TemperatureK{100.0}) ==
        doctest::Approx(0.3519).epsilon(1e-3));
}

TEST_CASE("thermal weight at T = 0 selects the ground state") {
  const ModeSet set = two_mode_set();
  CHECK(boltzmann_weight({0, 0}, set, TemperatureK{0.0}) == 1.0);
  CHECK(boltzmann_weight({1, 0}, set, TemperatureK{0.0}) == 0.0);
  CHECK(boltzmann_weight({0, 3}, set, TemperatureK{0.0}) == 0.0);
}

TEST_CASE("thermal weight rejects mismatched occupation vectors") {
  const ModeSet set = two_mode_set();
  CHECK_THROWS_AS(boltzmann_weight({0}, set, TemperatureK{300.0}),
                  ValidationError);
  CHECK_THROWS_AS(boltzmann_weight({0, -1}, set, TemperatureK{300.0}),
                  DomainError);
}

TEST_CASE("lorentzian profile values") {
  CHECK(lorentzian(0.0, 2.0) == 1.0);
  CHECK(lorentzian(1.0, 2.0) == 0.5);
  CHECK(lorentzian(-1.0, 2.0) == 0.5);
  CHECK(lorentzian(5.0, 2.0) == doctest::Approx(1.0 / 26.0).epsilon(1e-14));
  CHECK_THROWS_AS(lorentzian(1.0, 0.0), DomainError);
}

TEST_CASE("single resonant term dominates a cold sparse spectrum") {
  // One 43 meV mode pumped one quantum below the line: the (1, 0) term sits
  // exactly on resonance and everything else is detuned by >= 43 meV.
  const ModeSet set({PhononMode(43.0, 0.5)}, 4.0);
  const WavelengthNm lambda = wavelength_at_detuning(43.0);
  const TemperatureK T{300.0};
  const double dominant = boltzmann_weight({1}, set, T) * 1.0 *
                          fc_overlap_sq(0.5, 1, 0);
  const double rate = rate_per_power(lambda, T, set, kZpl, unpruned_limits(12));
  CHECK(rate > dominant);
  CHECK(rate == doctest::Approx(dominant).epsilon(0.10));
}

TEST_CASE("pruned enumeration matches the brute-force reference") {
  const ModeSet set = two_mode_set();
  const EnumerationLimits lim = unpruned_limits(8);
  for (double T : {0.0, 150.0, 300.0})
    for (double nm : {576.0, 585.0, 600.0}) {
      const double fast =
          rate_per_power(WavelengthNm{nm}, TemperatureK{T}, set, kZpl, lim);
      const double brute = testing::brute_force_rate(
          WavelengthNm{nm}, TemperatureK{T}, set, kZpl, 8);
      if (brute == 0.0)
        CHECK(fast == 0.0);
      else
        CHECK(fast == doctest::Approx(brute).epsilon(1e-9));
    }
}

TEST_CASE("default limits stay close to the unpruned sum") {
  const ModeSet set = two_mode_set();
  const double full = testing::brute_force_rate(WavelengthNm{585.0},
                                                TemperatureK{300.0}, set, kZpl,
                                                12);
  const double pruned = rate_per_power(WavelengthNm{585.0}, TemperatureK{300.0},
                                       set, kZpl, EnumerationLimits{});
  CHECK(pruned <= full * (1.0 + 1e-12));
  CHECK(pruned == doctest::Approx(full).epsilon(5e-3));
}

TEST_CASE("tightening any limit can only lower the rate") {
  const ModeSet set = two_mode_set();
  const WavelengthNm lambda{585.0};
  const TemperatureK T{300.0};
  const auto rate = [&](int cap, double cutoff, double halfwidths) {
    EnumerationLimits lim;
    lim.max_quanta_per_mode = cap;
    lim.boltzmann_cutoff = cutoff;
    lim.lorentzian_window_halfwidths = halfwidths;
    return rate_per_power(lambda, T, set, kZpl, lim);
  };
  const double slack = 1.0 + 1e-12;
  CHECK(rate(4, 1e-9, 40.0) <= rate(8, 1e-9, 40.0) * slack);
  CHECK(rate(8, 1e-9, 40.0) <= rate(12, 1e-9, 40.0) * slack);
  CHECK(rate(12, 1e-3, 40.0) <= rate(12, 1e-9, 40.0) * slack);
  CHECK(rate(12, 1e-9, 40.0) <= rate(12, 1e-12, 40.0) * slack);
  CHECK(rate(12, 1e-9, 5.0) <= rate(12, 1e-9, 40.0) * slack);
  CHECK(rate(12, 1e-9, 40.0) <= rate(12, 1e-9, 1e6) * slack);
}

TEST_CASE("rate grows with temperature below the line") {
  const ModeSet set = two_mode_set();
  const WavelengthNm lambda{585.0};
  double last = rate_per_power(lambda, TemperatureK{50.0}, set, kZpl);
  for (double T = 100.0; T <= 350.0; T += 50.0) {
    const double r = rate_per_power(lambda, TemperatureK{T}, set, kZpl);
    CHECK(r >= last);
    last = r;
  }
}

TEST_CASE("scale multiplies the rate exactly") {
  const ModeSet unit = two_mode_set(5.0, 1.0);
  const ModeSet tripled = two_mode_set(5.0, 3.0);
  const double r1 =
      rate_per_power(WavelengthNm{590.0}, TemperatureK{250.0}, unit, kZpl);
  const double r3 =
      rate_per_power(WavelengthNm{590.0}, TemperatureK{250.0}, tripled, kZpl);
  CHECK(r3 == 3.0 * r1);
}

TEST_CASE("frozen lattice far below the line gives a vanishing rate") {
  // At T = 0 only the vibrational ground state is populated, and a detuning
  // beyond the resonance window leaves no term to collect.
  const ModeSet set = two_mode_set(5.0);
  EnumerationLimits lim;
  lim.lorentzian_window_halfwidths = 4.0;  // 10 meV window
  const double r =
      rate_per_power(WavelengthNm{600.0}, TemperatureK{0.0}, set, kZpl, lim);
  CHECK(r == 0.0);
}

TEST_CASE("frozen lattice inside the window keeps the elastic tail") {
  const ModeSet set = two_mode_set(5.0);
  const double r =
      rate_per_power(WavelengthNm{576.0}, TemperatureK{0.0}, set, kZpl);
  CHECK(r > 0.0);
}

TEST_CASE("unreachable resonance window reports a capacity problem") {
  const ModeSet set({PhononMode(9.0, 0.5)}, 5.0);
  EnumerationLimits lim;
  lim.max_quanta_per_mode = 3;  // reach 27 meV, detuning needs ~80
  lim.lorentzian_window_halfwidths = 4.0;
  CHECK_THROWS_AS(
      rate_per_power(WavelengthNm{600.0}, TemperatureK{300.0}, set, kZpl, lim),
      CapacityError);
  // Thermally frozen: the cap never matters, so this is a plain zero.
  CHECK(rate_per_power(WavelengthNm{600.0}, TemperatureK{0.0}, set, kZpl,
                       lim) == 0.0);
}

TEST_CASE("super-resonant excitation is out of scope") {
  const ModeSet set = two_mode_set();
  CHECK_THROWS_AS(
      rate_per_power(WavelengthNm{560.0}, TemperatureK{300.0}, set, kZpl),
      DomainError);
}

TEST_CASE("coupling spectrum peaks at the mode energies") {
  const ModeSet set = two_mode_set(5.0);
  const auto at = [&](double e) {
    return coupling_spectrum(set, {e}).front().second;
  };
  CHECK(at(43.0) == doctest::Approx(0.3).epsilon(2e-2));
  CHECK(at(9.0) == doctest::Approx(0.5).epsilon(2e-2));
  CHECK(at(43.0 + 2.5) > 0.3 * 0.45);  // half maximum at half width
  CHECK(at(70.0) < 0.05);
  const ModeSet silent({PhononMode(30.0, 0.0)}, 5.0);
  CHECK(coupling_spectrum(silent, {10.0, 30.0, 50.0})[1].second == 0.0);
}

TEST_CASE("coupling spectrum grid must be ascending and non-empty") {
  const ModeSet set = two_mode_set();
  CHECK_THROWS_AS(coupling_spectrum(set, {}), ValidationError);
  CHECK_THROWS_AS(coupling_spectrum(set, {10.0, 5.0}), ValidationError);
}
