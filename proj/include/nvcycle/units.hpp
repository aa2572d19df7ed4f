#pragma once

#include <cmath>

#include "nvcycle/errors.hpp"

// Unit conventions used across the library: energies in meV, rates in Hz,
// times in seconds, wavelengths in nm, temperatures in K, displacements of
// mass-weighted coordinates in sqrt(amu)*Angstrom.

namespace nvcycle {

namespace constants {

// hc in meV*nm, from the exact SI values of h, c, e.
inline constexpr double hc_meV_nm = 1239841.9843320026;

// Boltzmann constant in meV/K (exact SI k_B over exact elementary charge).
inline constexpr double kB_meV_per_K = 0.08617333262145177;

// hbar^2 expressed in meV * amu * Angstrom^2. Converts between mode energy
// [meV], mass-weighted displacement [sqrt(amu)*A] and dimensionless
// electron-phonon coupling: S = E_meV * dQ^2 / (2 * hbar_sq_meV_amu_A2).
inline constexpr double hbar_sq_meV_amu_A2 = 4.180159285619250;

// Zero-phonon lines of the two charge states, nm.
inline constexpr double zpl_nv0_nm = 575.0;
inline constexpr double zpl_nvm_nm = 637.0;

}  // namespace constants

struct EnergyMeV {
  double value = 0.0;  // meV

  constexpr EnergyMeV() = default;
  explicit constexpr EnergyMeV(double meV) : value(meV) {}
};

struct WavelengthNm {
  double value;  // nm, > 0

  explicit WavelengthNm(double nm) : value(nm) {
    if (!(nm > 0.0)) throw DomainError("wavelength must be positive (nm)");
  }
};

struct TemperatureK {
  double value;  // K, >= 0

  explicit TemperatureK(double kelvin) : value(kelvin) {
    if (!(kelvin >= 0.0)) throw DomainError("temperature must be >= 0 K");
  }
};

inline EnergyMeV wavelength_to_energy(WavelengthNm lambda) {
  return EnergyMeV{constants::hc_meV_nm / lambda.value};
}

inline WavelengthNm energy_to_wavelength(EnergyMeV energy) {
  if (!(energy.value > 0.0))
    throw DomainError("photon energy must be positive to convert to a wavelength");
  return WavelengthNm{constants::hc_meV_nm / energy.value};
}

// Detuning of the excitation photon below the zero-phonon line,
// E_zpl - E_lambda >= 0. Only sub-resonant excitation is in scope.
inline EnergyMeV detuning_below_zpl(WavelengthNm lambda, WavelengthNm zpl) {
  if (lambda.value < zpl.value)
    throw DomainError("super-resonant excitation out of scope (lambda < zpl)");
  return EnergyMeV{constants::hc_meV_nm / zpl.value -
                   constants::hc_meV_nm / lambda.value};
}

// exp(-E/kT) with the T = 0 limit taken without dividing by zero.
inline double boltzmann_factor(double energy_meV, TemperatureK T) {
  if (T.value == 0.0) return energy_meV <= 0.0 ? 1.0 : 0.0;
  return std::exp(-energy_meV / (constants::kB_meV_per_K * T.value));
}

}  // namespace nvcycle
