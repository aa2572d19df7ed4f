#pragma once

#include <utility>
#include <vector>

#include "nvcycle/franck_condon.hpp"
#include "nvcycle/units.hpp"

// Effective-mode transition rate: a small set of Lorentzian-broadened
// vibrational modes stands in for the full phonon bath. The power-normalised
// rate is a double sum over initial (thermal) and final occupation vectors,
// each term weighted by a Boltzmann factor, a resonance Lorentzian, and a
// product of per-mode Franck-Condon factors.

namespace nvcycle {

inline constexpr std::size_t kMaxModes = 4;

struct ModeSet {
  std::vector<PhononMode> modes;
  double lorentzian_fwhm_meV;  // shared broadening Gamma, FWHM
  double scale;                // merged prefactor times dipole strength

  ModeSet(std::vector<PhononMode> modes_, double lorentzian_fwhm_meV_,
          double scale_ = 1.0);
};

// One quanta count per mode, in ModeSet order.
using OccupationVector = std::vector<int>;

struct EnumerationLimits {
  int max_quanta_per_mode = 12;
  // Initial states with Boltzmann weight below this fraction of the ground
  // state are dropped.
  double boltzmann_cutoff = 1e-9;
  // (initial, final) pairs whose resonance mismatch exceeds this many
  // Lorentzian half-widths (Gamma/2) are dropped.
  double lorentzian_window_halfwidths = 40.0;

  void validate() const;
};

// Unnormalised thermal weight exp(-sum_k n_k hbar omega_k / kT); at T = 0
// the zero vector gets 1 and everything else 0.
double boltzmann_weight(const OccupationVector& n_g, const ModeSet& modes,
                        TemperatureK T);

// 1 / (1 + (E / (Gamma/2))^2): peak 1 at E = 0, value 1/2 at |E| = Gamma/2.
double lorentzian(double energy_meV, double fwhm_meV);

// Power-density-normalised transition rate at excitation wavelength lambda
// and temperature T. Enumeration visits exactly the occupation pairs inside
// the Boltzmann cutoff and the Lorentzian resonance window, so tightening
// the limits can only remove non-negative terms.
double rate_per_power(WavelengthNm lambda, TemperatureK T, const ModeSet& modes,
                      WavelengthNm zpl, const EnumerationLimits& limits = {});

// Electron-phonon coupling spectrum: sum_k Lorentzian(hbar omega_k - E) S_k
// on the given energy grid (meV). Grid must be non-empty and ascending.
std::vector<std::pair<double, double>> coupling_spectrum(
    const ModeSet& modes, const std::vector<double>& grid_meV);

}  // namespace nvcycle
