#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nvcycle/rate_curve.hpp"
#include "nvcycle/units.hpp"

// Quasi-continuum transition rate: the phonon sideband is described by a
// sampled emission spectral density A_em(epsilon) versus detuning from the
// ZPL, and the up-conversion rate is the Boltzmann-weighted integral of that
// density over the energies a thermal phonon can supply.

namespace nvcycle {

struct EmissionSpectrum {
  // (detuning_meV, density), detunings strictly increasing, densities >= 0.
  std::vector<std::pair<double, double>> samples;
  std::string source_label = "unspecified";

  void validate() const;
};

// Whether a spectrum file's abscissa is already a detuning from the ZPL or
// an emitted-photon energy that must be converted at load time.
enum class SpectrumConvention { detuning, photon_energy };

// CSV loader: column epsilon_meV (detuning convention) or
// photon_energy_meV (photon-energy convention) plus density.
EmissionSpectrum load_spectrum(
    const std::string& path,
    SpectrumConvention convention = SpectrumConvention::detuning,
    WavelengthNm zpl = WavelengthNm{constants::zpl_nv0_nm});

void write_spectrum(const std::string& path, const EmissionSpectrum& spectrum);

struct QuasiContinuumParams {
  double scale = 1.0;  // merged prefactor times dipole strength
  WavelengthNm zpl{constants::zpl_nv0_nm};

  void validate() const;
};

// Power-density-normalised rate: scale * integral over
// epsilon in [E_zpl - E_lambda, E_zpl] of exp(-epsilon/kT) A_em(epsilon),
// trapezoidal on the sampled product with interpolated partial intervals.
// T = 0 returns 0.
double qc_rate_per_power(WavelengthNm lambda, TemperatureK T,
                         const EmissionSpectrum& spectrum,
                         const QuasiContinuumParams& params);

// Cartesian (wavelength x temperature) evaluation grid.
RateCurve qc_rate_curve(const std::vector<WavelengthNm>& lambda_grid,
                        const std::vector<TemperatureK>& temperatures,
                        const EmissionSpectrum& spectrum,
                        const QuasiContinuumParams& params);

}  // namespace nvcycle
