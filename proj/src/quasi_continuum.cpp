#include "nvcycle/quasi_continuum.hpp"

#include <algorithm>
#include <cmath>

#include "nvcycle/csv.hpp"
#include "nvcycle/errors.hpp"

namespace nvcycle {

void EmissionSpectrum::validate() const {
  if (samples.size() < 2)
    throw ValidationError("spectrum needs at least 2 samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i].first >= 0.0))
      throw ValidationError("spectrum detuning must be >= 0 meV");
    if (!(samples[i].second >= 0.0))
      throw ValidationError("spectrum density must be >= 0");
    if (i > 0 && !(samples[i].first > samples[i - 1].first))
      throw ValidationError("non-increasing abscissa in spectrum");
  }
}

EmissionSpectrum load_spectrum(const std::string& path,
                               SpectrumConvention convention,
                               WavelengthNm zpl) {
  const csv::Table table = csv::read_table_file(path);
  const char* abscissa = convention == SpectrumConvention::detuning
                             ? "epsilon_meV"
                             : "photon_energy_meV";
  const std::size_t c_e = table.column(abscissa);
  const std::size_t c_d = table.column("density");

  EmissionSpectrum spectrum;
  const std::string& label = table.meta_value("source_label");
  if (!label.empty()) spectrum.source_label = label;
  const double e_zpl = wavelength_to_energy(zpl).value;
  for (const auto& row : table.rows) {
    const double eps = convention == SpectrumConvention::detuning
                           ? row[c_e]
                           : e_zpl - row[c_e];
    spectrum.samples.emplace_back(eps, row[c_d]);
  }
  // Photon-energy files run high-to-low energy; detuning order reverses.
  std::sort(spectrum.samples.begin(), spectrum.samples.end());
  spectrum.validate();
  return spectrum;
}

void write_spectrum(const std::string& path, const EmissionSpectrum& spectrum) {
  spectrum.validate();
  csv::Table table;
  table.schema = "spectrum/v1";
  table.meta.emplace_back("source_label", spectrum.source_label);
  table.header = {"epsilon_meV", "density"};
  for (const auto& [eps, density] : spectrum.samples)
    table.rows.push_back({eps, density});
  csv::write_table_file(path, table);
}

void QuasiContinuumParams::validate() const {
  if (!(scale > 0.0)) throw DomainError("scale must be positive");
}

double qc_rate_per_power(WavelengthNm lambda, TemperatureK T,
                         const EmissionSpectrum& spectrum,
                         const QuasiContinuumParams& params) {
  spectrum.validate();
  params.validate();
  const double detuning = detuning_below_zpl(lambda, params.zpl).value;
  if (T.value == 0.0) return 0.0;

  const double e_zpl = wavelength_to_energy(params.zpl).value;
  const double lo = std::max(detuning, spectrum.samples.front().first);
  const double hi = std::min(e_zpl, spectrum.samples.back().first);
  if (!(lo < hi)) return 0.0;  // window misses the sampled support

  // Trapezoid over the Boltzmann-weighted density. Windows cutting a sample
  // interval interpolate the weighted product linearly, which keeps the
  // result monotone in the window edges.
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < spectrum.samples.size(); ++i) {
    const auto& [e0, d0] = spectrum.samples[i];
    const auto& [e1, d1] = spectrum.samples[i + 1];
    const double a = std::max(e0, lo);
    const double b = std::min(e1, hi);
    if (!(a < b)) continue;
    const double f0 = d0 * boltzmann_factor(e0, T);
    const double f1 = d1 * boltzmann_factor(e1, T);
    const double fa = f0 + (f1 - f0) * (a - e0) / (e1 - e0);
    const double fb = f0 + (f1 - f0) * (b - e0) / (e1 - e0);
    integral += 0.5 * (fa + fb) * (b - a);
  }
  return params.scale * integral;
}

RateCurve qc_rate_curve(const std::vector<WavelengthNm>& lambda_grid,
                        const std::vector<TemperatureK>& temperatures,
                        const EmissionSpectrum& spectrum,
                        const QuasiContinuumParams& params) {
  RateCurve curve;
  for (const TemperatureK& T : temperatures)
    for (const WavelengthNm& lambda : lambda_grid)
      curve.points.push_back(
          {lambda.value, T.value,
           qc_rate_per_power(lambda, T, spectrum, params), 0.0, 0});
  curve.validate();
  return curve;
}

}  // namespace nvcycle
