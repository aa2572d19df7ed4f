#pragma once

#include <string>
#include <vector>

// Rate-versus-condition dataset: one transition rate per (wavelength,
// temperature) pair, with uncertainty and dwell count when it came from a
// measurement. Shared by the model evaluators (which leave stderr at 0),
// the blinking analysis, and the fitting layer.

namespace nvcycle {

struct RatePoint {
  double wavelength_nm = 0.0;
  double temperature_K = 0.0;
  double rate_Hz = 0.0;
  double stderr_Hz = 0.0;
  long n_dwells = 0;
};

struct RateCurve {
  std::vector<RatePoint> points;

  // Enforces positive wavelengths, non-negative everything else, and unique
  // (wavelength, temperature) keys.
  void validate() const;
};

// CSV: schema rates/v1, columns
// wavelength_nm,temperature_K,rate_Hz,stderr_Hz,n_dwells
void write_rate_curve(const std::string& path, const RateCurve& curve);
RateCurve read_rate_curve(const std::string& path);

}  // namespace nvcycle
