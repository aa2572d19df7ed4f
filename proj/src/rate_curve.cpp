#include "nvcycle/rate_curve.hpp"

#include <cmath>
#include <string>

#include "nvcycle/csv.hpp"
#include "nvcycle/errors.hpp"

namespace nvcycle {

void RateCurve::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const RatePoint& p = points[i];
    if (!(p.wavelength_nm > 0.0))
      throw ValidationError("rate point wavelength must be positive");
    if (!(p.temperature_K >= 0.0))
      throw ValidationError("rate point temperature must be >= 0");
    if (!(p.rate_Hz >= 0.0) || !std::isfinite(p.rate_Hz))
      throw ValidationError("rate must be finite and >= 0");
    if (!(p.stderr_Hz >= 0.0))
      throw ValidationError("rate stderr must be >= 0");
    if (p.n_dwells < 0) throw ValidationError("n_dwells must be >= 0");
    for (std::size_t j = 0; j < i; ++j)
      if (points[j].wavelength_nm == p.wavelength_nm &&
          points[j].temperature_K == p.temperature_K)
        throw ValidationError("duplicate (wavelength, temperature) key in rate curve");
  }
}

void write_rate_curve(const std::string& path, const RateCurve& curve) {
  curve.validate();
  csv::Table table;
  table.schema = "rates/v1";
  table.header = {"wavelength_nm", "temperature_K", "rate_Hz", "stderr_Hz",
                  "n_dwells"};
  for (const RatePoint& p : curve.points)
    table.rows.push_back({p.wavelength_nm, p.temperature_K, p.rate_Hz,
                          p.stderr_Hz, static_cast<double>(p.n_dwells)});
  csv::write_table_file(path, table);
}

RateCurve read_rate_curve(const std::string& path) {
  const csv::Table table = csv::read_table_file(path);
  const std::size_t c_wl = table.column("wavelength_nm");
  const std::size_t c_T = table.column("temperature_K");
  const std::size_t c_rate = table.column("rate_Hz");
  const std::size_t c_err = table.column("stderr_Hz");
  const std::size_t c_n = table.column("n_dwells");
  RateCurve curve;
  for (const auto& row : table.rows)
    curve.points.push_back({row[c_wl], row[c_T], row[c_rate], row[c_err],
                            static_cast<long>(row[c_n])});
  curve.validate();
  return curve;
}

}  // namespace nvcycle
