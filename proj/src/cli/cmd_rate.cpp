#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cli_internal.hpp"
#include "nvcycle/csv.hpp"
#include "nvcycle/errors.hpp"
#include "nvcycle/quasi_continuum.hpp"
#include "nvcycle/rate_curve.hpp"

namespace nvcycle::cli {

namespace {

struct RatePlan {
  CommonArgs common;
  std::string out_name;
  std::vector<double> wavelengths_nm;
  std::vector<double> temperatures_K;
  WavelengthNm zpl{constants::zpl_nv0_nm};
  // Quasi-continuum payload.
  std::optional<EmissionSpectrum> spectrum;
  QuasiContinuumParams qc_params;
  // Effective-mode payload.
  std::optional<ModeSet> modeset;
  EnumerationLimits limits;
};

void check_unique(const std::vector<double>& values, const std::string& what) {
  const std::set<double> uniq(values.begin(), values.end());
  if (uniq.size() != values.size())
    throw ConfigError("rate: duplicate entries in " + what);
}

RatePlan make_plan(const RateArgs& args) {
  RatePlan plan;
  plan.common = args.common;
  const nlohmann::json config = load_json_file(args.config_path);

  if (args.model == "qc") {
    const std::string context = "rate_qc";
    check_keys(config, context,
               {"schema", "spectrum_file", "convention", "scale", "zpl_nm",
                "temperatures_K", "wavelengths_nm", "out"});
    plan.zpl = WavelengthNm{
        number_or(config, "zpl_nm", constants::zpl_nv0_nm, context)};
    const std::string convention =
        string_or(config, "convention", "detuning", context);
    SpectrumConvention conv = SpectrumConvention::detuning;
    if (convention == "photon_energy")
      conv = SpectrumConvention::photon_energy;
    else if (convention != "detuning")
      throw ConfigError(context + ": convention must be 'detuning' or 'photon_energy'");
    plan.spectrum = load_spectrum(string_at(config, "spectrum_file", context),
                                  conv, plan.zpl);
    plan.qc_params.scale = number_or(config, "scale", 1.0, context);
    plan.qc_params.zpl = plan.zpl;
    plan.qc_params.validate();
    plan.out_name = string_or(config, "out", "rates_qc.csv", context);
  } else {
    const std::string context = "rate_em";
    check_keys(config, context,
               {"schema", "modeset", "modeset_file", "limits", "zpl_nm",
                "temperatures_K", "wavelengths_nm", "out"});
    plan.zpl = WavelengthNm{
        number_or(config, "zpl_nm", constants::zpl_nv0_nm, context)};
    plan.modeset = load_modeset(config, context);
    plan.limits = limits_or_default(config, context);
    plan.out_name = string_or(config, "out", "rates_em.csv", context);
  }

  const std::string context = args.model == "qc" ? "rate_qc" : "rate_em";
  plan.wavelengths_nm = number_list_at(config, "wavelengths_nm", context);
  plan.temperatures_K = number_list_at(config, "temperatures_K", context);
  check_unique(plan.wavelengths_nm, "wavelengths_nm");
  check_unique(plan.temperatures_K, "temperatures_K");
  if (!args.out_override.empty()) plan.out_name = args.out_override;
  return plan;
}

int execute(const RatePlan& plan) {
  ensure_dir(plan.common.output_dir);
  RateCurve curve;
  for (double T : plan.temperatures_K)
    for (double wl : plan.wavelengths_nm) {
      double rate = 0.0;
      try {
        if (plan.spectrum)
          rate = qc_rate_per_power(WavelengthNm{wl}, TemperatureK{T},
                                   *plan.spectrum, plan.qc_params);
        else
          rate = rate_per_power(WavelengthNm{wl}, TemperatureK{T},
                                *plan.modeset, plan.zpl, plan.limits);
      } catch (const std::exception& e) {
        throw NumericError("rate evaluation failed at (" +
                           csv::format_double(wl) + " nm, " +
                           csv::format_double(T) + " K): " + e.what());
      }
      curve.points.push_back({wl, T, rate, 0.0, 0});
    }

  const std::string path = join_path(plan.common.output_dir, plan.out_name);
  write_rate_curve(path, curve);
  note(plan.common, "wrote " + path);
  return 0;
}

}  // namespace

int cmd_rate(const RateArgs& args) {
  return run_phases([&] { return make_plan(args); }, execute);
}

}  // namespace nvcycle::cli
