#include <string>
#include <vector>

#include "cli_internal.hpp"
#include "nvcycle/csv.hpp"
#include "nvcycle/errors.hpp"
#include "nvcycle/markov.hpp"
#include "nvcycle/units.hpp"

namespace nvcycle::cli {

namespace {

struct Scenario {
  double wavelength_nm = 0.0;
  double temperature_K = 0.0;
  CycleSpec cycle;
  std::uint64_t seed = 0;
  std::string filename;
};

struct SimulatePlan {
  CommonArgs common;
  double bin_width_s = 0.0;
  double duration_s = 0.0;
  std::uint64_t master_seed = 0;
  std::string prefix;
  std::vector<Scenario> scenarios;
};

std::string scenario_filename(const std::string& prefix, std::size_t index,
                              double wavelength_nm, double temperature_K) {
  std::string id = std::to_string(index);
  while (id.size() < 3) id.insert(id.begin(), '0');
  return prefix + "_" + id + "_wl" + csv::format_double(wavelength_nm) +
         "nm_T" + csv::format_double(temperature_K) + "K.csv";
}

ChainSpec chain_for(const nlohmann::json& recomb, double wavelength_nm,
                    double temperature_K) {
  const std::string context = "simulate.recombination";
  const std::string kind = string_at(recomb, "kind", context);
  if (kind == "mfpt") {
    check_keys(recomb, context, {"kind", "rate_Hz"});
    // gamma0 = gamma1 = 2R, mu1 = 0 has mean first-passage rate exactly R.
    const double rate = number_at(recomb, "rate_Hz", context);
    if (!(rate > 0.0)) throw ConfigError(context + ": rate_Hz must be positive");
    return {2.0 * rate, 2.0 * rate, 0.0};
  }
  if (kind == "chain") {
    check_keys(recomb, context, {"kind", "gamma0_Hz", "gamma1_Hz", "mu1_Hz"});
    ChainSpec chain{number_at(recomb, "gamma0_Hz", context),
                    number_at(recomb, "gamma1_Hz", context),
                    number_or(recomb, "mu1_Hz", 0.0, context)};
    chain.validate();
    return chain;
  }
  if (kind == "effective_mode") {
    check_keys(recomb, context,
               {"kind", "modeset", "modeset_file", "limits", "zpl_nm"});
    const ModeSet set = load_modeset(recomb, context);
    const EnumerationLimits limits = limits_or_default(recomb, context);
    const WavelengthNm zpl{number_or(recomb, "zpl_nm", constants::zpl_nv0_nm,
                                     context)};
    const double rate =
        rate_per_power(WavelengthNm{wavelength_nm},
                       TemperatureK{temperature_K}, set, zpl, limits);
    if (!(rate > 0.0))
      throw ConfigError(context + ": model recombination rate vanishes at (" +
                        csv::format_double(wavelength_nm) + " nm, " +
                        csv::format_double(temperature_K) +
                        " K); nothing to simulate");
    return {2.0 * rate, 2.0 * rate, 0.0};
  }
  throw ConfigError(context + ": unknown kind '" + kind + "'");
}

SimulatePlan make_plan(const SimulateArgs& args) {
  SimulatePlan plan;
  plan.common = args.common;
  const nlohmann::json config = load_json_file(args.config_path);
  const std::string context = "simulate";
  check_keys(config, context,
             {"schema", "seed", "output_prefix", "bin_width_s", "duration_s",
              "bright_count_rate_Hz", "dark_count_rate_Hz",
              "ionization_rate_Hz", "recombination", "wavelengths_nm",
              "temperatures_K"});

  plan.bin_width_s = number_at(config, "bin_width_s", context);
  plan.duration_s = number_at(config, "duration_s", context);
  if (!(plan.bin_width_s > 0.0) || !(plan.duration_s > 0.0))
    throw ConfigError(context + ": bin_width_s and duration_s must be positive");
  plan.master_seed = args.seed_override.value_or(
      static_cast<std::uint64_t>(integer_or(config, "seed", 1, context)));
  plan.prefix = string_or(config, "output_prefix", "trace", context);

  const double bright = number_at(config, "bright_count_rate_Hz", context);
  const double dark = number_at(config, "dark_count_rate_Hz", context);
  const double ionization = number_at(config, "ionization_rate_Hz", context);
  const auto wavelengths = number_list_at(config, "wavelengths_nm", context);
  const auto temperatures = number_list_at(config, "temperatures_K", context);
  const nlohmann::json& recomb = member(config, "recombination", context);

  std::size_t index = 0;
  for (double T : temperatures)
    for (double wl : wavelengths) {
      Scenario s;
      s.wavelength_nm = wl;
      s.temperature_K = T;
      s.cycle.chain = chain_for(recomb, wl, T);
      s.cycle.ionization_rate_Hz = ionization;
      s.cycle.bright_count_rate_Hz = bright;
      s.cycle.dark_count_rate_Hz = dark;
      s.cycle.validate();
      s.seed = derive_seed(plan.master_seed, index);
      s.filename = scenario_filename(plan.prefix, index, wl, T);
      plan.scenarios.push_back(std::move(s));
      ++index;
    }
  return plan;
}

int execute(const SimulatePlan& plan) {
  ensure_dir(plan.common.output_dir);
  nlohmann::json manifest;
  manifest["schema"] = "simulate_manifest/v1";
  manifest["seed"] = plan.master_seed;
  manifest["bin_width_s"] = plan.bin_width_s;
  manifest["duration_s"] = plan.duration_s;
  nlohmann::json traces = nlohmann::json::array();

  for (const Scenario& s : plan.scenarios) {
    const PhotonTrace trace =
        simulate_blinking(s.cycle, plan.duration_s, plan.bin_width_s, s.seed);
    const std::string path = join_path(plan.common.output_dir, s.filename);
    write_trace(path, trace,
                {{"wavelength_nm", csv::format_double(s.wavelength_nm)},
                 {"temperature_K", csv::format_double(s.temperature_K)},
                 {"seed", std::to_string(s.seed)}});
    note(plan.common, "wrote " + path);

    nlohmann::json entry;
    entry["file"] = s.filename;
    entry["wavelength_nm"] = s.wavelength_nm;
    entry["temperature_K"] = s.temperature_K;
    entry["seed"] = s.seed;
    entry["chain"] = {{"gamma0_Hz", s.cycle.chain.gamma0_Hz},
                      {"gamma1_Hz", s.cycle.chain.gamma1_Hz},
                      {"mu1_Hz", s.cycle.chain.mu1_Hz}};
    entry["true_recombination_Hz"] = mfpt_rate(s.cycle.chain);
    entry["true_ionization_Hz"] = s.cycle.ionization_rate_Hz;
    traces.push_back(entry);
  }
  manifest["traces"] = traces;

  const std::string manifest_path =
      join_path(plan.common.output_dir, plan.prefix + "_manifest.json");
  write_json_file(manifest_path, manifest);
  note(plan.common, "wrote " + manifest_path);
  return 0;
}

}  // namespace

int cmd_simulate(const SimulateArgs& args) {
  return run_phases([&] { return make_plan(args); }, execute);
}

}  // namespace nvcycle::cli
