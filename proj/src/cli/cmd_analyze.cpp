#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "cli_internal.hpp"
#include "nvcycle/blink.hpp"
#include "nvcycle/csv.hpp"
#include "nvcycle/errors.hpp"
#include "nvcycle/rate_curve.hpp"

namespace nvcycle::cli {

namespace {

struct AnalyzePlan {
  AnalyzeArgs args;
};

AnalyzePlan make_plan(const AnalyzeArgs& args) {
  if (args.trace_paths.empty())
    throw ConfigError("analyze: no trace files given");
  if (args.min_dwell_bins < 1)
    throw ConfigError("analyze: min-dwell-bins must be >= 1");
  return {args};
}

int execute(const AnalyzePlan& plan) {
  const AnalyzeArgs& args = plan.args;
  ensure_dir(args.common.output_dir);

  // (wavelength, temperature) -> pooled dark dwell durations.
  std::map<std::pair<double, double>, std::vector<double>> groups;
  nlohmann::json per_trace = nlohmann::json::array();
  bool any_failed = false;

  for (const std::string& path : args.trace_paths) {
    nlohmann::json entry;
    entry["file"] = path;
    try {
      const LoadedTrace loaded = read_trace(path);
      const double wavelength = std::stod(loaded.meta_value("wavelength_nm"));
      const double temperature = std::stod(loaded.meta_value("temperature_K"));
      entry["wavelength_nm"] = wavelength;
      entry["temperature_K"] = temperature;

      double threshold = 0.0;
      try {
        threshold = choose_threshold(
            loaded.trace, args.fixed_threshold
                              ? ThresholdMethod::fixed(*args.fixed_threshold)
                              : ThresholdMethod::histogram_modes());
      } catch (const AnalysisError& e) {
        entry["status"] = "indistinguishable";
        entry["detail"] = e.what();
        per_trace.push_back(entry);
        note(args.common, path + ": " + e.what());
        continue;
      }

      const auto dwells =
          extract_dwells(loaded.trace, threshold, args.min_dwell_bins);
      long n_dark = 0, n_bright = 0;
      for (const DwellRecord& d : dwells) {
        if (d.state == DwellState::dark) {
          groups[{wavelength, temperature}].push_back(d.duration_s);
          ++n_dark;
        } else {
          ++n_bright;
        }
      }
      entry["status"] = "ok";
      entry["threshold_counts"] = threshold;
      entry["n_dark_dwells"] = n_dark;
      entry["n_bright_dwells"] = n_bright;
      note(args.common, path + ": " + std::to_string(n_dark) + " dark dwells");
    } catch (const std::exception& e) {
      entry["status"] = "failed";
      entry["detail"] = e.what();
      any_failed = true;
      std::cerr << path << ": " << e.what() << '\n';
    }
    per_trace.push_back(entry);
  }

  RateCurve curve;
  nlohmann::json per_group = nlohmann::json::array();
  for (const auto& [key, durations] : groups) {
    nlohmann::json entry;
    entry["wavelength_nm"] = key.first;
    entry["temperature_K"] = key.second;
    entry["n_dark_dwells"] = durations.size();
    std::vector<DwellRecord> dwells;
    for (double t : durations) dwells.push_back({DwellState::dark, t, 0});
    try {
      const auto [rate, err] = estimate_rate(dwells, DwellState::dark);
      curve.points.push_back({key.first, key.second, rate, err,
                              static_cast<long>(durations.size())});
      entry["status"] = "ok";
      entry["rate_Hz"] = rate;
      entry["stderr_Hz"] = err;
    } catch (const InsufficientDataError& e) {
      entry["status"] = "insufficient";
      entry["detail"] = e.what();
      any_failed = true;
      std::cerr << "group (" << key.first << " nm, " << key.second
                << " K): " << e.what() << '\n';
    }
    per_group.push_back(entry);
  }

  const std::string rates_path =
      join_path(args.common.output_dir, args.rates_name);
  write_rate_curve(rates_path, curve);
  note(args.common, "wrote " + rates_path);

  nlohmann::json diagnostics;
  diagnostics["schema"] = "analyze_diagnostics/v1";
  diagnostics["traces"] = per_trace;
  diagnostics["groups"] = per_group;
  const std::string diag_path =
      join_path(args.common.output_dir, args.diagnostics_name);
  write_json_file(diag_path, diagnostics);
  note(args.common, "wrote " + diag_path);

  return any_failed ? 1 : 0;
}

}  // namespace

int cmd_analyze(const AnalyzeArgs& args) {
  return run_phases([&] { return make_plan(args); }, execute);
}

}  // namespace nvcycle::cli
