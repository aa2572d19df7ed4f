#pragma once

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include <nlohmann/json.hpp>

#include "nvcycle/effective_mode.hpp"

namespace nvcycle::cli {

// Two-phase command runner. Everything that reads or validates inputs runs
// in make_plan and maps to exit code 2; the computation runs in execute and
// maps to exit code 1 (or whatever code it returns).
template <typename MakePlan, typename Execute>
int run_phases(MakePlan&& make_plan, Execute&& execute) {
  std::optional<std::invoke_result_t<MakePlan&>> plan;
  try {
    plan.emplace(make_plan());
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  try {
    return execute(*plan);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

nlohmann::json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& value);

// Config objects reject unknown keys so typos fail loudly.
void check_keys(const nlohmann::json& obj, const std::string& context,
                const std::vector<std::string>& allowed);
const nlohmann::json& member(const nlohmann::json& obj, const std::string& key,
                             const std::string& context);
double number_at(const nlohmann::json& obj, const std::string& key,
                 const std::string& context);
double number_or(const nlohmann::json& obj, const std::string& key,
                 double fallback, const std::string& context);
long integer_or(const nlohmann::json& obj, const std::string& key,
                long fallback, const std::string& context);
bool bool_or(const nlohmann::json& obj, const std::string& key, bool fallback,
             const std::string& context);
std::string string_at(const nlohmann::json& obj, const std::string& key,
                      const std::string& context);
std::string string_or(const nlohmann::json& obj, const std::string& key,
                      const std::string& fallback, const std::string& context);
std::vector<double> number_list_at(const nlohmann::json& obj,
                                   const std::string& key,
                                   const std::string& context);

std::string join_path(const std::string& dir, const std::string& name);
void ensure_dir(const std::string& dir);

// Deterministic per-scenario seed derivation from one master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Mode-set JSON (schema modeset/v1): gamma_meV, optional scale, modes array
// of {energy_meV, huang_rhys, optional label}.
ModeSet modeset_from_json(const nlohmann::json& spec,
                          const std::string& context);
nlohmann::json modeset_to_json(const ModeSet& set);
// Parent object carries either an inline "modeset" or a "modeset_file" path.
ModeSet load_modeset(const nlohmann::json& parent, const std::string& context);
EnumerationLimits limits_or_default(const nlohmann::json& parent,
                                    const std::string& context);

struct CommonArgs {
  std::string output_dir = ".";
  bool verbose = false;
};

void note(const CommonArgs& common, const std::string& msg);

struct SimulateArgs {
  CommonArgs common;
  std::string config_path;
  std::optional<std::uint64_t> seed_override;
};

struct AnalyzeArgs {
  CommonArgs common;
  std::vector<std::string> trace_paths;
  std::string rates_name = "rates.csv";
  std::string diagnostics_name = "analyze_diagnostics.json";
  std::optional<double> fixed_threshold;
  int min_dwell_bins = 2;
};

struct RateArgs {
  CommonArgs common;
  std::string model;  // "qc" or "em"
  std::string config_path;
  std::string out_override;
};

struct FitArgs {
  CommonArgs common;
  std::string data_path;
  std::string config_path;
  std::string report_override;
  bool strict = false;
};

struct ModesArgs {
  CommonArgs common;
  std::string lattice_path;
  std::string out_override;
  std::string export_modeset_path;
  int top_k = 4;
  double export_gamma_meV = 5.0;
};

int cmd_simulate(const SimulateArgs& args);
int cmd_analyze(const AnalyzeArgs& args);
int cmd_rate(const RateArgs& args);
int cmd_fit(const FitArgs& args);
int cmd_modes(const ModesArgs& args);

}  // namespace nvcycle::cli
