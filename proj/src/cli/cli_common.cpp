#include "cli_internal.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "nvcycle/errors.hpp"
#include "nvcycle/rng.hpp"

namespace nvcycle::cli {

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const nlohmann::json& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << value.dump(2) << '\n';
}

void check_keys(const nlohmann::json& obj, const std::string& context,
                const std::vector<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(context + ": expected a JSON object");
  for (const auto& item : obj.items())
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw ConfigError(context + ": unknown key '" + item.key() + "'");
}

const nlohmann::json& member(const nlohmann::json& obj, const std::string& key,
                             const std::string& context) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(context + ": missing key '" + key + "'");
  return *it;
}

double number_at(const nlohmann::json& obj, const std::string& key,
                 const std::string& context) {
  const nlohmann::json& v = member(obj, key, context);
  if (!v.is_number()) throw ConfigError(context + ": '" + key + "' must be a number");
  return v.get<double>();
}

double number_or(const nlohmann::json& obj, const std::string& key,
                 double fallback, const std::string& context) {
  if (!obj.contains(key)) return fallback;
  return number_at(obj, key, context);
}

long integer_or(const nlohmann::json& obj, const std::string& key,
                long fallback, const std::string& context) {
  if (!obj.contains(key)) return fallback;
  const nlohmann::json& v = obj.at(key);
  if (!v.is_number_integer())
    throw ConfigError(context + ": '" + key + "' must be an integer");
  return v.get<long>();
}

bool bool_or(const nlohmann::json& obj, const std::string& key, bool fallback,
             const std::string& context) {
  if (!obj.contains(key)) return fallback;
  const nlohmann::json& v = obj.at(key);
  if (!v.is_boolean())
    throw ConfigError(context + ": '" + key + "' must be a boolean");
  return v.get<bool>();
}

std::string string_at(const nlohmann::json& obj, const std::string& key,
                      const std::string& context) {
  const nlohmann::json& v = member(obj, key, context);
  if (!v.is_string()) throw ConfigError(context + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

std::string string_or(const nlohmann::json& obj, const std::string& key,
                      const std::string& fallback, const std::string& context) {
  if (!obj.contains(key)) return fallback;
  return string_at(obj, key, context);
}

std::vector<double> number_list_at(const nlohmann::json& obj,
                                   const std::string& key,
                                   const std::string& context) {
  const nlohmann::json& v = member(obj, key, context);
  if (!v.is_array() || v.empty())
    throw ConfigError(context + ": '" + key + "' must be a non-empty array");
  std::vector<double> out;
  for (const auto& item : v) {
    if (!item.is_number())
      throw ConfigError(context + ": '" + key + "' must contain numbers");
    out.push_back(item.get<double>());
  }
  return out;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::filesystem::create_directories(dir);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t sm = master ^ (index * 0xd1342543de82ef95ull);
  return splitmix64_next(sm) + index;
}

ModeSet modeset_from_json(const nlohmann::json& spec,
                          const std::string& context) {
  check_keys(spec, context, {"schema", "gamma_meV", "scale", "modes"});
  const nlohmann::json& mode_list = member(spec, "modes", context);
  if (!mode_list.is_array() || mode_list.empty())
    throw ConfigError(context + ": 'modes' must be a non-empty array");
  std::vector<PhononMode> modes;
  int index = 0;
  for (const auto& entry : mode_list) {
    const std::string mode_ctx = context + ".modes[" + std::to_string(index++) + "]";
    check_keys(entry, mode_ctx, {"energy_meV", "huang_rhys", "label"});
    modes.emplace_back(number_at(entry, "energy_meV", mode_ctx),
                       number_at(entry, "huang_rhys", mode_ctx),
                       string_or(entry, "label", "", mode_ctx));
  }
  return ModeSet(std::move(modes), number_at(spec, "gamma_meV", context),
                 number_or(spec, "scale", 1.0, context));
}

nlohmann::json modeset_to_json(const ModeSet& set) {
  nlohmann::json out;
  out["schema"] = "modeset/v1";
  out["gamma_meV"] = set.lorentzian_fwhm_meV;
  out["scale"] = set.scale;
  nlohmann::json modes = nlohmann::json::array();
  for (const PhononMode& mode : set.modes) {
    nlohmann::json entry;
    entry["energy_meV"] = mode.energy_meV;
    entry["huang_rhys"] = mode.huang_rhys;
    if (!mode.label.empty()) entry["label"] = mode.label;
    modes.push_back(entry);
  }
  out["modes"] = modes;
  return out;
}

ModeSet load_modeset(const nlohmann::json& parent, const std::string& context) {
  const bool inline_set = parent.contains("modeset");
  const bool from_file = parent.contains("modeset_file");
  if (inline_set == from_file)
    throw ConfigError(context + ": provide exactly one of 'modeset' and 'modeset_file'");
  if (inline_set)
    return modeset_from_json(parent.at("modeset"), context + ".modeset");
  const std::string path = string_at(parent, "modeset_file", context);
  return modeset_from_json(load_json_file(path), path);
}

EnumerationLimits limits_or_default(const nlohmann::json& parent,
                                    const std::string& context) {
  EnumerationLimits limits;
  if (!parent.contains("limits")) return limits;
  const nlohmann::json& spec = parent.at("limits");
  const std::string ctx = context + ".limits";
  check_keys(spec, ctx,
             {"max_quanta_per_mode", "boltzmann_cutoff",
              "lorentzian_window_halfwidths"});
  limits.max_quanta_per_mode = static_cast<int>(
      integer_or(spec, "max_quanta_per_mode", limits.max_quanta_per_mode, ctx));
  limits.boltzmann_cutoff =
      number_or(spec, "boltzmann_cutoff", limits.boltzmann_cutoff, ctx);
  limits.lorentzian_window_halfwidths =
      number_or(spec, "lorentzian_window_halfwidths",
                limits.lorentzian_window_halfwidths, ctx);
  limits.validate();
  return limits;
}

void note(const CommonArgs& common, const std::string& msg) {
  if (common.verbose) std::cerr << msg << '\n';
}

}  // namespace nvcycle::cli
