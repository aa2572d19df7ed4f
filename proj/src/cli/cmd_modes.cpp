#include <algorithm>
#include <string>
#include <vector>

#include "cli_internal.hpp"
#include "nvcycle/csv.hpp"
#include "nvcycle/errors.hpp"
#include "nvcycle/lattice.hpp"

namespace nvcycle::cli {

namespace {

struct ModesPlan {
  CommonArgs common;
  ToyLattice lattice;
  DisplacementField field;
  std::string out_name;
  std::string export_path;
  int top_k = 4;
  double export_gamma_meV = 5.0;
};

Boundary boundary_from(const std::string& name, const std::string& context) {
  if (name == "free") return Boundary::free_ends;
  if (name == "periodic") return Boundary::periodic;
  throw ConfigError(context + ": boundary must be 'free' or 'periodic'");
}

ToyLattice lattice_from_preset(const nlohmann::json& preset) {
  const std::string context = "lattice.preset";
  const std::string kind = string_at(preset, "kind", context);
  if (kind == "chain") {
    check_keys(preset, context,
               {"kind", "n_sites", "mass_amu", "k_meV_per_A2", "spacing_A",
                "boundary"});
    return make_chain(
        static_cast<int>(integer_or(preset, "n_sites", 2, context)),
        number_at(preset, "mass_amu", context),
        number_at(preset, "k_meV_per_A2", context),
        number_at(preset, "spacing_A", context),
        boundary_from(string_or(preset, "boundary", "free", context), context));
  }
  if (kind == "square") {
    check_keys(preset, context,
               {"kind", "nx", "ny", "mass_amu", "k_nn_meV_per_A2",
                "k_diag_meV_per_A2", "spacing_A", "boundary"});
    const double k_nn = number_at(preset, "k_nn_meV_per_A2", context);
    return make_square(
        static_cast<int>(integer_or(preset, "nx", 2, context)),
        static_cast<int>(integer_or(preset, "ny", 2, context)),
        number_at(preset, "mass_amu", context), k_nn,
        number_or(preset, "k_diag_meV_per_A2", 0.5 * k_nn, context),
        number_at(preset, "spacing_A", context),
        boundary_from(string_or(preset, "boundary", "free", context), context));
  }
  throw ConfigError(context + ": unknown kind '" + kind + "'");
}

ToyLattice lattice_from_explicit(const nlohmann::json& spec) {
  const std::string context = "lattice.lattice";
  check_keys(spec, context,
             {"dimension", "masses_amu", "positions_A", "springs", "boundary",
              "box_lengths_A"});
  ToyLattice lat;
  lat.dimension = static_cast<int>(integer_or(spec, "dimension", 1, context));
  lat.masses_amu = number_list_at(spec, "masses_amu", context);
  lat.positions_A = number_list_at(spec, "positions_A", context);
  lat.boundary = boundary_from(string_or(spec, "boundary", "free", context),
                               context);
  if (spec.contains("box_lengths_A"))
    lat.box_lengths_A = number_list_at(spec, "box_lengths_A", context);
  const nlohmann::json& springs = member(spec, "springs", context);
  if (!springs.is_array())
    throw ConfigError(context + ": 'springs' must be an array of [i, j, k]");
  for (const auto& entry : springs) {
    if (!entry.is_array() || entry.size() != 3)
      throw ConfigError(context + ": each spring must be [i, j, k_meV_per_A2]");
    lat.springs.push_back({entry[0].get<int>(), entry[1].get<int>(),
                           entry[2].get<double>()});
  }
  lat.validate();
  return lat;
}

DisplacementField displacement_from(const nlohmann::json& config,
                                    const ToyLattice& lat) {
  if (!config.contains("displacement")) {
    DisplacementField field;
    field.delta_R_A.assign(
        lat.masses_amu.size() * static_cast<std::size_t>(lat.dimension), 0.0);
    return field;
  }
  const nlohmann::json& spec = config.at("displacement");
  const std::string context = "lattice.displacement";
  const std::string kind = string_at(spec, "kind", context);
  if (kind == "gaussian_push") {
    check_keys(spec, context,
               {"kind", "center_site", "amplitude_A", "sigma_A", "direction"});
    std::vector<double> direction;
    if (spec.contains("direction"))
      direction = number_list_at(spec, "direction", context);
    return gaussian_push(
        lat, static_cast<int>(integer_or(spec, "center_site", 0, context)),
        number_at(spec, "amplitude_A", context),
        number_at(spec, "sigma_A", context), direction);
  }
  if (kind == "uniform") {
    check_keys(spec, context, {"kind", "direction"});
    return uniform_translation(lat, number_list_at(spec, "direction", context));
  }
  if (kind == "explicit") {
    check_keys(spec, context, {"kind", "delta_R_A"});
    DisplacementField field;
    field.delta_R_A = number_list_at(spec, "delta_R_A", context);
    field.validate(lat);
    return field;
  }
  throw ConfigError(context + ": unknown kind '" + kind + "'");
}

ModesPlan make_plan(const ModesArgs& args) {
  ModesPlan plan;
  plan.common = args.common;
  plan.export_path = args.export_modeset_path;
  plan.top_k = args.top_k;
  plan.export_gamma_meV = args.export_gamma_meV;
  if (plan.top_k < 1 || plan.top_k > static_cast<int>(kMaxModes))
    throw ConfigError("modes: top-k must be between 1 and " +
                      std::to_string(kMaxModes));

  const nlohmann::json config = load_json_file(args.lattice_path);
  const std::string context = "lattice";
  check_keys(config, context, {"schema", "preset", "lattice", "displacement", "out"});
  const bool has_preset = config.contains("preset");
  const bool has_explicit = config.contains("lattice");
  if (has_preset == has_explicit)
    throw ConfigError(context + ": provide exactly one of 'preset' and 'lattice'");
  plan.lattice = has_preset ? lattice_from_preset(config.at("preset"))
                            : lattice_from_explicit(config.at("lattice"));
  plan.field = displacement_from(config, plan.lattice);
  plan.out_name = args.out_override.empty()
                      ? string_or(config, "out", "modes.csv", context)
                      : args.out_override;
  return plan;
}

int execute(const ModesPlan& plan) {
  ensure_dir(plan.common.output_dir);
  const NormalModes modes = solve_modes(plan.lattice);
  const std::vector<double> deltaQ =
      project_displacement(modes, plan.lattice, plan.field);
  const std::vector<ModeCoupling> couplings = huang_rhys_spectrum(modes, deltaQ);

  csv::Table table;
  table.schema = "modes/v1";
  table.meta.emplace_back("n_zero_modes", std::to_string(modes.n_zero_modes()));
  table.header = {"mode_index", "energy_meV", "deltaQ", "S_k"};
  for (const ModeCoupling& c : couplings)
    table.rows.push_back({static_cast<double>(c.mode_index), c.energy_meV,
                          c.deltaQ, c.huang_rhys});
  const std::string out_path = join_path(plan.common.output_dir, plan.out_name);
  csv::write_table_file(out_path, table);
  note(plan.common, "wrote " + out_path);

  if (!plan.export_path.empty()) {
    std::vector<ModeCoupling> ranked = couplings;
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const ModeCoupling& a, const ModeCoupling& b) {
                       return a.huang_rhys > b.huang_rhys;
                     });
    const std::size_t keep =
        std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(plan.top_k));
    if (keep == 0)
      throw AnalysisError("no finite-frequency modes to export");
    std::vector<PhononMode> selected;
    for (std::size_t i = 0; i < keep; ++i)
      selected.push_back(ranked[i].phonon_mode());
    const ModeSet set(std::move(selected), plan.export_gamma_meV, 1.0);
    const std::string path =
        join_path(plan.common.output_dir, plan.export_path);
    write_json_file(path, modeset_to_json(set));
    note(plan.common, "wrote " + path);
  }

  std::cout << "modes=" << modes.energies_meV.size()
            << " zero_modes=" << modes.n_zero_modes()
            << " couplings=" << couplings.size() << '\n';
  return 0;
}

}  // namespace

int cmd_modes(const ModesArgs& args) {
  return run_phases([&] { return make_plan(args); }, execute);
}

}  // namespace nvcycle::cli
