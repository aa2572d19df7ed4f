#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "cli_internal.hpp"
#include "nvcycle/csv.hpp"
#include "nvcycle/errors.hpp"
#include "nvcycle/fitting.hpp"

namespace nvcycle::cli {

namespace {

struct FitPlan {
  CommonArgs common;
  FitProblem problem;
  NelderMeadOptions options;
  bool sequence = false;
  bool strict = false;
  std::string report_name;
  std::string coupling_prefix;
};

ParamBounds bounds_or(const nlohmann::json& config, const std::string& key,
                      ParamBounds fallback, const std::string& context) {
  if (!config.contains(key)) return fallback;
  const nlohmann::json& spec = config.at(key);
  const std::string ctx = context + "." + key;
  check_keys(spec, ctx, {"lower", "upper", "init"});
  ParamBounds bounds{number_at(spec, "lower", ctx), number_at(spec, "upper", ctx),
                     number_at(spec, "init", ctx)};
  if (!(bounds.lower < bounds.upper) || bounds.init < bounds.lower ||
      bounds.init > bounds.upper)
    throw ConfigError(ctx + ": need lower < upper and init inside the bounds");
  return bounds;
}

FitPlan make_plan(const FitArgs& args) {
  FitPlan plan;
  plan.common = args.common;
  plan.strict = args.strict;

  const nlohmann::json config = load_json_file(args.config_path);
  const std::string context = "fit";
  check_keys(config, context,
             {"schema", "model", "loss", "em", "qc", "s_bounds", "gamma_bounds",
              "s_init", "gamma_init", "sequence", "optimizer", "out_report",
              "out_coupling_prefix"});

  plan.problem.data = read_rate_curve(args.data_path);

  const std::string loss = string_or(config, "loss", "log_rate", context);
  if (loss == "log_rate")
    plan.problem.loss = LossSpace::log_rate;
  else if (loss == "linear_rate")
    plan.problem.loss = LossSpace::linear_rate;
  else
    throw ConfigError(context + ": loss must be 'log_rate' or 'linear_rate'");
  if (plan.problem.loss == LossSpace::log_rate)
    for (const RatePoint& pt : plan.problem.data.points)
      if (!(pt.rate_Hz > 0.0))
        throw ConfigError(context +
                          ": log-rate loss needs strictly positive rates; "
                          "use linear_rate");

  const std::string model = string_at(config, "model", context);
  if (model == "em") {
    const nlohmann::json& em = member(config, "em", context);
    const std::string ctx = context + ".em";
    check_keys(em, ctx,
               {"mode_energies_meV", "per_temperature", "zpl_nm", "limits"});
    EffectiveModeModelSpec spec;
    spec.mode_energies_meV = number_list_at(em, "mode_energies_meV", ctx);
    spec.zpl =
        WavelengthNm{number_or(em, "zpl_nm", constants::zpl_nv0_nm, ctx)};
    spec.limits = limits_or_default(em, ctx);
    if (em.contains("per_temperature")) {
      const nlohmann::json& flags = em.at("per_temperature");
      if (!flags.is_array())
        throw ConfigError(ctx + ": per_temperature must be a boolean array");
      for (const auto& flag : flags) {
        if (!flag.is_boolean())
          throw ConfigError(ctx + ": per_temperature must be a boolean array");
        spec.per_temperature.push_back(flag.get<bool>());
      }
    }
    spec.resolved_per_temperature();  // size check
    plan.problem.model = std::move(spec);
  } else if (model == "qc") {
    const nlohmann::json& qc = member(config, "qc", context);
    const std::string ctx = context + ".qc";
    check_keys(qc, ctx, {"spectrum_file", "convention", "zpl_nm"});
    QuasiContinuumModelSpec spec;
    spec.zpl =
        WavelengthNm{number_or(qc, "zpl_nm", constants::zpl_nv0_nm, ctx)};
    const std::string convention =
        string_or(qc, "convention", "detuning", ctx);
    SpectrumConvention conv = SpectrumConvention::detuning;
    if (convention == "photon_energy")
      conv = SpectrumConvention::photon_energy;
    else if (convention != "detuning")
      throw ConfigError(ctx + ": convention must be 'detuning' or 'photon_energy'");
    spec.spectrum =
        load_spectrum(string_at(qc, "spectrum_file", ctx), conv, spec.zpl);
    plan.problem.model = std::move(spec);
  } else {
    throw ConfigError(context + ": model must be 'em' or 'qc'");
  }

  plan.problem.s_bounds =
      bounds_or(config, "s_bounds", plan.problem.s_bounds, context);
  plan.problem.gamma_bounds =
      bounds_or(config, "gamma_bounds", plan.problem.gamma_bounds, context);
  if (config.contains("s_init"))
    plan.problem.s_init = number_list_at(config, "s_init", context);
  if (config.contains("gamma_init"))
    plan.problem.gamma_init = number_at(config, "gamma_init", context);

  plan.sequence = bool_or(config, "sequence", false, context);
  if (plan.sequence &&
      !std::holds_alternative<EffectiveModeModelSpec>(plan.problem.model))
    throw ConfigError(context + ": sequence fitting needs the em model");

  if (config.contains("optimizer")) {
    const nlohmann::json& opt = config.at("optimizer");
    const std::string ctx = context + ".optimizer";
    check_keys(opt, ctx,
               {"max_evals", "f_tol", "x_tol", "restarts", "initial_step"});
    plan.options.max_evals = static_cast<int>(
        integer_or(opt, "max_evals", plan.options.max_evals, ctx));
    plan.options.f_tol = number_or(opt, "f_tol", plan.options.f_tol, ctx);
    plan.options.x_tol = number_or(opt, "x_tol", plan.options.x_tol, ctx);
    plan.options.restarts = static_cast<int>(
        integer_or(opt, "restarts", plan.options.restarts, ctx));
    plan.options.initial_step =
        number_or(opt, "initial_step", plan.options.initial_step, ctx);
  }

  plan.report_name = args.report_override.empty()
                         ? string_or(config, "out_report", "fit_report.json",
                                     context)
                         : args.report_override;
  plan.coupling_prefix =
      string_or(config, "out_coupling_prefix", "coupling", context);
  return plan;
}

void write_coupling_csv(const std::string& path, const ModeSet& set,
                        const std::optional<double>& temperature_K) {
  csv::Table table;
  table.schema = "coupling/v1";
  table.meta.emplace_back("gamma_meV", csv::format_double(set.lorentzian_fwhm_meV));
  if (temperature_K)
    table.meta.emplace_back("temperature_K", csv::format_double(*temperature_K));
  table.header = {"energy_meV", "coupling"};
  std::vector<double> grid;
  for (double e = 0.5; e <= 80.0; e += 0.5) grid.push_back(e);
  for (const auto& [energy, coupling] : coupling_spectrum(set, grid))
    table.rows.push_back({energy, coupling});
  csv::write_table_file(path, table);
}

void write_coupling_outputs(const FitPlan& plan, const FitResult& result) {
  const auto* em = std::get_if<EffectiveModeModelSpec>(&plan.problem.model);
  if (!em) return;
  const std::vector<bool> per_T = em->resolved_per_temperature();
  const double gamma = result.param("Gamma_meV");

  std::set<double> temps;
  for (const RatePoint& pt : plan.problem.data.points)
    temps.insert(pt.temperature_K);

  const bool any_per_T =
      std::any_of(per_T.begin(), per_T.end(), [](bool b) { return b; });
  std::vector<std::optional<double>> entries;
  if (any_per_T)
    for (double T : temps) entries.emplace_back(T);
  else
    entries.emplace_back(std::nullopt);

  for (const auto& T : entries) {
    std::vector<PhononMode> modes;
    for (std::size_t k = 0; k < em->mode_energies_meV.size(); ++k) {
      std::string name = "S" + std::to_string(k + 1);
      if (per_T[k]) name += "@" + csv::format_double(*T) + "K";
      modes.emplace_back(em->mode_energies_meV[k], result.param(name));
    }
    const ModeSet set(std::move(modes), gamma, 1.0);
    std::string name = plan.coupling_prefix;
    if (T) name += "_T" + csv::format_double(*T) + "K";
    name += ".csv";
    write_coupling_csv(join_path(plan.common.output_dir, name), set, T);
  }
}

void print_summary(const FitResult& result) {
  std::cout << "converged=" << (result.converged ? "true" : "false")
            << " rss=" << csv::format_double(result.rss)
            << " n_evals=" << result.n_evals << '\n';
  for (const auto& [name, value] : result.params) {
    std::cout << "  " << name << " = " << csv::format_double(value);
    for (const auto& [err_name, err] : result.stderrs)
      if (err_name == name && err > 0.0)
        std::cout << " +/- " << csv::format_double(err);
    std::cout << '\n';
  }
}

int execute(const FitPlan& plan) {
  ensure_dir(plan.common.output_dir);
  nlohmann::json report;
  bool all_converged = true;
  const FitResult* final_result = nullptr;
  std::vector<FitResult> stages;
  FitResult single;

  if (plan.sequence) {
    stages = fit_mode_sequence(plan.problem, plan.options);
    nlohmann::json stage_array = nlohmann::json::array();
    for (const FitResult& stage : stages) {
      all_converged = all_converged && stage.converged;
      nlohmann::json entry;
      entry["converged"] = stage.converged;
      entry["n_evals"] = stage.n_evals;
      entry["rss"] = stage.rss;
      nlohmann::json params, errs;
      for (const auto& [name, value] : stage.params) params[name] = value;
      for (const auto& [name, value] : stage.stderrs) errs[name] = value;
      entry["params"] = params;
      entry["stderr"] = errs;
      entry["diagnostics"] = stage.diagnostics;
      stage_array.push_back(entry);
    }
    report["schema"] = "fit_sequence/v1";
    report["stages"] = stage_array;
    report["final"] = fit_report(stages.back(), plan.problem);
    final_result = &stages.back();
  } else {
    single = fit(plan.problem, plan.options);
    all_converged = single.converged;
    report = fit_report(single, plan.problem);
    final_result = &single;
  }

  const std::string report_path =
      join_path(plan.common.output_dir, plan.report_name);
  write_json_file(report_path, report);
  note(plan.common, "wrote " + report_path);
  write_coupling_outputs(plan, *final_result);
  print_summary(*final_result);

  if (!all_converged && plan.strict) return 3;
  return 0;
}

}  // namespace

int cmd_fit(const FitArgs& args) {
  return run_phases([&] { return make_plan(args); }, execute);
}

}  // namespace nvcycle::cli
