#include "nvcycle/cli.hpp"

#include <cstdint>
#include <cstdlib>
#include <memory>
#include <string>

#include "CLI11.hpp"

#include "cli_internal.hpp"

namespace nvcycle {

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Phonon-assisted charge-cycling of NV-like defects: simulate "
               "blinking traces, analyze dwell statistics, evaluate and fit "
               "rate models, and derive mode couplings from toy lattices"};
  app.require_subcommand(1);

  const char* env_dir = std::getenv("NVCYCLE_OUTPUT_DIR");
  const std::string default_out = env_dir ? env_dir : ".";
  int rc = 0;

  const auto add_common = [&](CLI::App* cmd, cli::CommonArgs& common) {
    common.output_dir = default_out;
    cmd->add_option("-o,--output-dir", common.output_dir,
                    "Directory for output files (env NVCYCLE_OUTPUT_DIR)");
    cmd->add_flag("-v,--verbose", common.verbose, "Log progress to stderr");
  };

  auto sim = std::make_shared<cli::SimulateArgs>();
  auto sim_seed = std::make_shared<std::uint64_t>(0);
  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "Generate blinking photon traces and a truth manifest");
  add_common(sim_cmd, sim->common);
  sim_cmd->add_option("config", sim->config_path, "Simulation config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  CLI::Option* seed_opt =
      sim_cmd->add_option("--seed", *sim_seed, "Override the config seed");
  sim_cmd->callback([&rc, sim, sim_seed, seed_opt] {
    if (seed_opt->count() > 0) sim->seed_override = *sim_seed;
    rc = cli::cmd_simulate(*sim);
  });

  auto an = std::make_shared<cli::AnalyzeArgs>();
  auto an_threshold = std::make_shared<double>(0.0);
  CLI::App* an_cmd = app.add_subcommand(
      "analyze", "Extract dwell times from traces and invert them to rates");
  add_common(an_cmd, an->common);
  an_cmd->add_option("traces", an->trace_paths, "Trace CSV files")->required();
  an_cmd->add_option("--rates-out", an->rates_name,
                     "Rates CSV filename (default rates.csv)");
  an_cmd->add_option("--diagnostics-out", an->diagnostics_name,
                     "Diagnostics JSON filename");
  CLI::Option* thr_opt = an_cmd->add_option(
      "--threshold", *an_threshold,
      "Fixed counts-per-bin threshold (default: histogram modes)");
  an_cmd->add_option("--min-dwell-bins", an->min_dwell_bins,
                     "Shortest believable dwell, in bins");
  an_cmd->callback([&rc, an, an_threshold, thr_opt] {
    if (thr_opt->count() > 0) an->fixed_threshold = *an_threshold;
    rc = cli::cmd_analyze(*an);
  });

  CLI::App* rate_cmd = app.add_subcommand(
      "rate", "Evaluate a rate model on a wavelength x temperature grid");
  rate_cmd->require_subcommand(1);
  for (const std::string model : {"qc", "em"}) {
    auto ra = std::make_shared<cli::RateArgs>();
    ra->model = model;
    CLI::App* sub = rate_cmd->add_subcommand(
        model, model == "qc" ? "Quasi-continuum spectral-density model"
                             : "Effective-mode vibronic model");
    add_common(sub, ra->common);
    sub->add_option("config", ra->config_path, "Rate config JSON")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", ra->out_override, "Rates CSV filename override");
    sub->callback([&rc, ra] { rc = cli::cmd_rate(*ra); });
  }

  auto fa = std::make_shared<cli::FitArgs>();
  CLI::App* fit_cmd =
      app.add_subcommand("fit", "Fit a rate model to a measured rate curve");
  add_common(fit_cmd, fa->common);
  fit_cmd->add_option("data", fa->data_path, "Rates CSV (schema rates/v1)")
      ->required()
      ->check(CLI::ExistingFile);
  fit_cmd->add_option("config", fa->config_path, "Fit config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  fit_cmd->add_flag("--strict", fa->strict,
                    "Exit 3 when the fit does not converge");
  fit_cmd->add_option("--report-out", fa->report_override,
                      "Report JSON filename override");
  fit_cmd->callback([&rc, fa] { rc = cli::cmd_fit(*fa); });

  auto ma = std::make_shared<cli::ModesArgs>();
  CLI::App* modes_cmd = app.add_subcommand(
      "modes", "Normal modes and mode couplings of a toy lattice");
  add_common(modes_cmd, ma->common);
  modes_cmd->add_option("lattice", ma->lattice_path, "Lattice spec JSON")
      ->required()
      ->check(CLI::ExistingFile);
  modes_cmd->add_option("--out", ma->out_override, "Modes CSV filename override");
  modes_cmd->add_option("--export-modeset", ma->export_modeset_path,
                        "Write a top-K mode-set JSON usable by 'rate em'");
  modes_cmd->add_option("--top-k", ma->top_k,
                        "Modes kept in the exported mode set (max 4)");
  modes_cmd->add_option("--gamma-mev", ma->export_gamma_meV,
                        "Lorentzian FWHM written to the exported mode set");
  modes_cmd->callback([&rc, ma] { rc = cli::cmd_modes(*ma); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return rc;
}

}  // namespace nvcycle
