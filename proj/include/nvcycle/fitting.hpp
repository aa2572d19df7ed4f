#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nvcycle/effective_mode.hpp"
#include "nvcycle/optim.hpp"
#include "nvcycle/quasi_continuum.hpp"
#include "nvcycle/rate_curve.hpp"
#include "nvcycle/units.hpp"

// Least-squares fitting of the two rate models to a RateCurve. The overall
// scale factor is linear in both models and is profiled out in closed form;
// the remaining parameters (partial Huang-Rhys factors and the shared
// Lorentzian width) go through bounded Nelder-Mead. The default loss lives
// in log-rate space because measured rates span decades.

namespace nvcycle {

enum class LossSpace { log_rate, linear_rate };

struct ParamBounds {
  double lower;
  double upper;
  double init;
};

struct QuasiContinuumModelSpec {
  EmissionSpectrum spectrum;
  WavelengthNm zpl{constants::zpl_nv0_nm};
};

struct EffectiveModeModelSpec {
  std::vector<double> mode_energies_meV;  // fixed, not fitted
  WavelengthNm zpl{constants::zpl_nv0_nm};
  EnumerationLimits limits{};
  // Per mode: fit one S per temperature instead of one shared S. Empty means
  // the default policy: the lowest-energy (acoustic) mode is per-temperature
  // when there are >= 2 modes, everything else shared.
  std::vector<bool> per_temperature;

  std::vector<bool> resolved_per_temperature() const;
};

struct FitProblem {
  RateCurve data;
  std::variant<QuasiContinuumModelSpec, EffectiveModeModelSpec> model;
  LossSpace loss = LossSpace::log_rate;
  ParamBounds s_bounds{0.0, 5.0, 0.3};
  ParamBounds gamma_bounds{0.5, 40.0, 5.0};
  // Warm starts; sizes must match the parameter layout when present.
  std::optional<std::vector<double>> s_init;
  std::optional<double> gamma_init;
};

struct FitResult {
  // Named parameters, e.g. S1, S2@200K, Gamma_meV, scale.
  std::vector<std::pair<std::string, double>> params;
  std::vector<std::pair<std::string, double>> stderrs;
  std::vector<double> residuals;       // loss space, weight applied
  std::vector<double> model_rates_Hz;  // at the fitted parameters
  double rss = 0.0;
  bool converged = false;
  int n_evals = 0;
  std::vector<std::string> diagnostics;

  double param(const std::string& name) const;  // throws on unknown name
};

FitResult fit(const FitProblem& problem, const NelderMeadOptions& options = {});

// Staged fit in the style of the two-mode procedure: modes enter one at a
// time in the given order, each stage warm-started from the previous one
// with the new mode's coupling starting at zero. Returns one result per
// stage. The problem's model must be effective-mode.
std::vector<FitResult> fit_mode_sequence(const FitProblem& problem,
                                         const NelderMeadOptions& options = {});

// Full machine-readable report: parameter table, per-point residuals, and
// coupling-spectrum plot data for fitted modes.
nlohmann::json fit_report(const FitResult& result, const FitProblem& problem);

}  // namespace nvcycle
