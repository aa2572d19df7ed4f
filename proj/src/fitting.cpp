#include "nvcycle/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "nvcycle/csv.hpp"
#include "nvcycle/errors.hpp"

namespace nvcycle {

std::vector<bool> EffectiveModeModelSpec::resolved_per_temperature() const {
  const std::size_t n = mode_energies_meV.size();
  if (n == 0) throw ValidationError("effective-mode fit needs mode energies");
  if (!per_temperature.empty()) {
    if (per_temperature.size() != n)
      throw ValidationError("per_temperature flags must match the mode count");
    return per_temperature;
  }
  // Default policy: with several modes, the softest one picks up the strongest
  // temperature dependence and gets an independent S per temperature.
  std::vector<bool> flags(n, false);
  if (n >= 2) {
    std::size_t softest = 0;
    for (std::size_t k = 1; k < n; ++k)
      if (mode_energies_meV[k] < mode_energies_meV[softest]) softest = k;
    flags[softest] = true;
  }
  return flags;
}

double FitResult::param(const std::string& name) const {
  for (const auto& [key, value] : params)
    if (key == name) return value;
  throw ValidationError("no fitted parameter named '" + name + "'");
}

namespace {

struct Profiled {
  bool ok = false;
  double scale = 1.0;
  double rss = 0.0;
  std::vector<double> residuals;
};

// Closed-form optimum of the linear scale factor given the shape parameters:
// an additive offset of log-rates, or weighted linear regression through the
// origin in rate space.
Profiled profile_scale(const RateCurve& data, const std::vector<double>& model,
                       const std::vector<double>& weights, LossSpace loss) {
  Profiled p;
  const std::size_t n = data.points.size();
  p.residuals.resize(n);
  if (loss == LossSpace::log_rate) {
    double sum_w = 0.0, sum_offset = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(model[i] > 0.0) || !std::isfinite(model[i])) return p;
      sum_w += weights[i];
      sum_offset += weights[i] *
                    (std::log(data.points[i].rate_Hz) - std::log(model[i]));
    }
    const double c = sum_offset / sum_w;
    for (std::size_t i = 0; i < n; ++i) {
      p.residuals[i] = std::sqrt(weights[i]) *
                       (std::log(data.points[i].rate_Hz) - std::log(model[i]) - c);
      p.rss += p.residuals[i] * p.residuals[i];
    }
    p.scale = std::exp(c);
    p.ok = std::isfinite(p.rss) && std::isfinite(p.scale);
    return p;
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(model[i]) || model[i] < 0.0) return p;
    num += weights[i] * data.points[i].rate_Hz * model[i];
    den += weights[i] * model[i] * model[i];
  }
  if (!(den > 0.0)) return p;
  const double c = num / den;
  if (!(c > 0.0)) return p;
  for (std::size_t i = 0; i < n; ++i) {
    p.residuals[i] = std::sqrt(weights[i]) *
                     (data.points[i].rate_Hz - c * model[i]);
    p.rss += p.residuals[i] * p.residuals[i];
  }
  p.scale = c;
  p.ok = std::isfinite(p.rss);
  return p;
}

// Weight per point from reported uncertainties when every point has one;
// unit weights otherwise.
std::vector<double> make_weights(const RateCurve& data, LossSpace loss,
                                 std::vector<std::string>& diagnostics) {
  const std::size_t n = data.points.size();
  bool all_have_err = true;
  for (const RatePoint& pt : data.points)
    if (!(pt.stderr_Hz > 0.0)) all_have_err = false;
  std::vector<double> w(n, 1.0);
  if (!all_have_err) {
    diagnostics.push_back("unit weights (not every point reports a stderr)");
    return w;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const RatePoint& pt = data.points[i];
    if (loss == LossSpace::log_rate)
      w[i] = (pt.rate_Hz / pt.stderr_Hz) * (pt.rate_Hz / pt.stderr_Hz);
    else
      w[i] = 1.0 / (pt.stderr_Hz * pt.stderr_Hz);
  }
  return w;
}

double sum_weights(const std::vector<double>& w) {
  double s = 0.0;
  for (double v : w) s += v;
  return s;
}

// Parameter layout for the effective-mode model: per mode either one shared
// S slot or one slot per temperature, then the shared Gamma.
struct EmLayout {
  std::vector<double> temps;  // ascending unique temperatures in the data
  std::vector<int> temp_idx;  // per data point
  std::vector<bool> per_T;
  std::vector<int> offsets;   // S-slot offset per mode
  int s_slots = 0;
  std::vector<std::string> names;  // S names then Gamma_meV

  EmLayout(const RateCurve& data, const EffectiveModeModelSpec& spec) {
    per_T = spec.resolved_per_temperature();
    std::set<double> uniq;
    for (const RatePoint& pt : data.points) uniq.insert(pt.temperature_K);
    temps.assign(uniq.begin(), uniq.end());
    for (const RatePoint& pt : data.points)
      temp_idx.push_back(static_cast<int>(
          std::lower_bound(temps.begin(), temps.end(), pt.temperature_K) -
          temps.begin()));

    const int n_T = static_cast<int>(temps.size());
    offsets.resize(spec.mode_energies_meV.size());
    for (std::size_t k = 0; k < spec.mode_energies_meV.size(); ++k) {
      offsets[k] = s_slots;
      if (per_T[k]) {
        for (int t = 0; t < n_T; ++t)
          names.push_back("S" + std::to_string(k + 1) + "@" +
                          csv::format_double(temps[t]) + "K");
        s_slots += n_T;
      } else {
        names.push_back("S" + std::to_string(k + 1));
        s_slots += 1;
      }
    }
    names.push_back("Gamma_meV");
  }

  double s_of(const std::vector<double>& theta, std::size_t mode, int t) const {
    return theta[offsets[mode] + (per_T[mode] ? t : 0)];
  }
};

// Model rates at unit scale; false (with a message) when any point fails.
bool em_rates(const RateCurve& data, const EffectiveModeModelSpec& spec,
              const EmLayout& layout, const std::vector<double>& theta,
              std::vector<double>& out, std::string& err) {
  const double gamma = theta.back();
  out.resize(data.points.size());
  try {
    for (std::size_t t = 0; t < layout.temps.size(); ++t) {
      std::vector<PhononMode> modes;
      for (std::size_t k = 0; k < spec.mode_energies_meV.size(); ++k)
        modes.emplace_back(spec.mode_energies_meV[k],
                           layout.s_of(theta, k, static_cast<int>(t)));
      const ModeSet set(std::move(modes), gamma, 1.0);
      for (std::size_t i = 0; i < data.points.size(); ++i) {
        if (layout.temp_idx[i] != static_cast<int>(t)) continue;
        out[i] = rate_per_power(WavelengthNm{data.points[i].wavelength_nm},
                                TemperatureK{data.points[i].temperature_K},
                                set, spec.zpl, spec.limits);
      }
    }
  } catch (const std::exception& e) {
    err = e.what();
    return false;
  }
  return true;
}

// Central-difference curvature of the profiled objective; stderr from
// cov = 2 s^2 H^-1 with s^2 the residual variance per degree of freedom.
std::vector<double> curvature_stderr(
    const std::function<double(const std::vector<double>&)>& objective,
    const std::vector<double>& theta, const std::vector<double>& lower,
    const std::vector<double>& upper, double rss, long n_data, int n_free,
    std::vector<std::string>& diagnostics) {
  const int p = static_cast<int>(theta.size());
  std::vector<double> none(p, 0.0);
  if (n_data <= n_free) {
    diagnostics.push_back("stderr unavailable: no residual degrees of freedom");
    return none;
  }
  std::vector<double> h(p);
  for (int j = 0; j < p; ++j) {
    h[j] = std::max(1e-4 * std::fabs(theta[j]), 1e-5);
    h[j] = std::min({h[j], (upper[j] - theta[j]), (theta[j] - lower[j])});
    if (!(h[j] > 1e-12)) {
      diagnostics.push_back("stderr unavailable: parameter at its bound");
      return none;
    }
  }
  const auto at = [&](std::vector<double> th) { return objective(th); };
  Eigen::MatrixXd H(p, p);
  const double f0 = objective(theta);
  for (int j = 0; j < p; ++j) {
    std::vector<double> tp = theta, tm = theta;
    tp[j] += h[j];
    tm[j] -= h[j];
    H(j, j) = (at(tp) - 2.0 * f0 + at(tm)) / (h[j] * h[j]);
    for (int k = j + 1; k < p; ++k) {
      std::vector<double> tpp = theta, tpm = theta, tmp = theta, tmm = theta;
      tpp[j] += h[j]; tpp[k] += h[k];
      tpm[j] += h[j]; tpm[k] -= h[k];
      tmp[j] -= h[j]; tmp[k] += h[k];
      tmm[j] -= h[j]; tmm[k] -= h[k];
      H(j, k) = H(k, j) =
          (at(tpp) - at(tpm) - at(tmp) + at(tmm)) / (4.0 * h[j] * h[k]);
    }
  }
  const double s_sq = rss / static_cast<double>(n_data - n_free);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(H);
  if (!lu.isInvertible()) {
    diagnostics.push_back("stderr unavailable: singular curvature");
    return none;
  }
  const Eigen::MatrixXd cov = 2.0 * s_sq * lu.inverse();
  std::vector<double> out(p, 0.0);
  for (int j = 0; j < p; ++j) out[j] = std::sqrt(std::max(0.0, cov(j, j)));
  return out;
}

FitResult fit_quasi_continuum(const FitProblem& problem,
                              const QuasiContinuumModelSpec& spec) {
  FitResult result;
  const RateCurve& data = problem.data;
  const std::vector<double> weights =
      make_weights(data, problem.loss, result.diagnostics);

  std::vector<double> model(data.points.size());
  const QuasiContinuumParams params{1.0, spec.zpl};
  for (std::size_t i = 0; i < data.points.size(); ++i)
    model[i] = qc_rate_per_power(WavelengthNm{data.points[i].wavelength_nm},
                                 TemperatureK{data.points[i].temperature_K},
                                 spec.spectrum, params);

  const Profiled prof = profile_scale(data, model, weights, problem.loss);
  if (!prof.ok)
    throw ValidationError(
        "quasi-continuum model rate vanishes on the data grid; a scale "
        "cannot be fitted in this loss space");

  result.params.emplace_back("scale", prof.scale);
  result.residuals = prof.residuals;
  result.rss = prof.rss;
  result.converged = true;
  result.n_evals = 1;
  result.model_rates_Hz.resize(model.size());
  for (std::size_t i = 0; i < model.size(); ++i)
    result.model_rates_Hz[i] = prof.scale * model[i];

  const long n = static_cast<long>(data.points.size());
  if (n > 1) {
    const double s_sq = prof.rss / static_cast<double>(n - 1);
    double scale_err = 0.0;
    if (problem.loss == LossSpace::log_rate) {
      scale_err = prof.scale * std::sqrt(s_sq / sum_weights(weights));
    } else {
      double den = 0.0;
      for (std::size_t i = 0; i < model.size(); ++i)
        den += weights[i] * model[i] * model[i];
      scale_err = std::sqrt(s_sq / den);
    }
    result.stderrs.emplace_back("scale", scale_err);
  } else {
    result.diagnostics.push_back("stderr unavailable: single data point");
  }
  return result;
}

FitResult fit_effective_mode(const FitProblem& problem,
                             const EffectiveModeModelSpec& spec,
                             const NelderMeadOptions& options) {
  FitResult result;
  const RateCurve& data = problem.data;
  const EmLayout layout(data, spec);
  const std::vector<double> weights =
      make_weights(data, problem.loss, result.diagnostics);

  const int dims = layout.s_slots + 1;
  std::vector<double> lower(dims), upper(dims), init(dims);
  for (int j = 0; j < layout.s_slots; ++j) {
    lower[j] = problem.s_bounds.lower;
    upper[j] = problem.s_bounds.upper;
    init[j] = problem.s_bounds.init;
  }
  if (problem.s_init) {
    if (static_cast<int>(problem.s_init->size()) != layout.s_slots)
      throw ValidationError("s_init size does not match the parameter layout");
    for (int j = 0; j < layout.s_slots; ++j) init[j] = (*problem.s_init)[j];
  }
  lower[dims - 1] = problem.gamma_bounds.lower;
  upper[dims - 1] = problem.gamma_bounds.upper;
  init[dims - 1] = problem.gamma_init.value_or(problem.gamma_bounds.init);

  bool eval_failed = false;
  std::string eval_error;
  const auto objective = [&](const std::vector<double>& theta) {
    std::vector<double> model;
    std::string err;
    if (!em_rates(data, spec, layout, theta, model, err)) {
      if (!eval_failed) {
        eval_failed = true;
        eval_error = err;
      }
      return 1e100;
    }
    const Profiled prof = profile_scale(data, model, weights, problem.loss);
    return prof.ok ? prof.rss : 1e100;
  };

  const NelderMeadResult nm =
      nelder_mead_bounded(objective, init, lower, upper, options);
  if (eval_failed)
    result.diagnostics.push_back("penalized trial points: " + eval_error);

  std::vector<double> model;
  std::string err;
  if (!em_rates(data, spec, layout, nm.x, model, err))
    throw NumericError("model evaluation failed at the optimum: " + err);
  const Profiled prof = profile_scale(data, model, weights, problem.loss);
  if (!prof.ok)
    throw NumericError("scale profiling failed at the optimum");

  for (int j = 0; j < dims; ++j)
    result.params.emplace_back(layout.names[j], nm.x[j]);
  result.params.emplace_back("scale", prof.scale);
  result.residuals = prof.residuals;
  result.rss = prof.rss;
  result.converged = nm.converged;
  result.n_evals = nm.n_evals;
  result.model_rates_Hz.resize(model.size());
  for (std::size_t i = 0; i < model.size(); ++i)
    result.model_rates_Hz[i] = prof.scale * model[i];

  const long n = static_cast<long>(data.points.size());
  const int n_free = dims + 1;  // shape parameters plus the profiled scale
  const std::vector<double> errs = curvature_stderr(
      objective, nm.x, lower, upper, prof.rss, n, n_free, result.diagnostics);
  for (int j = 0; j < dims; ++j)
    result.stderrs.emplace_back(layout.names[j], errs[j]);
  if (n > n_free) {
    const double s_sq = prof.rss / static_cast<double>(n - n_free);
    double scale_err = 0.0;
    if (problem.loss == LossSpace::log_rate) {
      scale_err = prof.scale * std::sqrt(s_sq / sum_weights(weights));
    } else {
      double den = 0.0;
      for (std::size_t i = 0; i < model.size(); ++i)
        den += weights[i] * model[i] * model[i];
      scale_err = den > 0.0 ? std::sqrt(s_sq / den) : 0.0;
    }
    result.stderrs.emplace_back("scale", scale_err);
  } else {
    result.stderrs.emplace_back("scale", 0.0);
  }
  return result;
}

void validate_loss_data(const FitProblem& problem) {
  problem.data.validate();
  if (problem.data.points.empty()) throw ValidationError("fit data is empty");
  if (problem.loss == LossSpace::log_rate)
    for (const RatePoint& pt : problem.data.points)
      if (!(pt.rate_Hz > 0.0))
        throw ValidationError(
            "log-rate loss needs strictly positive rates; use linear_rate");
}

}  // namespace

FitResult fit(const FitProblem& problem, const NelderMeadOptions& options) {
  validate_loss_data(problem);
  if (const auto* qc = std::get_if<QuasiContinuumModelSpec>(&problem.model))
    return fit_quasi_continuum(problem, *qc);
  return fit_effective_mode(problem,
                            std::get<EffectiveModeModelSpec>(problem.model),
                            options);
}

std::vector<FitResult> fit_mode_sequence(const FitProblem& problem,
                                         const NelderMeadOptions& options) {
  const auto* em = std::get_if<EffectiveModeModelSpec>(&problem.model);
  if (!em)
    throw ValidationError("mode-sequence fitting needs an effective-mode model");
  validate_loss_data(problem);
  const std::vector<bool> per_T = em->resolved_per_temperature();

  std::vector<FitResult> stages;
  std::vector<double> s_warm;
  double gamma_warm = problem.gamma_bounds.init;
  for (std::size_t k = 1; k <= em->mode_energies_meV.size(); ++k) {
    FitProblem sub = problem;
    EffectiveModeModelSpec spec = *em;
    spec.mode_energies_meV.assign(em->mode_energies_meV.begin(),
                                  em->mode_energies_meV.begin() + k);
    spec.per_temperature.assign(per_T.begin(), per_T.begin() + k);
    sub.model = spec;
    if (k > 1) {
      // New mode enters uncoupled; previous shape parameters carry over.
      const EmLayout layout(problem.data, spec);
      std::vector<double> s_init(layout.s_slots, 0.0);
      std::copy(s_warm.begin(), s_warm.end(), s_init.begin());
      sub.s_init = s_init;
      sub.gamma_init = gamma_warm;
    }
    FitResult stage = fit(sub, options);
    s_warm.clear();
    for (const auto& [name, value] : stage.params) {
      if (name == "Gamma_meV") {
        gamma_warm = value;
        break;
      }
      s_warm.push_back(value);
    }
    stages.push_back(std::move(stage));
  }
  return stages;
}

nlohmann::json fit_report(const FitResult& result, const FitProblem& problem) {
  nlohmann::json report;
  report["schema"] = "fit_report/v1";
  report["model"] = std::holds_alternative<EffectiveModeModelSpec>(problem.model)
                        ? "effective_mode"
                        : "quasi_continuum";
  report["loss_space"] =
      problem.loss == LossSpace::log_rate ? "log_rate" : "linear_rate";
  report["converged"] = result.converged;
  report["n_evals"] = result.n_evals;
  report["rss"] = result.rss;

  nlohmann::json params, errs;
  for (const auto& [name, value] : result.params) params[name] = value;
  for (const auto& [name, value] : result.stderrs) errs[name] = value;
  report["params"] = params;
  report["stderr"] = errs;
  report["diagnostics"] = result.diagnostics;

  nlohmann::json points = nlohmann::json::array();
  for (std::size_t i = 0; i < problem.data.points.size(); ++i) {
    const RatePoint& pt = problem.data.points[i];
    nlohmann::json row;
    row["wavelength_nm"] = pt.wavelength_nm;
    row["temperature_K"] = pt.temperature_K;
    row["rate_Hz"] = pt.rate_Hz;
    row["stderr_Hz"] = pt.stderr_Hz;
    if (i < result.model_rates_Hz.size())
      row["model_rate_Hz"] = result.model_rates_Hz[i];
    if (i < result.residuals.size()) row["residual"] = result.residuals[i];
    points.push_back(row);
  }
  report["points"] = points;

  if (const auto* em = std::get_if<EffectiveModeModelSpec>(&problem.model)) {
    report["mode_energies_meV"] = em->mode_energies_meV;
    const EmLayout layout(problem.data, *em);
    const double gamma = result.param("Gamma_meV");
    std::vector<double> grid;
    for (double e = 0.5; e <= 80.0; e += 0.5) grid.push_back(e);
    nlohmann::json spectra = nlohmann::json::array();
    const bool any_per_T =
        std::any_of(layout.per_T.begin(), layout.per_T.end(),
                    [](bool b) { return b; });
    const std::size_t n_entries = any_per_T ? layout.temps.size() : 1;
    for (std::size_t t = 0; t < n_entries; ++t) {
      std::vector<PhononMode> modes;
      std::vector<double> theta;
      for (const auto& [name, value] : result.params) {
        if (name == "Gamma_meV") break;
        theta.push_back(value);
      }
      for (std::size_t k = 0; k < em->mode_energies_meV.size(); ++k)
        modes.emplace_back(em->mode_energies_meV[k],
                           layout.s_of(theta, k, static_cast<int>(t)));
      const ModeSet set(std::move(modes), gamma, 1.0);
      nlohmann::json entry;
      if (any_per_T) entry["temperature_K"] = layout.temps[t];
      nlohmann::json pts = nlohmann::json::array();
      for (const auto& [e, s] : coupling_spectrum(set, grid))
        pts.push_back({e, s});
      entry["points"] = pts;
      spectra.push_back(entry);
    }
    report["coupling_spectrum"] = spectra;
  }
  return report;
}

}  // namespace nvcycle
