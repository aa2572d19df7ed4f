#include "nvcycle/effective_mode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nvcycle/errors.hpp"

namespace nvcycle {

ModeSet::ModeSet(std::vector<PhononMode> modes_, double lorentzian_fwhm_meV_,
                 double scale_)
    : modes(std::move(modes_)),
      lorentzian_fwhm_meV(lorentzian_fwhm_meV_),
      scale(scale_) {
  if (modes.empty()) throw ValidationError("mode set must contain a mode");
  if (modes.size() > kMaxModes)
    throw CapacityError("mode count " + std::to_string(modes.size()) +
                        " exceeds the cap of " + std::to_string(kMaxModes));
  if (!(lorentzian_fwhm_meV > 0.0))
    throw DomainError("Lorentzian FWHM must be positive (meV)");
  if (!(scale > 0.0)) throw DomainError("scale must be positive");
}

void EnumerationLimits::validate() const {
  if (max_quanta_per_mode < 1)
    throw ValidationError("max_quanta_per_mode must be >= 1");
  if (!(boltzmann_cutoff > 0.0 && boltzmann_cutoff < 1.0))
    throw ValidationError("boltzmann_cutoff must be in (0, 1)");
  if (!(lorentzian_window_halfwidths > 0.0))
    throw ValidationError("lorentzian_window_halfwidths must be positive");
}

double boltzmann_weight(const OccupationVector& n_g, const ModeSet& modes,
                        TemperatureK T) {
  if (n_g.size() != modes.modes.size())
    throw ValidationError("occupation vector length does not match mode count");
  double energy = 0.0;
  for (std::size_t k = 0; k < n_g.size(); ++k) {
    if (n_g[k] < 0) throw DomainError("occupation quanta must be >= 0");
    energy += n_g[k] * modes.modes[k].energy_meV;
  }
  return boltzmann_factor(energy, T);
}

double lorentzian(double energy_meV, double fwhm_meV) {
  if (!(fwhm_meV > 0.0))
    throw DomainError("Lorentzian FWHM must be positive (meV)");
  const double x = 2.0 * energy_meV / fwhm_meV;
  return 1.0 / (1.0 + x * x);
}

namespace {

// Per-mode Franck-Condon lookup, filled once per rate evaluation.
class FcTables {
 public:
  FcTables(const ModeSet& modes, int cap) : stride_(cap + 1) {
    fc_.reserve(modes.modes.size());
    for (const auto& mode : modes.modes) {
      std::vector<double> t(stride_ * stride_);
      for (int i = 0; i <= cap; ++i)
        for (int j = 0; j <= cap; ++j)
          t[i * stride_ + j] = fc_overlap_sq(mode.huang_rhys, i, j, 2 * cap);
      fc_.push_back(std::move(t));
    }
  }

  double operator()(std::size_t k, int i, int j) const {
    return fc_[k][i * stride_ + j];
  }

 private:
  std::vector<std::vector<double>> fc_;
  int stride_;
};

struct Enumerator {
  const ModeSet& modes;
  const EnumerationLimits& limits;
  const FcTables& tables;
  double detuning_meV;
  double window_meV;
  double kT_meV;  // 0 at T = 0

  // suffix_reach[k] = max total energy modes k.. can still add.
  std::vector<double> suffix_reach;
  OccupationVector n_g, n_e;
  double sum = 0.0;

  Enumerator(const ModeSet& ms, const EnumerationLimits& lim,
             const FcTables& tab, double detuning, double window, double kT)
      : modes(ms),
        limits(lim),
        tables(tab),
        detuning_meV(detuning),
        window_meV(window),
        kT_meV(kT),
        suffix_reach(ms.modes.size() + 1, 0.0),
        n_g(ms.modes.size(), 0),
        n_e(ms.modes.size(), 0) {
    for (std::size_t k = ms.modes.size(); k-- > 0;)
      suffix_reach[k] = suffix_reach[k + 1] +
                        lim.max_quanta_per_mode * ms.modes[k].energy_meV;
  }

  // Excited-state DFS restricted to total energies in [lo, hi]; branches
  // that cannot land inside the band are cut.
  void excited(std::size_t k, double e_partial, double lo, double hi,
               double ground_energy, double weight_fc) {
    if (k == modes.modes.size()) {
      const double mismatch = detuning_meV + e_partial - ground_energy;
      sum += weight_fc * lorentzian(mismatch, modes.lorentzian_fwhm_meV);
      return;
    }
    const double e_k = modes.modes[k].energy_meV;
    for (int n = 0; n <= limits.max_quanta_per_mode; ++n) {
      const double next = e_partial + n * e_k;
      if (next > hi) break;
      if (next + suffix_reach[k + 1] < lo) continue;
      n_e[k] = n;
      excited(k + 1, next, lo, hi, ground_energy,
              weight_fc * tables(k, n_g[k], n));
    }
  }

  // Ground-state DFS in increasing per-mode energy with early exit once the
  // thermal weight falls below the cutoff (energy > e_max).
  void ground(std::size_t k, double energy, double e_max) {
    if (k == modes.modes.size()) {
      const double weight = kT_meV > 0.0 ? std::exp(-energy / kT_meV)
                                         : (energy > 0.0 ? 0.0 : 1.0);
      const double lo = std::max(0.0, energy - detuning_meV - window_meV);
      const double hi = energy - detuning_meV + window_meV;
      if (hi < lo) return;
      excited(0, 0.0, lo, hi, energy, weight);
      return;
    }
    const double e_k = modes.modes[k].energy_meV;
    for (int n = 0; n <= limits.max_quanta_per_mode; ++n) {
      const double next = energy + n * e_k;
      if (next > e_max) break;
      n_g[k] = n;
      ground(k + 1, next, e_max);
    }
  }
};

}  // namespace

double rate_per_power(WavelengthNm lambda, TemperatureK T, const ModeSet& modes,
                      WavelengthNm zpl, const EnumerationLimits& limits) {
  limits.validate();
  const double detuning = detuning_below_zpl(lambda, zpl).value;

  const double kT = constants::kB_meV_per_K * T.value;
  // Ground states above e_max carry weight < boltzmann_cutoff relative to
  // the vibrational ground state and are never visited.
  const double e_max = kT > 0.0 ? -kT * std::log(limits.boltzmann_cutoff) : 0.0;
  const double window =
      limits.lorentzian_window_halfwidths * 0.5 * modes.lorentzian_fwhm_meV;

  // In-window terms need ground energy >= detuning - window. If the thermal
  // population reaches that far but the per-mode cap cannot, truncation (not
  // physics) would zero the rate; refuse and suggest a workable cap.
  double reach = 0.0, energy_sum = 0.0;
  for (const auto& mode : modes.modes) {
    reach += limits.max_quanta_per_mode * mode.energy_meV;
    energy_sum += mode.energy_meV;
  }
  const double needed = detuning - window;
  if (needed > reach) {
    if (needed <= e_max) {
      const int suggestion = static_cast<int>(std::ceil(detuning / energy_sum));
      throw CapacityError(
          "resonance window unreachable under max_quanta_per_mode; raise it to "
          "at least " +
          std::to_string(suggestion));
    }
    return 0.0;  // thermally frozen before the cap matters
  }

  FcTables tables(modes, limits.max_quanta_per_mode);
  Enumerator walker(modes, limits, tables, detuning, window, kT);
  walker.ground(0, 0.0, e_max);
  return modes.scale * walker.sum;
}

std::vector<std::pair<double, double>> coupling_spectrum(
    const ModeSet& modes, const std::vector<double>& grid_meV) {
  if (grid_meV.empty()) throw ValidationError("energy grid must be non-empty");
  for (std::size_t i = 1; i < grid_meV.size(); ++i)
    if (!(grid_meV[i] >= grid_meV[i - 1]))
      throw ValidationError("energy grid must be ascending");
  std::vector<std::pair<double, double>> out;
  out.reserve(grid_meV.size());
  for (double e : grid_meV) {
    double s = 0.0;
    for (const auto& mode : modes.modes)
      s += lorentzian(mode.energy_meV - e, modes.lorentzian_fwhm_meV) *
           mode.huang_rhys;
    out.emplace_back(e, s);
  }
  return out;
}

}  // namespace nvcycle
