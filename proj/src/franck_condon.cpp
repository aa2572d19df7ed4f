#include "nvcycle/franck_condon.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "nvcycle/errors.hpp"

namespace nvcycle {

namespace {

// log(n!) up to the largest quanta any caller can reach. Cumulative-sum table
// rather than std::lgamma: exact integer arguments, reproducible to the bit.
double log_factorial(int n) {
  constexpr int kTableSize = 2048;
  static const std::vector<double> table = [] {
    std::vector<double> t(kTableSize);
    t[0] = 0.0;
    for (int i = 1; i < kTableSize; ++i)
      t[i] = t[i - 1] + std::log(static_cast<double>(i));
    return t;
  }();
  if (n >= kTableSize)
    throw CapacityError("log-factorial table exceeded (n = " +
                        std::to_string(n) + ")");
  return table[n];
}

}  // namespace

double fc_overlap_sq(double S, int n_g, int n_e, int cap) {
  if (!(S >= 0.0)) throw DomainError("Huang-Rhys factor must be >= 0");
  if (n_g < 0 || n_e < 0) throw DomainError("oscillator quanta must be >= 0");
  if (n_g + n_e > cap)
    throw CapacityError("n_g + n_e = " + std::to_string(n_g + n_e) +
                        " exceeds the quanta cap " + std::to_string(cap));

  // Undisplaced oscillators are orthonormal; handled before logs so the
  // S -> 0 limit is exact rather than 0^0.
  if (S == 0.0) return n_g == n_e ? 1.0 : 0.0;

  // The overlap is symmetric under swapping the two occupations; fixing the
  // order keeps the floating-point sum bitwise symmetric too.
  if (n_g > n_e) std::swap(n_g, n_e);

  // |<n_e|n_g>|^2 = e^-S n_g! n_e! [ sum_l (-1)^l S^((n_g+n_e)/2 - l)
  //                                  / (l! (n_g-l)! (n_e-l)!) ]^2
  // Terms are combined relative to the largest log magnitude so the sum
  // stays in range for quanta up to the cap.
  const int l_max = std::min(n_g, n_e);
  const double log_s = std::log(S);
  std::vector<double> log_mag(l_max + 1);
  double peak = -INFINITY;
  for (int l = 0; l <= l_max; ++l) {
    log_mag[l] = (0.5 * (n_g + n_e) - l) * log_s - log_factorial(l) -
                 log_factorial(n_g - l) - log_factorial(n_e - l);
    peak = std::max(peak, log_mag[l]);
  }
  double acc = 0.0;
  for (int l = 0; l <= l_max; ++l)
    acc += (l % 2 == 0 ? 1.0 : -1.0) * std::exp(log_mag[l] - peak);
  if (acc == 0.0) return 0.0;

  const double log_sq = 2.0 * (peak + std::log(std::fabs(acc)));
  return std::exp(-S + log_factorial(n_g) + log_factorial(n_e) + log_sq);
}

double huang_rhys_from_displacement(double omega_meV, double deltaQ) {
  if (!(omega_meV > 0.0)) throw DomainError("mode energy must be positive");
  return omega_meV * deltaQ * deltaQ / (2.0 * constants::hbar_sq_meV_amu_A2);
}

double displacement_from_huang_rhys(double omega_meV, double S) {
  if (!(omega_meV > 0.0)) throw DomainError("mode energy must be positive");
  if (!(S >= 0.0)) throw DomainError("Huang-Rhys factor must be >= 0");
  return std::sqrt(2.0 * S * constants::hbar_sq_meV_amu_A2 / omega_meV);
}

}  // namespace nvcycle
