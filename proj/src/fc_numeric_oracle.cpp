#include <cmath>
#include <string>

#include "nvcycle/errors.hpp"
#include "nvcycle/franck_condon.hpp"

// Numeric cross-check for fc_overlap_sq, kept deliberately independent of the
// analytic path: oscillator eigenfunctions are built from the Hermite
// recurrence and the overlap integral is done by adaptive Simpson quadrature
// in the physical mass-weighted coordinate.

namespace nvcycle {

namespace {

double hermite(int n, double x) {
  double h_prev = 1.0;
  if (n == 0) return h_prev;
  double h = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double h_next = 2.0 * x * h - 2.0 * k * h_prev;
    h_prev = h;
    h = h_next;
  }
  return h;
}

// chi_n(Q) = (a/pi)^(1/4) / sqrt(2^n n!) exp(-a Q^2 / 2) H_n(sqrt(a) Q),
// a = omega / hbar in 1/(amu A^2).
double oscillator_wf(int n, double a, double Q) {
  double two_n_fact = 1.0;
  for (int k = 1; k <= n; ++k) two_n_fact *= 2.0 * k;
  const double norm = std::pow(a / M_PI, 0.25) / std::sqrt(two_n_fact);
  const double x = std::sqrt(a) * Q;
  return norm * std::exp(-0.5 * x * x) * hermite(n, x);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double err = left + right - whole;
  if (std::fabs(err) <= 15.0 * tol) return left + right + err / 15.0;
  if (depth <= 0)
    throw NumericError("overlap quadrature did not converge on [" +
                       std::to_string(a) + ", " + std::to_string(b) +
                       "], residual " + std::to_string(std::fabs(err)));
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double numeric_overlap_oracle(double S, int n_g, int n_e,
                              const QuadratureSpec& grid) {
  if (!(S >= 0.0)) throw DomainError("Huang-Rhys factor must be >= 0");
  if (n_g < 0 || n_e < 0) throw DomainError("oscillator quanta must be >= 0");
  if (n_g > 10 || n_e > 10)
    throw DomainError("numeric oracle supports quanta <= 10");
  if (!(grid.omega_meV > 0.0)) throw DomainError("mode energy must be positive");

  const double a = grid.omega_meV / constants::hbar_sq_meV_amu_A2;
  const double width = 1.0 / std::sqrt(a);
  const double dQ = displacement_from_huang_rhys(grid.omega_meV, S);

  // Classical turning point of the highest state plus an 8-width margin on
  // both sides bounds the neglected tails well below the tolerance.
  const double lo = -(std::sqrt(2.0 * n_g + 1.0) + 8.0) * width;
  const double hi = dQ + (std::sqrt(2.0 * n_e + 1.0) + 8.0) * width;

  const auto integrand = [&](double Q) {
    return oscillator_wf(n_g, a, Q) * oscillator_wf(n_e, a, Q - dQ);
  };
  const double fa = integrand(lo);
  const double fb = integrand(hi);
  const double fm = integrand(0.5 * (lo + hi));
  const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
  const double overlap = adaptive_simpson(integrand, lo, hi, fa, fm, fb, whole,
                                          grid.abs_tol, grid.max_depth);
  return overlap * overlap;
}

}  // namespace nvcycle
