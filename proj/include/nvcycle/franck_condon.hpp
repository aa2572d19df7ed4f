#pragma once

#include <string>

#include "nvcycle/units.hpp"

// Displaced-harmonic-oscillator machinery: analytic Franck-Condon overlap
// factors in the equal-mode approximation, Huang-Rhys conversions, and an
// independent overlap oracle that integrates Hermite-polynomial
// wavefunctions numerically.

namespace nvcycle {

// One effective vibrational mode: energy hbar*omega_k and dimensionless
// coupling S_k.
struct PhononMode {
  double energy_meV;
  double huang_rhys;
  std::string label;

  PhononMode(double energy_meV_, double huang_rhys_, std::string label_ = {})
      : energy_meV(energy_meV_),
        huang_rhys(huang_rhys_),
        label(std::move(label_)) {
    if (!(energy_meV > 0.0))
      throw DomainError("mode energy must be positive (meV)");
    if (!(huang_rhys >= 0.0))
      throw DomainError("Huang-Rhys factor must be >= 0");
  }
};

struct OscillatorState {
  int quanta = 0;

  explicit OscillatorState(int n) : quanta(n) {
    if (n < 0) throw DomainError("oscillator quanta must be >= 0");
  }
};

inline constexpr int kDefaultFcQuantaCap = 60;

// |<chi_ne | chi_ng>|^2 between the vibrational levels of two harmonic
// potentials of equal frequency whose minima differ by a displacement with
// Huang-Rhys factor S. Evaluated in log-factorial space with sign tracking
// so quanta up to the cap stay finite. S = 0 reduces to orthonormality
// (the 0^0 = 1 convention is handled explicitly).
double fc_overlap_sq(double S, int n_g, int n_e, int cap = kDefaultFcQuantaCap);

// S = E * dQ^2 / (2 hbar^2), E in meV, dQ in sqrt(amu)*Angstrom.
double huang_rhys_from_displacement(double omega_meV, double deltaQ);

// Inverse of the above; returns the non-negative root.
double displacement_from_huang_rhys(double omega_meV, double S);

struct QuadratureSpec {
  double abs_tol = 1e-12;
  int max_depth = 48;
  // The mode energy only sets the length scale of the integrand; the overlap
  // itself is dimensionless and independent of it.
  double omega_meV = 43.0;
};

// Verification-grade overlap: builds both displaced oscillator wavefunctions
// from Hermite polynomials in the mass-weighted coordinate, integrates their
// product by adaptive Simpson quadrature over the classically allowed region
// plus an 8-width margin, and squares the result. Quanta are limited to 10;
// this path exists to check fc_overlap_sq, not to be fast.
double numeric_overlap_oracle(double S, int n_g, int n_e,
                              const QuadratureSpec& grid = {});

}  // namespace nvcycle
