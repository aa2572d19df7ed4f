#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nvcycle/rng.hpp"

// Three-state continuous-time Markov chain for the charge cycle: the dark
// species' ground state (0) pumps to its excited state (1) at gamma0, which
// either converts to the bright species (2) at gamma1 or relaxes back at
// mu1. State 2 is absorbing for the first-passage problem; the full blinking
// cycle closes it via an ionization rate back to the dark species.

namespace nvcycle {

struct ChainSpec {
  double gamma0_Hz = 0.0;
  double gamma1_Hz = 0.0;
  double mu1_Hz = 0.0;

  void validate() const;
};

// Rate ingredients behind the chain: absorption cross sections for the two
// pump steps, the competing spontaneous relaxation, and the photon flux.
struct Photophysics {
  double sigma = 0.0;        // ground -> excited absorption cross section
  double sigma_prime = 0.0;  // excited -> converted cross section
  double relaxation_Hz = 0.0;
  double flux = 0.0;         // photons per area per second

  void validate() const;
};

struct CycleSpec {
  ChainSpec chain;                  // dark -> bright first passage
  double ionization_rate_Hz = 0.0;  // bright -> dark exit
  double bright_count_rate_Hz = 0.0;
  double dark_count_rate_Hz = 0.0;

  void validate() const;
};

struct PhotonTrace {
  double bin_width_s = 0.0;
  std::vector<std::uint32_t> counts;
  // Majority state per bin (1 = bright), kept only for validation.
  std::vector<std::uint8_t> true_state_per_bin;
};

// Closed-form mean-first-passage rate gamma0 gamma1 / (gamma0 + gamma1 + mu1).
double mfpt_rate(const ChainSpec& chain);

// Two-photon cycling rate with the cross-section ratio neglected:
// sigma Phi / (1 + relaxation / (sigma' Phi)).
double rate_from_photophysics(const Photophysics& p);

// Same quantity without dropping sigma/sigma'; always <= the approximate
// form, with relative gap bounded by sigma/sigma'.
double rate_from_photophysics_exact(const Photophysics& p);

// Monte Carlo first passage 0 -> 2 with exponential clocks; one PRNG stream
// per trial, so the estimate is independent of evaluation order.
// Returns (mean_s, stderr_s).
std::pair<double, double> simulate_first_passage(const ChainSpec& chain,
                                                 long trials,
                                                 std::uint64_t seed);

// Alternating bright/dark renewal process observed through a binned photon
// counter. Bright dwells are exponential at the ionization rate; dark dwells
// are first-passage times through the chain. Bins straddling a transition
// draw Poisson counts at the time-weighted mixed intensity. Only whole bins
// are emitted.
PhotonTrace simulate_blinking(const CycleSpec& cycle, double duration_s,
                              double bin_width_s, std::uint64_t seed);

// Trace CSV: schema trace/v1, header t_s,counts, bin width and any extra
// metadata (wavelength, temperature, ...) as # key=value comments.
void write_trace(const std::string& path, const PhotonTrace& trace,
                 const std::vector<std::pair<std::string, std::string>>&
                     extra_meta = {});

struct LoadedTrace {
  PhotonTrace trace;
  std::vector<std::pair<std::string, std::string>> meta;

  const std::string& meta_value(const std::string& key) const;
};

LoadedTrace read_trace(const std::string& path);

}  // namespace nvcycle
