#pragma once

#include <utility>
#include <vector>

#include "nvcycle/markov.hpp"

// Blinking analysis: split a binned photon trace into bright and dark dwell
// intervals with a count threshold, and invert the mean dark dwell into the
// dark -> bright transition rate.

namespace nvcycle {

enum class DwellState { dark, bright };

struct DwellRecord {
  DwellState state;
  double duration_s;
  long start_bin;
};

struct ThresholdMethod {
  enum class Kind { histogram_modes, fixed };
  Kind kind = Kind::histogram_modes;
  double fixed_value = 0.0;

  static ThresholdMethod histogram_modes() { return {}; }
  static ThresholdMethod fixed(double counts_per_bin) {
    return {Kind::fixed, counts_per_bin};
  }
};

// Default method locates the two modal intensities of the count histogram
// (two-means on the histogram) and returns their midpoint. Throws
// AnalysisError("states indistinguishable") when the modes are closer than
// shot noise can separate.
double choose_threshold(const PhotonTrace& trace,
                        const ThresholdMethod& method = {});

// Classifies bins against the threshold, merges runs, absorbs runs shorter
// than min_dwell_bins into their neighbours (shot-noise debouncing), and
// censors the first and last dwells, whose true extent is unobserved.
std::vector<DwellRecord> extract_dwells(const PhotonTrace& trace,
                                        double threshold,
                                        int min_dwell_bins = 2);

// R = 1 / mean(duration) over dwells of the requested state; stderr by the
// delta method, R^2 * stderr(mean). Needs at least 2 dwells.
std::pair<double, double> estimate_rate(const std::vector<DwellRecord>& dwells,
                                        DwellState state);

}  // namespace nvcycle
