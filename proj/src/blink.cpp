#include "nvcycle/blink.hpp"

#include <algorithm>
#include <cmath>

#include "nvcycle/errors.hpp"

namespace nvcycle {

namespace {

struct Run {
  bool bright;
  long start;
  long length;
};

std::vector<Run> encode_runs(const std::vector<bool>& bright) {
  std::vector<Run> runs;
  for (long i = 0; i < static_cast<long>(bright.size()); ++i) {
    if (!runs.empty() && runs.back().bright == bright[i])
      ++runs.back().length;
    else
      runs.push_back({static_cast<bool>(bright[i]), i, 1});
  }
  return runs;
}

void merge_same_state(std::vector<Run>& runs) {
  std::vector<Run> merged;
  for (const Run& run : runs) {
    if (!merged.empty() && merged.back().bright == run.bright)
      merged.back().length += run.length;
    else
      merged.push_back(run);
  }
  merged.swap(runs);
}

// Runs shorter than the debounce length are folded into a neighbour (the
// previous run when one exists). Start indices of absorbed bins follow the
// absorbing run.
void debounce(std::vector<Run>& runs, int min_bins) {
  while (runs.size() > 1) {
    merge_same_state(runs);
    std::size_t victim = runs.size();
    for (std::size_t i = 0; i < runs.size(); ++i)
      if (runs[i].length < min_bins) {
        victim = i;
        break;
      }
    if (victim == runs.size() || runs.size() == 1) break;
    if (victim > 0) {
      runs[victim - 1].length += runs[victim].length;
    } else {
      runs[1].start = runs[0].start;
      runs[1].length += runs[0].length;
    }
    runs.erase(runs.begin() + victim);
  }
}

}  // namespace

double choose_threshold(const PhotonTrace& trace,
                        const ThresholdMethod& method) {
  if (trace.counts.empty()) throw ValidationError("photon trace is empty");
  if (method.kind == ThresholdMethod::Kind::fixed) return method.fixed_value;

  std::uint32_t max_count = 0;
  for (std::uint32_t c : trace.counts) max_count = std::max(max_count, c);
  std::vector<std::uint64_t> hist(max_count + 1, 0);
  for (std::uint32_t c : trace.counts) ++hist[c];

  // Two-means over the histogram, seeded at the extremes. Converges to the
  // two modal intensities of a well-separated bimodal count distribution.
  double c_lo = 0.0;
  while (hist[static_cast<std::size_t>(c_lo)] == 0) ++c_lo;
  double c_hi = max_count;
  double m_lo = c_lo, m_hi = c_hi;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (c_lo + c_hi);
    double sum_lo = 0.0, n_lo = 0.0, sum_hi = 0.0, n_hi = 0.0;
    for (std::size_t c = 0; c < hist.size(); ++c) {
      if (hist[c] == 0) continue;
      if (c <= mid) {
        sum_lo += static_cast<double>(c) * hist[c];
        n_lo += hist[c];
      } else {
        sum_hi += static_cast<double>(c) * hist[c];
        n_hi += hist[c];
      }
    }
    m_lo = n_lo > 0.0 ? sum_lo / n_lo : c_lo;
    m_hi = n_hi > 0.0 ? sum_hi / n_hi : c_hi;
    if (m_lo == c_lo && m_hi == c_hi) break;
    c_lo = m_lo;
    c_hi = m_hi;
  }

  // Poisson modes closer than ~2.5 combined shot widths cannot be told
  // apart by a per-bin threshold.
  if (m_hi - m_lo <= 2.5 * (std::sqrt(std::max(m_lo, 0.0)) +
                            std::sqrt(std::max(m_hi, 0.0))))
    throw AnalysisError("states indistinguishable");
  return 0.5 * (m_lo + m_hi);
}

std::vector<DwellRecord> extract_dwells(const PhotonTrace& trace,
                                        double threshold,
                                        int min_dwell_bins) {
  if (trace.counts.empty()) throw ValidationError("photon trace is empty");
  if (!(trace.bin_width_s > 0.0))
    throw DomainError("bin width must be positive");
  if (min_dwell_bins < 1) throw DomainError("min_dwell_bins must be >= 1");

  std::vector<bool> bright(trace.counts.size());
  for (std::size_t i = 0; i < trace.counts.size(); ++i)
    bright[i] = trace.counts[i] > threshold;

  std::vector<Run> runs = encode_runs(bright);
  debounce(runs, min_dwell_bins);

  // First and last runs are censored: the trace window clips their extent.
  std::vector<DwellRecord> dwells;
  for (std::size_t i = 1; i + 1 < runs.size(); ++i)
    dwells.push_back({runs[i].bright ? DwellState::bright : DwellState::dark,
                      runs[i].length * trace.bin_width_s, runs[i].start});
  return dwells;
}

std::pair<double, double> estimate_rate(const std::vector<DwellRecord>& dwells,
                                        DwellState state) {
  double sum = 0.0, sum_sq = 0.0;
  long n = 0;
  for (const DwellRecord& d : dwells) {
    if (d.state != state) continue;
    sum += d.duration_s;
    sum_sq += d.duration_s * d.duration_s;
    ++n;
  }
  if (n < 2)
    throw InsufficientDataError(
        "need at least 2 dwells of the requested state, have " +
        std::to_string(n));
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1));
  const double stderr_mean = std::sqrt(var / n);
  const double rate = 1.0 / mean;
  return {rate, rate * rate * stderr_mean};
}

}  // namespace nvcycle
