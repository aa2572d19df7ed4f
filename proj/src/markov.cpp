#include "nvcycle/markov.hpp"

#include <algorithm>
#include <cmath>

#include "nvcycle/csv.hpp"
#include "nvcycle/errors.hpp"

namespace nvcycle {

void ChainSpec::validate() const {
  if (!(gamma0_Hz > 0.0)) throw DomainError("gamma0 must be positive");
  if (!(gamma1_Hz > 0.0)) throw DomainError("gamma1 must be positive");
  if (!(mu1_Hz >= 0.0)) throw DomainError("mu1 must be >= 0");
}

void Photophysics::validate() const {
  if (!(sigma >= 0.0)) throw DomainError("sigma must be >= 0");
  if (!(sigma_prime > 0.0)) throw DomainError("sigma' must be positive");
  if (!(relaxation_Hz >= 0.0)) throw DomainError("relaxation must be >= 0");
  if (!(flux > 0.0)) throw DomainError("flux must be positive");
}

void CycleSpec::validate() const {
  chain.validate();
  if (!(ionization_rate_Hz > 0.0))
    throw DomainError("ionization rate must be positive");
  if (!(dark_count_rate_Hz >= 0.0))
    throw DomainError("dark count rate must be >= 0");
  if (!(bright_count_rate_Hz > dark_count_rate_Hz))
    throw DomainError("bright count rate must exceed dark count rate");
}

double mfpt_rate(const ChainSpec& chain) {
  chain.validate();
  return chain.gamma0_Hz * chain.gamma1_Hz /
         (chain.gamma0_Hz + chain.gamma1_Hz + chain.mu1_Hz);
}

double rate_from_photophysics(const Photophysics& p) {
  p.validate();
  return p.sigma * p.flux /
         (1.0 + p.relaxation_Hz / (p.sigma_prime * p.flux));
}

double rate_from_photophysics_exact(const Photophysics& p) {
  p.validate();
  return p.sigma * p.flux /
         (p.sigma / p.sigma_prime + 1.0 +
          p.relaxation_Hz / (p.sigma_prime * p.flux));
}

namespace {

// One 0 -> 2 passage: pump, then branch between conversion and relaxation.
double first_passage_time(const ChainSpec& chain, Rng& rng) {
  const double exit_rate = chain.gamma1_Hz + chain.mu1_Hz;
  const double convert_prob = chain.gamma1_Hz / exit_rate;
  double t = 0.0;
  while (true) {
    t += rng.exponential(chain.gamma0_Hz);
    t += rng.exponential(exit_rate);
    if (rng.uniform() < convert_prob) return t;
  }
}

}  // namespace

std::pair<double, double> simulate_first_passage(const ChainSpec& chain,
                                                 long trials,
                                                 std::uint64_t seed) {
  chain.validate();
  if (trials < 1) throw DomainError("trials must be >= 1");
  double sum = 0.0, sum_sq = 0.0;
  for (long i = 0; i < trials; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    const double t = first_passage_time(chain, rng);
    sum += t;
    sum_sq += t * t;
  }
  const double mean = sum / trials;
  if (trials == 1) return {mean, 0.0};
  const double var = std::max(0.0, (sum_sq - sum * sum / trials) / (trials - 1));
  return {mean, std::sqrt(var / trials)};
}

PhotonTrace simulate_blinking(const CycleSpec& cycle, double duration_s,
                              double bin_width_s, std::uint64_t seed) {
  cycle.validate();
  if (!(duration_s > 0.0)) throw DomainError("duration must be positive");
  if (!(bin_width_s > 0.0)) throw DomainError("bin width must be positive");
  const std::size_t n_bins =
      static_cast<std::size_t>(std::floor(duration_s / bin_width_s));
  if (n_bins == 0) throw DomainError("duration shorter than one bin");
  const double t_end = n_bins * bin_width_s;

  Rng rng(seed);

  // Pass 1: lay alternating dwells on [0, t_end) and accumulate the bright
  // fraction of every bin. The system starts bright.
  std::vector<double> bright_s(n_bins, 0.0);
  double t = 0.0;
  bool bright = true;
  while (t < t_end) {
    const double dwell = bright ? rng.exponential(cycle.ionization_rate_Hz)
                                : first_passage_time(cycle.chain, rng);
    if (bright) {
      const double t1 = std::min(t + dwell, t_end);
      for (std::size_t b = static_cast<std::size_t>(t / bin_width_s);
           b < n_bins; ++b) {
        const double lo = std::max(t, b * bin_width_s);
        const double hi = std::min(t1, (b + 1) * bin_width_s);
        if (hi <= lo) break;
        bright_s[b] += hi - lo;
      }
    }
    t += dwell;
    bright = !bright;
  }

  // Pass 2: per-bin Poisson counts at the time-weighted mixed intensity.
  PhotonTrace trace;
  trace.bin_width_s = bin_width_s;
  trace.counts.resize(n_bins);
  trace.true_state_per_bin.resize(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    const double tb = std::clamp(bright_s[b], 0.0, bin_width_s);
    const double mean = cycle.bright_count_rate_Hz * tb +
                        cycle.dark_count_rate_Hz * (bin_width_s - tb);
    trace.counts[b] = rng.poisson(mean);
    trace.true_state_per_bin[b] = tb >= 0.5 * bin_width_s ? 1 : 0;
  }
  return trace;
}

void write_trace(const std::string& path, const PhotonTrace& trace,
                 const std::vector<std::pair<std::string, std::string>>&
                     extra_meta) {
  if (!(trace.bin_width_s > 0.0))
    throw DomainError("bin width must be positive");
  csv::Table table;
  table.schema = "trace/v1";
  table.meta.emplace_back("bin_width_s", csv::format_double(trace.bin_width_s));
  for (const auto& kv : extra_meta) table.meta.push_back(kv);
  table.header = {"t_s", "counts"};
  for (std::size_t b = 0; b < trace.counts.size(); ++b)
    table.rows.push_back(
        {b * trace.bin_width_s, static_cast<double>(trace.counts[b])});
  csv::write_table_file(path, table);
}

const std::string& LoadedTrace::meta_value(const std::string& key) const {
  static const std::string empty;
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  return empty;
}

LoadedTrace read_trace(const std::string& path) {
  const csv::Table table = csv::read_table_file(path);
  const std::string& width = table.meta_value("bin_width_s");
  if (width.empty())
    throw ParseError(path + ": missing # bin_width_s= comment");
  LoadedTrace loaded;
  loaded.trace.bin_width_s = std::stod(width);
  if (!(loaded.trace.bin_width_s > 0.0))
    throw ValidationError(path + ": bin width must be positive");
  const std::size_t c_counts = table.column("counts");
  for (const auto& row : table.rows) {
    const double c = row[c_counts];
    if (c < 0.0 || c != std::floor(c))
      throw ValidationError(path + ": counts must be non-negative integers");
    loaded.trace.counts.push_back(static_cast<std::uint32_t>(c));
  }
  loaded.meta = table.meta;
  return loaded;
}

}  // namespace nvcycle
