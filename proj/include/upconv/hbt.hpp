#pragma once

// Hanbury Brown-Twiss analysis of two time-tag streams: histogram of all
// pairwise delays t2 - t1 within +-tau_max, normalized to g2 by the mean count
// in a background window away from zero delay.

#include <cstdint>
#include <vector>

#include "upconv/photostream.hpp"

namespace upconv {

inline constexpr double default_bin_width = 10e-9;
inline constexpr double default_tau_max = 5.5e-7;
inline constexpr double default_background_lo = 200e-9;
inline constexpr double default_background_hi = 500e-9;
inline constexpr std::size_t min_background_bins = 20;

struct BackgroundWindow {
  double lo = default_background_lo;  // |tau| range, s
  double hi = default_background_hi;
};

// Bin k (k = -half_bins..half_bins, stored at k + half_bins) collects delays in
// [(k - 1/2) w, (k + 1/2) w).
struct CorrelationHistogram {
  double bin_width = default_bin_width;
  int half_bins = 0;
  double tau_max = 0.0;
  std::vector<std::int64_t> counts;
  std::vector<double> errors;  // sqrt(counts)
  // Filled by normalize_g2.
  double background = 0.0;
  double background_error = 0.0;
  std::vector<double> g2;
  std::vector<double> g2_errors;

  std::size_t size() const noexcept { return counts.size(); }
  std::size_t zero_bin() const noexcept { return static_cast<std::size_t>(half_bins); }
  double tau(std::size_t bin) const { return (static_cast<double>(bin) - half_bins) * bin_width; }
  std::int64_t total() const;
  bool normalized() const noexcept { return !g2.empty(); }
};

// Two-pointer sweep over sorted streams; O(N + M + pairs in window).
CorrelationHistogram cross_correlate(const TimeTagStream& s1, const TimeTagStream& s2,
                                     double bin_width = default_bin_width, double tau_max = default_tau_max);

// Histogram with the given per-bin counts (odd length, centred on zero delay).
CorrelationHistogram histogram_from_counts(std::vector<std::int64_t> counts, double bin_width = default_bin_width);

// g2 = counts / background, background = mean counts over the window bins.
// Errors: sqrt(counts) / background, with the background's Poisson error
// folded in quadrature.
CorrelationHistogram normalize_g2(const CorrelationHistogram& hist, BackgroundWindow window = {});

struct PeakStatistics {
  double tau = 0.0;
  std::int64_t counts = 0;
  double g2 = 0.0;
  double g2_error = 0.0;
  // (peak - background) / sqrt(peak + background_error^2)
  double significance = 0.0;
};

PeakStatistics peak_statistics(const CorrelationHistogram& hist);

// Flat accidental-coincidence level r1 r2 T w for uncorrelated streams.
double accidental_counts_per_bin(double rate1, double rate2, double duration, double bin_width);

}  // namespace upconv
