#include "upconv/hbt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "upconv/error.hpp"

namespace upconv {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

void check_sorted(const TimeTagStream& s, const char* name) {
  if (!std::is_sorted(s.timestamps.begin(), s.timestamps.end())) {
    throw Error(ErrorCode::format, std::string(name) + " timestamps are not sorted");
  }
}

}  // namespace

std::int64_t CorrelationHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

CorrelationHistogram cross_correlate(const TimeTagStream& s1, const TimeTagStream& s2, double bin_width,
                                     double tau_max) {
  check_sorted(s1, "first stream");
  check_sorted(s2, "second stream");
  if (!(tau_max >= 0.0)) throw Error(ErrorCode::config, "tau_max must be >= 0");
  const std::int64_t w = to_picoseconds(bin_width);
  if (w < 1) throw Error(ErrorCode::config, "bin width must be at least 1 ps");
  const std::int64_t res = std::max(to_picoseconds(s1.detector.resolution), to_picoseconds(s2.detector.resolution));
  if (w < res) {
    throw Error(ErrorCode::config, "bin width " + std::to_string(w) + " ps is below the stream resolution " +
                                       std::to_string(res) + " ps");
  }
  const std::int64_t reach = to_picoseconds(tau_max);

  CorrelationHistogram hist;
  hist.bin_width = static_cast<double>(w) / ps_per_second;
  hist.tau_max = static_cast<double>(reach) / ps_per_second;
  hist.half_bins = static_cast<int>((2 * reach + w) / (2 * w));
  hist.counts.assign(2 * static_cast<std::size_t>(hist.half_bins) + 1, 0);

  const auto& a = s1.timestamps;
  const auto& b = s2.timestamps;
  std::size_t lo = 0;
  for (std::int64_t t1 : a) {
    while (lo < b.size() && b[lo] < t1 - reach) ++lo;
    for (std::size_t j = lo; j < b.size() && b[j] <= t1 + reach; ++j) {
      const std::int64_t delta = b[j] - t1;
      const std::int64_t k = floor_div(2 * delta + w, 2 * w);
      ++hist.counts[static_cast<std::size_t>(k + hist.half_bins)];
    }
  }
  hist.errors.resize(hist.counts.size());
  std::transform(hist.counts.begin(), hist.counts.end(), hist.errors.begin(),
                 [](std::int64_t c) { return std::sqrt(static_cast<double>(c)); });
  return hist;
}

CorrelationHistogram histogram_from_counts(std::vector<std::int64_t> counts, double bin_width) {
  if (counts.size() % 2 != 1) throw Error(ErrorCode::shape, "histogram needs an odd number of bins");
  if (!(bin_width > 0.0)) throw Error(ErrorCode::config, "bin width must be > 0");
  CorrelationHistogram hist;
  hist.bin_width = bin_width;
  hist.half_bins = static_cast<int>(counts.size() / 2);
  hist.tau_max = hist.half_bins * bin_width;
  hist.counts = std::move(counts);
  hist.errors.resize(hist.counts.size());
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    if (hist.counts[i] < 0) throw Error(ErrorCode::config, "histogram counts must be >= 0");
    hist.errors[i] = std::sqrt(static_cast<double>(hist.counts[i]));
  }
  return hist;
}

CorrelationHistogram normalize_g2(const CorrelationHistogram& hist, BackgroundWindow window) {
  if (!(window.lo > 0.0) || !(window.hi >= window.lo)) {
    throw Error(ErrorCode::config, "background window must satisfy 0 < lo <= hi");
  }
  const double slack = 1e-9 * hist.bin_width;
  std::int64_t sum = 0;
  std::size_t bins = 0;
  for (std::size_t i = 0; i < hist.size(); ++i) {
    const double tau = std::abs(hist.tau(i));
    if (tau >= window.lo - slack && tau <= window.hi + slack) {
      sum += hist.counts[i];
      ++bins;
    }
  }
  if (bins == 0) throw Error(ErrorCode::config, "background window contains no bins");
  if (bins < min_background_bins) {
    throw Error(ErrorCode::config, "background window has " + std::to_string(bins) + " bins, need at least " +
                                       std::to_string(min_background_bins));
  }
  CorrelationHistogram out = hist;
  out.background = static_cast<double>(sum) / static_cast<double>(bins);
  out.background_error = std::sqrt(static_cast<double>(sum)) / static_cast<double>(bins);
  if (!(out.background > 0.0)) throw Error(ErrorCode::undefined_normalization, "background is zero");

  const double bg = out.background;
  const double rel_bg = out.background_error / bg;
  out.g2.resize(hist.size());
  out.g2_errors.resize(hist.size());
  for (std::size_t i = 0; i < hist.size(); ++i) {
    const double c = static_cast<double>(hist.counts[i]);
    out.g2[i] = c / bg;
    out.g2_errors[i] = std::hypot(std::sqrt(c) / bg, out.g2[i] * rel_bg);
  }
  return out;
}

PeakStatistics peak_statistics(const CorrelationHistogram& hist) {
  if (!hist.normalized()) throw Error(ErrorCode::undefined_normalization, "histogram has not been normalized");
  const auto it = std::max_element(hist.g2.begin(), hist.g2.end());
  const auto bin = static_cast<std::size_t>(std::distance(hist.g2.begin(), it));
  PeakStatistics peak;
  peak.tau = hist.tau(bin);
  peak.counts = hist.counts[bin];
  peak.g2 = hist.g2[bin];
  peak.g2_error = hist.g2_errors[bin];
  const double c = static_cast<double>(peak.counts);
  const double denom = std::sqrt(c + hist.background_error * hist.background_error);
  peak.significance = denom > 0.0 ? (c - hist.background) / denom : 0.0;
  return peak;
}

double accidental_counts_per_bin(double rate1, double rate2, double duration, double bin_width) {
  return rate1 * rate2 * duration * bin_width;
}

}  // namespace upconv
