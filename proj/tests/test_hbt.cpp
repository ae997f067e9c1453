#include <cmath>
#include <random>

#include "doctest.h"
#include "upconv/error.hpp"
#include "upconv/hbt.hpp"
#include "upconv/rng.hpp"

using namespace upconv;

namespace {

TimeTagStream random_stream(Rng& rng, std::size_t n, std::int64_t span, std::int64_t resolution_ps) {
  std::uniform_int_distribution<std::int64_t> u(0, span / resolution_ps - 1);
  std::vector<std::int64_t> t;
  for (std::size_t i = 0; i < n; ++i) t.push_back(u(rng) * resolution_ps);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  TimeTagStream s;
  s.timestamps = std::move(t);
  s.duration_ps = span;
  s.detector.resolution = static_cast<double>(resolution_ps) / ps_per_second;
  return s;
}

std::vector<std::int64_t> brute_force(const TimeTagStream& a, const TimeTagStream& b, std::int64_t w,
                                      std::int64_t reach) {
  const int half = static_cast<int>((2 * reach + w) / (2 * w));
  std::vector<std::int64_t> counts(2 * half + 1, 0);
  for (std::int64_t t1 : a.timestamps) {
    for (std::int64_t t2 : b.timestamps) {
      const std::int64_t d = t2 - t1;
      if (d < -reach || d > reach) continue;
      const auto k = static_cast<std::int64_t>(std::floor((static_cast<double>(d) / w) + 0.5));
      counts[static_cast<std::size_t>(k + half)]++;
    }
  }
  return counts;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::io;
}

}  // namespace

TEST_SUITE("hbt") {
  TEST_CASE("two-pointer histogram equals brute force") {
    Rng rng(99);
    std::uniform_int_distribution<std::size_t> size(1, 400);
    for (int trial = 0; trial < 30; ++trial) {
      const std::int64_t res = (trial % 3 == 0) ? 1 : 1000;
      const auto a = random_stream(rng, size(rng), 20'000'000, res);
      const auto b = random_stream(rng, size(rng), 20'000'000, res);
      const auto hist = cross_correlate(a, b, 10e-9, 5.5e-7);
      CHECK(hist.counts == brute_force(a, b, 10000, 550000));
    }
  }

  TEST_CASE("bin edges are half-open around multiples of the width") {
    TimeTagStream a;
    a.timestamps = {1'000'000};
    a.duration_ps = 2'000'000;
    a.detector.resolution = 1e-12;
    TimeTagStream b = a;
    b.timestamps = {1'000'000 - 5000, 1'000'000 + 4999, 1'000'000 + 5000};
    const auto h = cross_correlate(a, b, 10e-9, 50e-9);
    CHECK(h.half_bins == 5);
    CHECK(h.counts[h.zero_bin()] == 2);
    CHECK(h.counts[h.zero_bin() + 1] == 1);
    CHECK(h.total() == 3);
  }

  TEST_CASE("input validation") {
    TimeTagStream a;
    a.timestamps = {5, 3};
    a.duration_ps = 10;
    TimeTagStream b;
    b.duration_ps = 10;
    CHECK(code_of([&] { cross_correlate(a, b); }) == ErrorCode::format);
    a.timestamps = {3, 5};
    a.detector.resolution = 20e-9;
    CHECK(code_of([&] { cross_correlate(a, b, 10e-9); }) == ErrorCode::config);
    CHECK(code_of([] { histogram_from_counts({1, 2}); }) == ErrorCode::shape);
    const auto flat = histogram_from_counts(std::vector<std::int64_t>(111, 3));
    CHECK(code_of([&] { normalize_g2(flat, {0.0, 5e-7}); }) == ErrorCode::config);
    CHECK(code_of([&] { normalize_g2(flat, {2e-7, 2.5e-7}); }) == ErrorCode::config);  // too few bins
    const auto empty = histogram_from_counts(std::vector<std::int64_t>(111, 0));
    CHECK(code_of([&] { normalize_g2(empty); }) == ErrorCode::undefined_normalization);
    CHECK(code_of([&] { peak_statistics(flat); }) == ErrorCode::undefined_normalization);
  }

  TEST_CASE("normalization is idempotent") {
    std::vector<std::int64_t> c(111);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = static_cast<std::int64_t>(5 + i % 4);
    const auto once = normalize_g2(histogram_from_counts(c));
    const auto twice = normalize_g2(once);
    CHECK(once.g2 == twice.g2);
    CHECK(once.g2_errors == twice.g2_errors);
  }

  TEST_CASE("peak of 38 counts on a 4.46 background") {
    std::vector<std::int64_t> c(111, 0);
    int filled = 0;
    for (int k = -55; k <= 55; ++k) {
      if (std::abs(k) >= 6) c[static_cast<std::size_t>(k + 55)] = (filled++ < 46) ? 5 : 4;
    }
    c[55] = 38;
    const auto h = normalize_g2(histogram_from_counts(c), {60e-9, 550e-9});
    CHECK(h.background == doctest::Approx(4.46).epsilon(1e-12));
    const auto p = peak_statistics(h);
    CHECK(p.tau == 0.0);
    CHECK(std::abs(p.g2 - 38.0 / 4.46) < 1e-12);
    const double bg_err = std::sqrt(446.0) / 100.0;
    CHECK(std::abs(p.g2_error - std::hypot(std::sqrt(38.0) / 4.46, (38.0 / 4.46) * bg_err / 4.46)) < 1e-12);
    CHECK(std::abs(p.g2 - 8.5) < 0.05);
    CHECK(std::abs(p.g2_error - 1.4) < 0.05);
    CHECK(std::abs(p.significance - (38.0 - 4.46) / std::sqrt(38.0 + bg_err * bg_err)) < 1e-12);
  }

  TEST_CASE("accidental level") {
    CHECK(std::abs(accidental_counts_per_bin(60.9, 50.3, 144000.0, 10e-9) - 4.46) < 0.14);
  }

  TEST_CASE("independent Poisson streams are flat") {
    SourceModel s;
    s.mean_rate = 2000.0;
    const DetectorModel d{1.0, 0.0, 45e-9, 10e-9};
    std::size_t outliers = 0;
    std::size_t bins = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto a = generate_stream(s, d, 300.0, derive_seed(seed, 1, 0));
      const auto b = generate_stream(s, d, 300.0, derive_seed(seed, 2, 0));
      const auto h = normalize_g2(cross_correlate(a, b));
      for (std::size_t i = 0; i < h.size(); ++i) {
        bins++;
        if (std::abs(h.g2[i] - 1.0) > 3.0 * h.g2_errors[i]) outliers++;
      }
      CHECK(std::abs(h.background / accidental_counts_per_bin(a.rate(), b.rate(), 300.0, 10e-9) - 1.0) < 0.1);
    }
    CHECK(static_cast<double>(outliers) <= 0.01 * static_cast<double>(bins));
  }

  TEST_CASE("split coherent light shows no bunching, thermal light does") {
    SourceModel s;
    s.kind = SourceKind::thermal;
    s.mean_rate = 2000.0;
    s.coherence_time = 10e-9;
    const DetectorModel d{1.0, 0.0, 0.0, 10e-9};
    const auto [a, b] = split_stream(s, d, d, 1800.0, 12);
    const auto h = normalize_g2(cross_correlate(a, b));
    CHECK(std::abs(h.g2[h.zero_bin()] - 2.0) < 4.0 * h.g2_errors[h.zero_bin()]);

    s.kind = SourceKind::coherent;
    const auto [c, e] = split_stream(s, d, d, 1800.0, 12);
    const auto hc = normalize_g2(cross_correlate(c, e));
    CHECK(std::abs(hc.g2[hc.zero_bin()] - 1.0) < 4.0 * hc.g2_errors[hc.zero_bin()]);
  }
}
