#pragma once

// Monte Carlo time-tag streams: photon sources (coherent, thermal, or a
// slotted source with an arbitrary per-slot photon-number law) observed by
// detectors with finite efficiency, dark counts, non-paralyzable dead time and
// timestamp quantization. Times are integer picoseconds throughout.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "upconv/states.hpp"

namespace upconv {

inline constexpr std::int64_t ps_per_second = 1'000'000'000'000;

// Seconds to integer picoseconds; throws config error on overflow.
std::int64_t to_picoseconds(double seconds);

struct DetectorModel {
  double efficiency = 1.0;
  double dark_rate = 0.0;      // Hz
  double dead_time = 45e-9;    // s
  double resolution = 10e-9;   // s

  void validate() const;
};

enum class SourceKind { coherent, thermal, bunched };

struct SourceModel {
  SourceKind kind = SourceKind::coherent;
  double mean_rate = 0.0;          // photons/s reaching the detectors, before efficiency
  double coherence_time = 1e-6;    // slot length for thermal and bunched light
  PhotonNumberDistribution pn;     // bunched only: per-slot law before rescaling

  void validate() const;
};

struct TimeTagStream {
  std::vector<std::int64_t> timestamps;  // ps, strictly increasing
  std::int64_t duration_ps = 0;
  DetectorModel detector;

  double duration_seconds() const { return static_cast<double>(duration_ps) / ps_per_second; }
  double rate() const { return static_cast<double>(timestamps.size()) / duration_seconds(); }
};

// Length of the disjoint windows that are generated from independent sub-seeds.
inline constexpr double default_chunk_seconds = 1.0;
// Guard against runaway memory use: expected source photons per run.
inline constexpr double max_expected_events = 1e9;

// Photon-number law with every normalized factorial moment g^(k) of `pn`
// preserved and mean `target_mean`. For target below the law's mean this is
// binomial thinning; above it the thinning is inverted, which fails with a
// config error if the result is not a probability distribution.
PhotonNumberDistribution rescale_photon_law(const PhotonNumberDistribution& pn, double target_mean);

// Per-slot photon-number law the source actually draws from.
PhotonNumberDistribution slot_photon_law(const SourceModel& source);

// Source photon arrival times in [0, duration), sorted.
std::vector<std::int64_t> generate_source_photons(const SourceModel& source, double duration, std::uint64_t seed,
                                                  double chunk_seconds = default_chunk_seconds);

// Efficiency thinning, dark counts, dead-time filter and quantization applied to
// sorted photon times. `channel` selects an independent random stream.
TimeTagStream detect_photons(std::span<const std::int64_t> photons, const DetectorModel& detector,
                             std::int64_t duration_ps, std::uint64_t seed, std::uint64_t channel = 0);

// Non-paralyzable dead-time filter on sorted times.
std::vector<std::int64_t> apply_dead_time(std::span<const std::int64_t> sorted, std::int64_t dead_time_ps);

// Floor to the resolution grid, collapsing duplicates.
std::vector<std::int64_t> quantize(std::span<const std::int64_t> sorted, std::int64_t resolution_ps);

TimeTagStream generate_stream(const SourceModel& source, const DetectorModel& detector, double duration,
                              std::uint64_t seed);

// 50/50 beam splitter in front of two detectors.
std::pair<TimeTagStream, TimeTagStream> split_stream(const SourceModel& source, const DetectorModel& detector1,
                                                     const DetectorModel& detector2, double duration,
                                                     std::uint64_t seed);

}  // namespace upconv
