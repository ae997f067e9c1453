#include "upconv/photostream.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "upconv/error.hpp"
#include "upconv/rng.hpp"

namespace upconv {

namespace {

constexpr std::uint64_t source_stream = 0x73726365;  // "srce"
constexpr std::uint64_t split_stream_id = 0x73706c74;  // "splt"
constexpr std::uint64_t detector_stream = 0x64746374;  // "dtct"

std::int64_t draw_uniform(Rng& rng, std::int64_t lo, std::int64_t hi_exclusive) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi_exclusive - 1)(rng);
}

void guard_event_count(double expected) {
  if (!(expected <= max_expected_events)) {
    throw Error(ErrorCode::config,
                "rate * duration too large (" + std::to_string(expected) + " expected events)");
  }
}

double binomial_coefficient(int n, int k) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

void append_poisson_window(std::vector<std::int64_t>& out, Rng& rng, double rate, std::int64_t lo,
                           std::int64_t hi) {
  const double mean = rate * static_cast<double>(hi - lo) / ps_per_second;
  if (mean <= 0.0) return;
  const auto count = std::poisson_distribution<std::int64_t>(mean)(rng);
  const auto first = out.size();
  for (std::int64_t i = 0; i < count; ++i) out.push_back(draw_uniform(rng, lo, hi));
  std::sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end());
}

}  // namespace

std::int64_t to_picoseconds(double seconds) {
  const double ps = seconds * static_cast<double>(ps_per_second);
  if (!std::isfinite(ps) || std::abs(ps) >= 9.0e18) {
    throw Error(ErrorCode::config, "time value out of range for picosecond representation");
  }
  return std::llround(ps);
}

void DetectorModel::validate() const {
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) throw Error(ErrorCode::config, "efficiency must be in [0, 1]");
  if (!(dark_rate >= 0.0) || !std::isfinite(dark_rate)) throw Error(ErrorCode::config, "dark rate must be >= 0");
  if (!(dead_time >= 0.0) || !std::isfinite(dead_time)) throw Error(ErrorCode::config, "dead time must be >= 0");
  if (!(resolution > 0.0) || to_picoseconds(resolution) < 1) {
    throw Error(ErrorCode::config, "resolution must be at least 1 ps");
  }
}

void SourceModel::validate() const {
  if (!(mean_rate >= 0.0) || !std::isfinite(mean_rate)) throw Error(ErrorCode::config, "mean rate must be >= 0");
  if (kind != SourceKind::coherent) {
    if (!(coherence_time > 0.0) || to_picoseconds(coherence_time) < 1) {
      throw Error(ErrorCode::config, "coherence time must be at least 1 ps");
    }
  }
  if (kind == SourceKind::bunched) {
    if (pn.probs.empty()) throw Error(ErrorCode::config, "bunched source needs a photon-number law");
    double total = 0.0;
    for (double p : pn.probs) {
      if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::config, "photon-number probabilities must lie in [0, 1]");
      total += p;
    }
    if (std::abs(total - 1.0) > std::max(1e-9, pn.tail_tol)) {
      throw Error(ErrorCode::config, "photon-number law is not normalized (sum " + std::to_string(total) + ")");
    }
  }
}

PhotonNumberDistribution rescale_photon_law(const PhotonNumberDistribution& pn, double target_mean) {
  const double mean = pn.mean();
  if (!(mean > 0.0)) throw Error(ErrorCode::config, "photon-number law has zero mean");
  if (!(target_mean >= 0.0)) throw Error(ErrorCode::config, "target mean must be >= 0");
  const double eta = target_mean / mean;
  const int size = static_cast<int>(pn.probs.size());

  PhotonNumberDistribution out;
  out.tail_tol = pn.tail_tol;
  out.probs.assign(pn.probs.size(), 0.0);
  if (eta <= 1.0) {
    for (int n = 0; n < size; ++n) {
      for (int k = 0; k <= n; ++k) {
        out.probs[k] += pn.probs[n] * binomial_coefficient(n, k) * std::pow(eta, k) * std::pow(1.0 - eta, n - k);
      }
    }
    return out;
  }

  // Inverse thinning through binomial moments B_k = F_k / k!, which scale as eta^k.
  std::vector<double> scaled_moment(pn.probs.size(), 0.0);
  for (int k = 0; k < size; ++k) {
    double bk = 0.0;
    for (int n = k; n < size; ++n) bk += pn.probs[n] * binomial_coefficient(n, k);
    scaled_moment[k] = bk * std::pow(eta, k);
  }
  double total = 0.0;
  for (int n = 0; n < size; ++n) {
    double p = 0.0;
    for (int k = n; k < size; ++k) {
      const double sign = ((k - n) % 2 == 0) ? 1.0 : -1.0;
      p += sign * binomial_coefficient(k, n) * scaled_moment[k];
    }
    if (p < -1e-15) {
      throw Error(ErrorCode::config, "photon-number law cannot be rescaled to mean " + std::to_string(target_mean) +
                                         " (negative probability at n = " + std::to_string(n) + ")");
    }
    out.probs[n] = std::max(p, 0.0);
    total += out.probs[n];
  }
  if (std::abs(total - 1.0) > 1e-9 || out.probs[0] > 1.0) {
    throw Error(ErrorCode::config, "photon-number law cannot be rescaled to mean " + std::to_string(target_mean));
  }
  return out;
}

PhotonNumberDistribution slot_photon_law(const SourceModel& source) {
  source.validate();
  const double mu = source.mean_rate * source.coherence_time;
  switch (source.kind) {
    case SourceKind::coherent:
      throw Error(ErrorCode::config, "coherent source has no slot law");
    case SourceKind::thermal: {
      PhotonNumberDistribution pn;
      const double ratio = mu / (1.0 + mu);
      double p = 1.0 / (1.0 + mu);
      double tail = 1.0;
      while (tail > 1e-16 && pn.probs.size() < 100000) {
        pn.probs.push_back(p);
        tail -= p;
        p *= ratio;
      }
      pn.tail_tol = std::max(tail, 0.0);
      return pn;
    }
    case SourceKind::bunched:
      return rescale_photon_law(source.pn, mu);
  }
  return {};
}

std::vector<std::int64_t> generate_source_photons(const SourceModel& source, double duration, std::uint64_t seed,
                                                  double chunk_seconds) {
  source.validate();
  if (!(duration > 0.0)) throw Error(ErrorCode::config, "duration must be > 0");
  if (!(chunk_seconds > 0.0)) throw Error(ErrorCode::config, "chunk length must be > 0");
  guard_event_count(source.mean_rate * duration);

  const std::int64_t total_ps = to_picoseconds(duration);
  std::vector<std::int64_t> photons;
  photons.reserve(static_cast<std::size_t>(source.mean_rate * duration * 1.05 + 16));

  if (source.kind == SourceKind::coherent) {
    const std::int64_t chunk_ps = std::max<std::int64_t>(1, to_picoseconds(chunk_seconds));
    for (std::int64_t k = 0, lo = 0; lo < total_ps; ++k, lo += chunk_ps) {
      Rng rng(derive_seed(seed, source_stream, static_cast<std::uint64_t>(k)));
      append_poisson_window(photons, rng, source.mean_rate, lo, std::min(total_ps, lo + chunk_ps));
    }
    return photons;
  }

  const std::int64_t slot_ps = to_picoseconds(source.coherence_time);
  const std::int64_t slots = (total_ps + slot_ps - 1) / slot_ps;
  const std::int64_t slots_per_chunk =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(chunk_seconds * ps_per_second / slot_ps)));

  // Probability that a slot holds at least one photon, and a sampler for the
  // photon count given that it does.
  double occupied = 0.0;
  std::vector<double> occupied_law;
  const double mu = source.mean_rate * source.coherence_time;
  if (source.kind == SourceKind::thermal) {
    occupied = mu / (1.0 + mu);
  } else {
    const PhotonNumberDistribution law = slot_photon_law(source);
    occupied_law.assign(law.probs.begin() + 1, law.probs.end());
    for (double p : occupied_law) occupied += p;
  }
  if (!(occupied > 0.0)) return photons;
  occupied = std::min(occupied, 1.0);

  for (std::int64_t chunk = 0; chunk * slots_per_chunk < slots; ++chunk) {
    Rng rng(derive_seed(seed, source_stream, static_cast<std::uint64_t>(chunk)));
    const bool every_slot = occupied >= 1.0;
    std::geometric_distribution<std::int64_t> skip(every_slot ? 0.5 : occupied);
    std::geometric_distribution<std::int64_t> extra(1.0 / (1.0 + mu));
    auto empty_slots = [&] { return every_slot ? std::int64_t{0} : skip(rng); };
    std::discrete_distribution<int> count_law(occupied_law.begin(), occupied_law.end());

    const std::int64_t end = std::min(slots, (chunk + 1) * slots_per_chunk);
    std::int64_t slot = chunk * slots_per_chunk + empty_slots();
    while (slot < end) {
      const std::int64_t count = source.kind == SourceKind::thermal ? 1 + extra(rng) : 1 + count_law(rng);
      const std::int64_t start = slot * slot_ps;
      const auto first = photons.size();
      for (std::int64_t i = 0; i < count; ++i) {
        const std::int64_t t = start + draw_uniform(rng, 0, slot_ps);
        if (t < total_ps) photons.push_back(t);
      }
      std::sort(photons.begin() + static_cast<std::ptrdiff_t>(first), photons.end());
      slot += 1 + empty_slots();
    }
  }
  return photons;
}

std::vector<std::int64_t> apply_dead_time(std::span<const std::int64_t> sorted, std::int64_t dead_time_ps) {
  std::vector<std::int64_t> kept;
  kept.reserve(sorted.size());
  for (std::int64_t t : sorted) {
    if (kept.empty() || t - kept.back() >= dead_time_ps) kept.push_back(t);
  }
  return kept;
}

std::vector<std::int64_t> quantize(std::span<const std::int64_t> sorted, std::int64_t resolution_ps) {
  std::vector<std::int64_t> out;
  out.reserve(sorted.size());
  for (std::int64_t t : sorted) {
    const std::int64_t q = (t / resolution_ps) * resolution_ps;
    if (out.empty() || q > out.back()) out.push_back(q);
  }
  return out;
}

TimeTagStream detect_photons(std::span<const std::int64_t> photons, const DetectorModel& detector,
                             std::int64_t duration_ps, std::uint64_t seed, std::uint64_t channel) {
  detector.validate();
  guard_event_count(detector.dark_rate * static_cast<double>(duration_ps) / ps_per_second);
  Rng rng(derive_seed(seed, detector_stream, channel));

  std::vector<std::int64_t> detected;
  if (detector.efficiency >= 1.0) {
    detected.assign(photons.begin(), photons.end());
  } else {
    std::bernoulli_distribution keep(detector.efficiency);
    detected.reserve(static_cast<std::size_t>(photons.size() * detector.efficiency * 1.05 + 16));
    for (std::int64_t t : photons) {
      if (keep(rng)) detected.push_back(t);
    }
  }

  std::vector<std::int64_t> darks;
  append_poisson_window(darks, rng, detector.dark_rate, 0, duration_ps);
  std::vector<std::int64_t> merged(detected.size() + darks.size());
  std::merge(detected.begin(), detected.end(), darks.begin(), darks.end(), merged.begin());

  TimeTagStream stream;
  stream.duration_ps = duration_ps;
  stream.detector = detector;
  const auto alive = apply_dead_time(merged, to_picoseconds(detector.dead_time));
  stream.timestamps = quantize(alive, to_picoseconds(detector.resolution));
  return stream;
}

TimeTagStream generate_stream(const SourceModel& source, const DetectorModel& detector, double duration,
                              std::uint64_t seed) {
  detector.validate();
  const auto photons = generate_source_photons(source, duration, seed);
  return detect_photons(photons, detector, to_picoseconds(duration), seed, 0);
}

std::pair<TimeTagStream, TimeTagStream> split_stream(const SourceModel& source, const DetectorModel& detector1,
                                                     const DetectorModel& detector2, double duration,
                                                     std::uint64_t seed) {
  detector1.validate();
  detector2.validate();
  const auto photons = generate_source_photons(source, duration, seed);
  std::vector<std::int64_t> arm1;
  std::vector<std::int64_t> arm2;
  arm1.reserve(photons.size() / 2 + 16);
  arm2.reserve(photons.size() / 2 + 16);
  Rng rng(derive_seed(seed, split_stream_id, 0));
  std::bernoulli_distribution coin(0.5);
  for (std::int64_t t : photons) (coin(rng) ? arm1 : arm2).push_back(t);

  const std::int64_t duration_ps = to_picoseconds(duration);
  return {detect_photons(arm1, detector1, duration_ps, seed, 1),
          detect_photons(arm2, detector2, duration_ps, seed, 2)};
}

}  // namespace upconv
