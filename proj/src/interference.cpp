#include "upconv/interference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "upconv/error.hpp"
#include "upconv/quadrature.hpp"
#include "upconv/rng.hpp"

namespace upconv {

namespace {

constexpr std::uint64_t fringe_stream = 0x66726e67;  // "frng"

double fringe_chi2(const std::vector<double>& phi, const std::vector<double>& counts, double frequency) {
  return fit_fringe_fixed(phi, counts, frequency).chi2;
}

}  // namespace

double spectral_phase(const SpectralPhase& p, double omega0, double w) {
  return p.phi0 + p.alpha * w + 0.5 * p.beta * w * w + p.gamma * w * w * w / 6.0 +
         (omega0 + w) * p.z / speed_of_light;
}

double phase_sum(const SpectralPhase& p, double omega0, double w) {
  return 2.0 * (p.phi0 + omega0 * p.z / speed_of_light) + p.beta * w * w;
}

EffectiveJSA EffectiveJSA::gaussian(double omega0, double sigma, int nodes) {
  return from_function(
      omega0, sigma, [sigma](double w) { return std::complex<double>(std::exp(-(w * w) / (sigma * sigma)), 0.0); },
      nodes);
}

EffectiveJSA EffectiveJSA::from_function(double omega0, double sigma,
                                         const std::function<std::complex<double>(double)>& gamma, int nodes) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::config, "JSA width sigma must be > 0");
  if (!std::isfinite(omega0)) throw Error(ErrorCode::config, "JSA center frequency must be finite");
  if (nodes < 2) throw Error(ErrorCode::config, "JSA grid needs at least two nodes");

  const double edge = jsa_half_width_sigmas * sigma;
  QuadratureRule rule = gauss_legendre(nodes, -edge, edge);

  EffectiveJSA jsa;
  jsa.omega0_ = omega0;
  jsa.sigma_ = sigma;
  jsa.amplitudes_.reserve(rule.nodes.size());
  std::complex<double> total = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const std::complex<double> value = gamma(rule.nodes[i]);
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
      throw Error(ErrorCode::config, "JSA amplitude is not finite");
    }
    jsa.amplitudes_.push_back(value);
    total += rule.weights[i] * value;
  }
  if (std::abs(total) == 0.0) throw Error(ErrorCode::config, "JSA amplitude integrates to zero");
  for (auto& value : jsa.amplitudes_) value /= total;

  for (std::size_t i = 1; i < rule.nodes.size(); ++i) {
    jsa.max_spacing_ = std::max(jsa.max_spacing_, rule.nodes[i] - rule.nodes[i - 1]);
  }
  jsa.detunings_ = std::move(rule.nodes);
  jsa.weights_ = std::move(rule.weights);
  return jsa;
}

std::complex<double> g_amplitude(const EffectiveJSA& jsa, const SpectralPhase& phase) {
  const double edge = std::max(std::abs(jsa.detunings().front()), std::abs(jsa.detunings().back()));
  const double slope = 2.0 * std::abs(phase.beta) * edge;
  if (slope * min_samples_per_period * jsa.max_spacing() > 2.0 * std::numbers::pi) {
    throw Error(ErrorCode::resolution, "JSA grid does not resolve the quadratic phase (beta = " +
                                           std::to_string(phase.beta) + " s^2)");
  }
  std::complex<double> g = 0.0;
  const auto& w = jsa.detunings();
  for (std::size_t i = 0; i < w.size(); ++i) {
    g += jsa.weights()[i] * jsa.amplitudes()[i] * std::polar(1.0, phase_sum(phase, jsa.omega0(), w[i]));
  }
  return g;
}

double fringe_probability(std::complex<double> g) { return std::norm(1.0 + g) / 4.0; }

double FringeFit::amplitude() const { return std::hypot(cos_amplitude, sin_amplitude); }

double FringeFit::evaluate(double phi) const {
  return offset + cos_amplitude * std::cos(phi / frequency) + sin_amplitude * std::sin(phi / frequency);
}

FringeFit fit_fringe_fixed(const std::vector<double>& phi, const std::vector<double>& counts, double frequency) {
  if (phi.size() != counts.size()) throw Error(ErrorCode::shape, "phase and count vectors differ in length");
  if (phi.size() < 3) throw Error(ErrorCode::config, "fringe fit needs at least three points");
  if (!(frequency > 0.0)) throw Error(ErrorCode::config, "fringe frequency must be > 0");

  const auto n = static_cast<Eigen::Index>(phi.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  Eigen::VectorXd sqrt_w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sqrt_w(i) = 1.0 / std::sqrt(std::max(counts[i], 1.0));
    design(i, 0) = sqrt_w(i);
    design(i, 1) = sqrt_w(i) * std::cos(phi[i] / frequency);
    design(i, 2) = sqrt_w(i) * std::sin(phi[i] / frequency);
    rhs(i) = sqrt_w(i) * counts[i];
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rhs);
  FringeFit fit;
  fit.frequency = frequency;
  fit.offset = coef(0);
  fit.cos_amplitude = coef(1);
  fit.sin_amplitude = coef(2);
  fit.chi2 = (design * coef - rhs).squaredNorm();
  return fit;
}

FrequencyEstimate fit_fringe_frequency(const std::vector<double>& phi, const std::vector<double>& counts, double lo,
                                       double hi) {
  if (!(lo > 0.0) || !(hi > lo)) throw Error(ErrorCode::config, "invalid frequency sweep range");
  constexpr int grid = 900;
  const double step = (hi - lo) / grid;
  double best = lo;
  double best_chi2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= grid; ++i) {
    const double f = lo + step * i;
    const double chi2 = fringe_chi2(phi, counts, f);
    if (chi2 < best_chi2) {
      best_chi2 = chi2;
      best = f;
    }
  }

  // Golden-section refinement inside the neighbouring grid cells.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::max(lo, best - step);
  double b = std::min(hi, best + step);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = fringe_chi2(phi, counts, c);
  double fd = fringe_chi2(phi, counts, d);
  while (b - a > 1e-12) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fringe_chi2(phi, counts, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fringe_chi2(phi, counts, d);
    }
  }
  FrequencyEstimate est;
  est.frequency = 0.5 * (a + b);

  const double h = 1e-4 * est.frequency;
  const double curvature = (fringe_chi2(phi, counts, est.frequency + h) - 2.0 * fringe_chi2(phi, counts, est.frequency) +
                            fringe_chi2(phi, counts, est.frequency - h)) /
                           (h * h);
  est.error = curvature > 0.0 ? std::sqrt(2.0 / curvature) : std::numeric_limits<double>::infinity();
  return est;
}

std::vector<double> expected_fringe_counts(const EffectiveJSA& jsa, const SpectralPhase& phase_template,
                                           const std::vector<double>& phi_values, const FringeRates& rates,
                                           double dwell) {
  if (!(dwell > 0.0) || !std::isfinite(dwell)) throw Error(ErrorCode::config, "dwell time must be > 0");
  if (!(rates.arm_a >= 0.0) || !(rates.arm_b >= 0.0) || !(rates.dark >= 0.0)) {
    throw Error(ErrorCode::config, "fringe rates must be >= 0");
  }
  const double amp_a = std::sqrt(rates.arm_a);
  const double amp_b = std::sqrt(rates.arm_b);
  std::vector<double> expected;
  expected.reserve(phi_values.size());
  for (double phi : phi_values) {
    SpectralPhase phase = phase_template;
    phase.phi0 += phi;
    const std::complex<double> g = g_amplitude(jsa, phase);
    expected.push_back(dwell * (std::norm(amp_b + amp_a * g) + rates.dark));
  }
  return expected;
}

FringeScan analyze_fringe_scan(const std::vector<double>& phi_values, const std::vector<double>& counts, double dwell,
                               double dark_rate) {
  if (!(dwell > 0.0)) throw Error(ErrorCode::config, "dwell time must be > 0");
  FringeScan scan;
  scan.phase_values = phi_values;
  scan.counts = counts;
  scan.dwell = dwell;
  scan.fit_frequency = two_photon_fringe_frequency;

  const FringeFit fit = fit_fringe_fixed(phi_values, counts, scan.fit_frequency);
  scan.rates.reserve(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    scan.rates.push_back(counts[i] / dwell);
    scan.errors.push_back(std::sqrt(counts[i]) / dwell);
    scan.fit.push_back(fit.evaluate(phi_values[i]) / dwell);
  }
  const double amplitude = fit.amplitude();
  const double signal_offset = fit.offset - dark_rate * dwell;
  scan.visibility_raw = fit.offset > 0.0 ? std::clamp(amplitude / fit.offset, 0.0, 1.0) : 0.0;
  scan.visibility = signal_offset > 0.0 ? std::clamp(amplitude / signal_offset, 0.0, 1.0) : 0.0;
  scan.free_frequency = fit_fringe_frequency(phi_values, counts);
  return scan;
}

FringeScan simulate_fringe_scan(const EffectiveJSA& jsa, const SpectralPhase& phase_template,
                                const std::vector<double>& phi_values, const FringeRates& rates, double dwell,
                                std::uint64_t seed) {
  const std::vector<double> expected = expected_fringe_counts(jsa, phase_template, phi_values, rates, dwell);
  std::vector<double> counts(expected.size(), 0.0);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (expected[i] <= 0.0) continue;
    Rng rng(derive_seed(seed, fringe_stream, i));
    std::poisson_distribution<long long> draw(expected[i]);
    counts[i] = static_cast<double>(draw(rng));
  }
  return analyze_fringe_scan(phi_values, counts, dwell, rates.dark);
}

double visibility_from_rates(double raw_a, double raw_b, double dark) {
  if (!(dark >= 0.0) || !(raw_a >= dark) || !(raw_b >= dark)) {
    throw Error(ErrorCode::invalid_rate, "raw rates must be >= dark rate >= 0");
  }
  const double ia = raw_a - dark;
  const double ib = raw_b - dark;
  if (ia + ib == 0.0) throw Error(ErrorCode::invalid_rate, "no signal above the dark rate");
  return 2.0 * std::sqrt(ia * ib) / (ia + ib);
}

double indistinguishability(double visibility, double raw_a, double raw_b, double dark) {
  return visibility / visibility_from_rates(raw_a, raw_b, dark);
}

}  // namespace upconv
