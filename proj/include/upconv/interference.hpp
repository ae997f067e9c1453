#pragma once

// Spectral model of the pump / up-converted-light interferometer: the
// biphoton picks up a spectral phase between down- and up-conversion, the
// up-converted amplitude g interferes with the pump, and the detector sees
// fringes in the applied phase.

#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

namespace upconv {

inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double default_center_wavelength = 1064e-9;  // degenerate SPDC, m
inline constexpr double default_biphoton_coherence_time = 50e-15;  // s
inline constexpr int default_jsa_nodes = 2048;
inline constexpr double jsa_half_width_sigmas = 6.0;
inline constexpr double min_samples_per_period = 8.0;

inline constexpr double angular_frequency(double wavelength) {
  return 2.0 * std::numbers::pi * speed_of_light / wavelength;
}

// Polynomial phase law around omega0 plus a path-length term omega*z/c.
struct SpectralPhase {
  double phi0 = 0.0;   // rad
  double alpha = 0.0;  // s
  double beta = 0.0;   // s^2
  double gamma = 0.0;  // s^3
  double z = 0.0;      // m
};

// Phase of a single photon at omega0 + detuning.
double spectral_phase(const SpectralPhase& phase, double omega0, double detuning);

// phi(omega0 + W) + phi(omega0 - W). Odd orders (alpha, gamma and the
// detuning-linear part of omega z / c) cancel identically and are never
// evaluated: 2 (phi0 + omega0 z / c) + beta W^2.
double phase_sum(const SpectralPhase& phase, double omega0, double detuning);

// Effective joint spectral amplitude on a Gauss-Legendre grid, scaled so that
// sum(weights * amplitudes) = 1.
class EffectiveJSA {
 public:
  // Gamma(W) ~ exp(-W^2 / sigma^2) on [-6 sigma, 6 sigma].
  static EffectiveJSA gaussian(double omega0, double sigma, int nodes = default_jsa_nodes);
  static EffectiveJSA from_function(double omega0, double sigma, const std::function<std::complex<double>(double)>& gamma,
                                    int nodes = default_jsa_nodes);

  // sigma whose Gaussian amplitude has a temporal 1/e half width tau.
  static double sigma_for_coherence_time(double tau) { return 2.0 / tau; }

  double omega0() const noexcept { return omega0_; }
  double sigma() const noexcept { return sigma_; }
  const std::vector<double>& detunings() const noexcept { return detunings_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<std::complex<double>>& amplitudes() const noexcept { return amplitudes_; }
  // Largest gap between neighbouring detuning nodes.
  double max_spacing() const noexcept { return max_spacing_; }

 private:
  EffectiveJSA() = default;

  double omega0_ = 0.0;
  double sigma_ = 0.0;
  std::vector<double> detunings_;
  std::vector<double> weights_;
  std::vector<std::complex<double>> amplitudes_;
  double max_spacing_ = 0.0;
};

// Up-converted amplitude g = integral dW Gamma(W) exp(i phase_sum(W)).
// Throws resolution error if the phase oscillates faster than
// min_samples_per_period nodes per period at the grid edge.
std::complex<double> g_amplitude(const EffectiveJSA& jsa, const SpectralPhase& phase);

// |1 + g|^2 / 4.
double fringe_probability(std::complex<double> g);

// Signal rates of the two arms with the dark rate already removed, plus the
// detector dark rate, all in Hz.
struct FringeRates {
  double arm_a = 0.0;
  double arm_b = 0.0;
  double dark = 0.0;
};

// Fit of counts = offset + c cos(phi / f) + s sin(phi / f). The frequency f
// follows the experiment's convention: 0.5 is a fringe with period pi in the
// applied phase (two-photon sensitivity), 1.0 is the pump-like fringe.
struct FringeFit {
  double frequency = 0.0;
  double offset = 0.0;
  double cos_amplitude = 0.0;
  double sin_amplitude = 0.0;
  double chi2 = 0.0;

  double amplitude() const;
  double evaluate(double phi) const;
};

inline constexpr double two_photon_fringe_frequency = 0.5;

// Weighted linear least squares at a fixed frequency; weights are
// 1 / max(counts, 1).
FringeFit fit_fringe_fixed(const std::vector<double>& phi, const std::vector<double>& counts, double frequency);

struct FrequencyEstimate {
  double frequency = 0.0;
  double error = 0.0;  // from the curvature of chi2 at the minimum
};

// Minimizes the fixed-frequency chi2 over f in [lo, hi].
FrequencyEstimate fit_fringe_frequency(const std::vector<double>& phi, const std::vector<double>& counts,
                                       double lo = 0.3, double hi = 1.2);

struct FringeScan {
  std::vector<double> phase_values;  // rad
  std::vector<double> counts;        // per dwell
  std::vector<double> rates;         // Hz
  std::vector<double> errors;        // Hz, Poissonian
  std::vector<double> fit;           // fitted rate, Hz
  double dwell = 0.0;                // s
  double fit_frequency = two_photon_fringe_frequency;
  FrequencyEstimate free_frequency;  // from the frequency sweep
  double visibility = 0.0;           // dark counts subtracted
  double visibility_raw = 0.0;
};

// Expected counts per phase point: dwell * (|sqrt(Ib) + sqrt(Ia) g(phi)|^2 + dark),
// with g evaluated at phase_template.phi0 + phi.
std::vector<double> expected_fringe_counts(const EffectiveJSA& jsa, const SpectralPhase& phase_template,
                                           const std::vector<double>& phi_values, const FringeRates& rates,
                                           double dwell);

// Fixed-frequency fit, visibility and free-frequency sweep of given counts.
FringeScan analyze_fringe_scan(const std::vector<double>& phi_values, const std::vector<double>& counts,
                               double dwell, double dark_rate);

// Poisson-sampled scan. Point i draws from a generator seeded by (seed, i).
FringeScan simulate_fringe_scan(const EffectiveJSA& jsa, const SpectralPhase& phase_template,
                                const std::vector<double>& phi_values, const FringeRates& rates, double dwell,
                                std::uint64_t seed);

// 2 sqrt(Ia Ib) / (Ia + Ib) with I = raw - dark.
double visibility_from_rates(double raw_a, double raw_b, double dark);

// Measured visibility relative to the intensity-limited maximum.
double indistinguishability(double visibility, double raw_a, double raw_b, double dark);

}  // namespace upconv
