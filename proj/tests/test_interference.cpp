#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "upconv/error.hpp"
#include "upconv/interference.hpp"
#include "upconv/quadrature.hpp"

using namespace upconv;

namespace {

const double omega0 = angular_frequency(default_center_wavelength);

EffectiveJSA reference_jsa() {
  return EffectiveJSA::gaussian(omega0, EffectiveJSA::sigma_for_coherence_time(default_biphoton_coherence_time));
}

std::vector<double> scan_phases() {
  std::vector<double> phi;
  for (int i = 0; i < 28; ++i) phi.push_back(i * std::numbers::pi / 9.0);
  return phi;
}

}  // namespace

TEST_SUITE("interference") {
  TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
    const QuadratureRule r = gauss_legendre(10, -1.0, 2.0);
    for (int k = 0; k < 20; ++k) {
      double sum = 0.0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) sum += r.weights[i] * std::pow(r.nodes[i], k);
      const double exact = (std::pow(2.0, k + 1) - std::pow(-1.0, k + 1)) / (k + 1);
      CHECK(std::abs(sum - exact) < 1e-12 * std::max(1.0, std::abs(exact)));
    }
    for (std::size_t i = 1; i < r.nodes.size(); ++i) CHECK(r.nodes[i] > r.nodes[i - 1]);
  }

  TEST_CASE("Gauss-Legendre nodes are symmetric on symmetric intervals") {
    const QuadratureRule r = gauss_legendre(2048, -3.0, 3.0);
    for (std::size_t i = 0; i < r.nodes.size(); ++i) CHECK(r.nodes[i] == -r.nodes[r.nodes.size() - 1 - i]);
  }

  TEST_CASE("single-photon phase expansion") {
    SpectralPhase p;
    p.phi0 = 0.3;
    p.alpha = 2e-15;
    p.beta = 1e-29;
    p.gamma = 3e-44;
    const double w = 1e13;
    const double expected = 0.3 + 2e-15 * w + 0.5 * 1e-29 * w * w + 3e-44 * w * w * w / 6.0;
    CHECK(std::abs(spectral_phase(p, omega0, w) - expected) < 1e-12);
    CHECK(std::abs(spectral_phase(p, omega0, w) + spectral_phase(p, omega0, -w) - phase_sum(p, omega0, w)) < 1e-12);
  }

  TEST_CASE("half an SFG wavelength of path shifts the fringe by pi") {
    SpectralPhase p;
    p.z = 266e-9;
    CHECK(std::abs(phase_sum(p, omega0, 0.0) - std::numbers::pi) < 1e-12);
  }

  TEST_CASE("unchirped amplitude is one") {
    const auto g = g_amplitude(reference_jsa(), SpectralPhase{});
    CHECK(std::abs(g - 1.0) < 1e-12);
    CHECK(std::abs(fringe_probability(g) - 1.0) < 1e-12);
  }

  TEST_CASE("Gaussian closed form for quadratic phase") {
    const auto jsa = reference_jsa();
    const double s2 = jsa.sigma() * jsa.sigma();
    for (double x : {0.1, 0.5, 1.0, 2.0, 4.0}) {
      SpectralPhase p;
      p.beta = x / s2;
      const double expected = std::pow(1.0 + x * x, -0.25);
      CHECK(std::abs(std::abs(g_amplitude(jsa, p)) - expected) < 1e-9);
    }
  }

  TEST_CASE("odd orders do not change the amplitude") {
    const auto jsa = reference_jsa();
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    SpectralPhase base;
    base.beta = 0.7 / (jsa.sigma() * jsa.sigma());
    const auto g0 = g_amplitude(jsa, base);
    for (int i = 0; i < 20; ++i) {
      SpectralPhase p = base;
      p.alpha = u(rng) * 1e-12;
      p.gamma = u(rng) * 1e-40;
      CHECK(std::abs(g_amplitude(jsa, p) - g0) <= 1e-10);
    }
  }

  TEST_CASE("fringes have period pi in the applied phase") {
    const auto jsa = reference_jsa();
    for (double phi : {0.1, 0.9, 2.2}) {
      SpectralPhase a;
      a.phi0 = phi;
      SpectralPhase b;
      b.phi0 = phi + std::numbers::pi;
      SpectralPhase c;
      c.phi0 = phi + std::numbers::pi / 2.0;
      const double pa = fringe_probability(g_amplitude(jsa, a));
      CHECK(std::abs(pa - fringe_probability(g_amplitude(jsa, b))) < 1e-12);
      CHECK(std::abs(pa + fringe_probability(g_amplitude(jsa, c)) - 1.0) < 1e-12);
    }
  }

  TEST_CASE("under-resolved quadratic phase raises a resolution error") {
    const auto jsa = EffectiveJSA::gaussian(omega0, 1e14, 64);
    SpectralPhase p;
    p.beta = 1e-25;
    try {
      g_amplitude(jsa, p);
      FAIL("expected resolution error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::resolution);
    }
  }

  TEST_CASE("custom JSA is normalized") {
    const auto jsa = EffectiveJSA::from_function(
        omega0, 1e13, [](double w) { return std::complex<double>(1.0 / (1.0 + (w / 1e13) * (w / 1e13)), 0.0); }, 512);
    std::complex<double> total = 0.0;
    for (std::size_t i = 0; i < jsa.weights().size(); ++i) total += jsa.weights()[i] * jsa.amplitudes()[i];
    CHECK(std::abs(total - 1.0) < 1e-13);
    CHECK_THROWS_AS(EffectiveJSA::gaussian(omega0, -1.0), Error);
  }

  TEST_CASE("fixed-frequency fit recovers exact sinusoids") {
    std::vector<double> phi = scan_phases();
    std::vector<double> counts;
    for (double x : phi) counts.push_back(70.0 + 20.0 * std::cos(2.0 * x) - 11.0 * std::sin(2.0 * x));
    const FringeFit fit = fit_fringe_fixed(phi, counts, 0.5);
    CHECK(std::abs(fit.offset - 70.0) < 1e-9);
    CHECK(std::abs(fit.cos_amplitude - 20.0) < 1e-9);
    CHECK(std::abs(fit.sin_amplitude + 11.0) < 1e-9);
    CHECK(fit.chi2 < 1e-18);
    const FrequencyEstimate f = fit_fringe_frequency(phi, counts);
    CHECK(std::abs(f.frequency - 0.5) < 1e-6);
  }

  TEST_CASE("pump-like fringes are found at frequency one") {
    std::vector<double> phi = scan_phases();
    std::vector<double> counts;
    for (double x : phi) counts.push_back(100.0 + 30.0 * std::cos(x + 0.4));
    CHECK(std::abs(fit_fringe_frequency(phi, counts).frequency - 1.0) < 1e-6);
  }

  TEST_CASE("noiseless scan at the reference rates") {
    const auto jsa = reference_jsa();
    const FringeRates rates{344.4 - 202.9, 568.8 - 202.9, 202.9};
    const auto expected = expected_fringe_counts(jsa, SpectralPhase{}, scan_phases(), rates, 0.1);
    const FringeScan scan = analyze_fringe_scan(scan_phases(), expected, 0.1, 202.9);
    CHECK(std::abs(scan.free_frequency.frequency - 0.5) < 5e-4);
    // Perfect overlap: the dark-subtracted visibility is the intensity limit.
    CHECK(std::abs(scan.visibility - visibility_from_rates(344.4, 568.8, 202.9)) < 1e-9);
    CHECK(scan.visibility_raw < scan.visibility);
  }

  TEST_CASE("simulated scans are reproducible") {
    const auto jsa = reference_jsa();
    const FringeRates rates{141.5, 365.9, 202.9};
    const auto a = simulate_fringe_scan(jsa, SpectralPhase{}, scan_phases(), rates, 0.1, 42);
    const auto b = simulate_fringe_scan(jsa, SpectralPhase{}, scan_phases(), rates, 0.1, 42);
    const auto c = simulate_fringe_scan(jsa, SpectralPhase{}, scan_phases(), rates, 0.1, 43);
    CHECK(a.counts == b.counts);
    CHECK(a.counts != c.counts);
  }

  TEST_CASE("visibility arithmetic") {
    CHECK(std::abs(visibility_from_rates(344.4, 568.8, 202.9) - 0.897) < 1e-3);
    CHECK(std::abs(indistinguishability(0.738, 344.4, 568.8, 202.9) - 0.823) < 2e-3);
    CHECK(visibility_from_rates(300.0, 300.0, 100.0) == doctest::Approx(1.0));
    try {
      visibility_from_rates(100.0, 568.8, 202.9);
      FAIL("expected invalid rate");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::invalid_rate);
    }
  }
}
