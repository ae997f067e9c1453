#include <cmath>
#include <numbers>

#include "doctest.h"
#include "upconv/error.hpp"
#include "upconv/states.hpp"

using namespace upconv;

TEST_SUITE("states") {
  TEST_CASE("squeeze parameter") {
    const SqueezeParam z = SqueezeParam::from_mean_photons(0.1);
    CHECK(std::abs(std::sinh(z.magnitude()) * std::sinh(z.magnitude()) - 0.1) < 1e-14);
    CHECK(std::abs(z.mean_photons() - 0.1) < 1e-14);
    CHECK(std::abs(SqueezeParam(1.0, 3.0 * std::numbers::pi).phase() - std::numbers::pi) < 1e-12);
    CHECK(std::abs(SqueezeParam(1.0, -std::numbers::pi).phase() - std::numbers::pi) < 1e-12);
    CHECK_THROWS_AS(SqueezeParam(-1.0), Error);
    CHECK_THROWS_AS(SqueezeParam::from_mean_photons(-0.1), Error);
  }

  TEST_CASE("squeezed vacuum low-order coefficients") {
    const double r = 0.4;
    const double phase = 0.7;
    const FockState s = squeezed_vacuum(SqueezeParam(r, phase), FockDim(60));
    const double sech = 1.0 / std::cosh(r);
    const cdouble x = -std::polar(std::tanh(r) / 2.0, phase);
    // c0 = sqrt(sech r), c1 = sqrt(sech r) sqrt(2) x, c2 = sqrt(sech r) sqrt(24)/2 x^2
    CHECK(std::abs(s.amplitudes(0) - std::sqrt(sech)) < 1e-14);
    CHECK(std::abs(s.amplitudes(2) - std::sqrt(sech) * std::sqrt(2.0) * x) < 1e-14);
    CHECK(std::abs(s.amplitudes(4) - std::sqrt(sech) * std::sqrt(24.0) / 2.0 * x * x) < 1e-14);
    for (int n = 1; n < 60; n += 2) CHECK(std::abs(s.amplitudes(n)) == 0.0);
    CHECK(std::abs(s.amplitudes.squaredNorm() - 1.0) < 1e-10);
  }

  TEST_CASE("squeezed vacuum statistics match closed forms") {
    for (double nbar : {0.01, 0.1, 0.5, 1.0}) {
      const FockState s = squeezed_vacuum(SqueezeParam::from_mean_photons(nbar), FockDim(120));
      const auto pn = photon_number_distribution(s);
      CHECK(std::abs(pn.mean() - nbar) < 1e-9 * std::max(1.0, nbar));
      CHECK(std::abs(coherence_order(pn, 2) - (3.0 + 1.0 / nbar)) < 1e-7 * (3.0 + 1.0 / nbar));
    }
  }

  TEST_CASE("squeezed truncation too small raises precision error") {
    try {
      squeezed_vacuum(SqueezeParam::from_mean_photons(2.0), FockDim(10));
      FAIL("expected precision error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::precision);
    }
  }

  TEST_CASE("thermal factorial moments are k! nbar^k") {
    const double nbar = 0.3;
    const FockMixture t = thermal_density(nbar, FockDim(60));
    const auto pn = photon_number_distribution(t);
    double fact = 1.0;
    for (int k = 1; k <= 4; ++k) {
      fact *= k;
      CHECK(std::abs(pn.factorial_moment(k) - fact * std::pow(nbar, k)) < 1e-12);
      CHECK(std::abs(coherence_order(pn, k) - fact) < 1e-9);
    }
    CHECK(std::abs(coherence_order(t.rho, 2) - 2.0) < 1e-9);
  }

  TEST_CASE("coherent state is Poissonian") {
    const cdouble alpha(0.5, 0.5);
    const FockState c = coherent_state(CoherentAmplitude{alpha}, FockDim(40));
    const auto pn = photon_number_distribution(c);
    CHECK(std::abs(pn.mean() - 0.5) < 1e-13);
    for (int k = 1; k <= 5; ++k) CHECK(std::abs(coherence_order(pn, k) - 1.0) < 1e-11);
    CHECK(std::abs(pn.probs[3] - std::exp(-0.5) * std::pow(0.5, 3) / 6.0) < 1e-15);
    CHECK_THROWS_AS(coherent_state(CoherentAmplitude{cdouble(3.0, 0.0)}, FockDim(10)), Error);
  }

  TEST_CASE("coherence of vacuum is undefined") {
    ComplexVector vac = ComplexVector::Zero(5);
    vac(0) = 1.0;
    try {
      coherence_order(vac, 2);
      FAIL("expected undefined statistic");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::undefined_statistic);
    }
  }

  TEST_CASE("pure and density photon distributions agree") {
    const FockState s = squeezed_vacuum(SqueezeParam::from_mean_photons(0.2, 1.1), FockDim(50));
    const auto a = photon_number_distribution(s.amplitudes);
    const auto b = photon_number_distribution(DensityMatrix::from_pure(s.amplitudes));
    REQUIRE(a.probs.size() == b.probs.size());
    for (std::size_t n = 0; n < a.probs.size(); ++n) CHECK(std::abs(a.probs[n] - b.probs[n]) < 1e-15);
  }
}
