#pragma once

// Reference states of a single mode (coherent, thermal, squeezed vacuum) and
// the photon-counting statistics derived from them.

#include <vector>

#include "upconv/fock.hpp"

namespace upconv {

// zeta = magnitude * exp(i phase); phase is wrapped to (-pi, pi].
class SqueezeParam {
 public:
  SqueezeParam(double magnitude, double phase = 0.0);
  // |zeta| chosen so that sinh^2|zeta| = nbar.
  static SqueezeParam from_mean_photons(double nbar, double phase = 0.0);

  double magnitude() const noexcept { return magnitude_; }
  double phase() const noexcept { return phase_; }
  double mean_photons() const;

 private:
  double magnitude_;
  double phase_;
};

struct CoherentAmplitude {
  cdouble alpha;
  double mean_photons() const { return std::norm(alpha); }
};

// A truncated pure state together with the probability weight that the
// truncation discards.
struct FockState {
  ComplexVector amplitudes;
  double truncation_tail = 0.0;
};

struct FockMixture {
  DensityMatrix rho;
  double truncation_tail = 0.0;
};

struct PhotonNumberDistribution {
  std::vector<double> probs;
  double tail_tol = 0.0;

  double mean() const;
  // <n (n-1) ... (n-k+1)>
  double factorial_moment(int k) const;
};

// Tail limits enforced by the constructors.
inline constexpr double coherent_tail_limit = 1e-12;
inline constexpr double thermal_tail_limit = 1e-12;
inline constexpr double squeezed_tail_limit = 1e-10;

FockState coherent_state(CoherentAmplitude alpha, FockDim dim);
FockMixture thermal_density(double nbar, FockDim dim);
// sum_n c_n |2n>, coefficients evaluated in log space.
FockState squeezed_vacuum(const SqueezeParam& zeta, FockDim dim);

PhotonNumberDistribution photon_number_distribution(const ComplexVector& psi);
PhotonNumberDistribution photon_number_distribution(const FockState& state);
PhotonNumberDistribution photon_number_distribution(const DensityMatrix& rho);
PhotonNumberDistribution photon_number_distribution(const FockMixture& state);

// Normalized k-th order coherence <a^+k a^k> / <a^+ a>^k.
double coherence_order(const PhotonNumberDistribution& pn, int k);
double coherence_order(const ComplexVector& psi, int k);
double coherence_order(const DensityMatrix& rho, int k);

}  // namespace upconv
