#pragma once

// Sequential down-conversion / up-conversion in a two-mode truncated Fock
// space: a squeezed vacuum in mode A (SPDC) is partially converted into mode B
// (SFG) by exp{kappa (a^2 b^+ - a^+2 b)}; mode A is then traced out.

#include <vector>

#include "upconv/fock.hpp"
#include "upconv/states.hpp"

namespace upconv {

inline constexpr int default_spdc_dim = 50;
inline constexpr int default_sfg_dim = 10;

struct CascadeConfig {
  double nbar_spdc = 0.1;
  double kappa = 0.0;
  int dimA = default_spdc_dim;
  int dimB = default_sfg_dim;
  double zeta_phase = 0.0;
};

struct CascadeReport {
  PhotonNumberDistribution pn_sfg;
  double g2_sfg = 0.0;
  double purity_sfg = 0.0;
  double fidelity_coherent = 0.0;
  double nbar_sfg = 0.0;
  double nbar_spdc_out = 0.0;
  // Statistics of the input squeezed vacuum and the low-gain prediction
  // g2_sfg ~ g4_spdc / g2_spdc^2.
  double g2_spdc = 0.0;
  double g4_spdc = 0.0;
  double g2_ratio_law = 0.0;
};

// kappa (a^2 kron b^+ - a^+2 kron b) as a dense matrix on the joint space.
ComplexMatrix sfg_generator(double kappa, FockDim dimA, FockDim dimB);

// The SFG unitary for one (kappa, dimA, dimB), stored as one small dense block
// per eigenspace of nA + 2 nB, which the generator preserves exactly.
class SfgPropagator {
 public:
  SfgPropagator(double kappa, FockDim dimA, FockDim dimB);

  ComplexVector apply(const ComplexVector& psi) const;
  TwoModeState apply(const TwoModeState& state) const;
  // Assemble the full unitary; mostly useful for cross-checks.
  ComplexMatrix dense() const;

  double kappa() const noexcept { return kappa_; }
  int dimA() const noexcept { return dimA_; }
  int dimB() const noexcept { return dimB_; }

 private:
  struct Sector {
    std::vector<Eigen::Index> members;  // joint-space indices
    ComplexMatrix unitary;
  };

  double kappa_;
  int dimA_;
  int dimB_;
  std::vector<Sector> sectors_;
};

TwoModeState apply_sfg(const TwoModeState& psi, double kappa);

// Squeezed vacuum (mean photon number nbar_spdc) in mode A, vacuum in mode B.
TwoModeState spdc_input_state(double nbar_spdc, FockDim dimA, FockDim dimB, double zeta_phase = 0.0);

// Mean photon number of the SFG mode after conversion.
double sfg_mean_photons(double nbar_spdc, double kappa, FockDim dimA, FockDim dimB,
                        double zeta_phase = 0.0);

inline constexpr double kappa_bracket_max = 0.05;
inline constexpr double kappa_rel_tol = 1e-6;
inline constexpr double kappa_target_rel_tol = 1e-4;

// Bisection on [0, kappa_bracket_max] for the kappa giving the target SFG
// occupation.
double calibrate_kappa(double nbar_spdc, double target_nbar_sfg, FockDim dimA = FockDim(default_spdc_dim),
                       FockDim dimB = FockDim(default_sfg_dim), double zeta_phase = 0.0);

CascadeReport run_cascade(const CascadeConfig& config);

}  // namespace upconv
