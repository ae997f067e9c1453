#include "upconv/cascade.hpp"

#include <cmath>
#include <string>

#include "upconv/error.hpp"

namespace upconv {

namespace {

void check_kappa(double kappa) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw Error(ErrorCode::config, "kappa must be finite and >= 0");
  }
}

}  // namespace

ComplexMatrix sfg_generator(double kappa, FockDim dimA, FockDim dimB) {
  const ComplexMatrix a = annihilation_matrix(dimA);
  const ComplexMatrix b = annihilation_matrix(dimB);
  const ComplexMatrix a2 = a * a;
  const ComplexMatrix a2_dag = a2.adjoint();
  return kappa * (tensor_product(a2, b.adjoint()) - tensor_product(a2_dag, b));
}

SfgPropagator::SfgPropagator(double kappa, FockDim dimA, FockDim dimB)
    : kappa_(kappa), dimA_(dimA), dimB_(dimB) {
  check_kappa(kappa);
  const int max_charge = (dimA_ - 1) + 2 * (dimB_ - 1);
  sectors_.reserve(static_cast<std::size_t>(max_charge) + 1);
  for (int charge = 0; charge <= max_charge; ++charge) {
    Sector sector;
    std::vector<int> photons_b;
    for (int nb = 0; nb < dimB_; ++nb) {
      const int na = charge - 2 * nb;
      if (na < 0) break;
      if (na >= dimA_) continue;
      sector.members.push_back(static_cast<Eigen::Index>(na) * dimB_ + nb);
      photons_b.push_back(nb);
    }
    const auto size = static_cast<Eigen::Index>(sector.members.size());
    if (size == 0) continue;

    // Members are ordered by nB, so a^2 b^+ only couples neighbours k -> k+1.
    ComplexMatrix gen = ComplexMatrix::Zero(size, size);
    for (Eigen::Index k = 0; k + 1 < size; ++k) {
      const double na = charge - 2.0 * photons_b[k];
      const double nb = photons_b[k];
      const double amp = kappa_ * std::sqrt(na * (na - 1.0) * (nb + 1.0));
      gen(k + 1, k) = amp;
      gen(k, k + 1) = -amp;
    }
    sector.unitary = matrix_exponential(gen);
    sectors_.push_back(std::move(sector));
  }
}

ComplexVector SfgPropagator::apply(const ComplexVector& psi) const {
  if (psi.size() != static_cast<Eigen::Index>(dimA_) * dimB_) {
    throw Error(ErrorCode::shape, "state length does not match SFG propagator dimensions");
  }
  ComplexVector out = ComplexVector::Zero(psi.size());
  for (const auto& sector : sectors_) {
    const auto size = static_cast<Eigen::Index>(sector.members.size());
    ComplexVector local(size);
    for (Eigen::Index k = 0; k < size; ++k) local(k) = psi(sector.members[k]);
    const ComplexVector mapped = sector.unitary * local;
    for (Eigen::Index k = 0; k < size; ++k) out(sector.members[k]) = mapped(k);
  }
  return out;
}

TwoModeState SfgPropagator::apply(const TwoModeState& state) const {
  if (state.dimA() != dimA_ || state.dimB() != dimB_) {
    throw Error(ErrorCode::shape, "state dimensions do not match SFG propagator");
  }
  if (state.is_pure()) {
    ComplexVector out = apply(state.amplitudes());
    // Remove the O(eps) norm drift of the block exponentials.
    out.normalize();
    return TwoModeState(std::move(out), FockDim(dimA_), FockDim(dimB_));
  }
  const ComplexMatrix& rho = state.density();
  ComplexMatrix left(rho.rows(), rho.cols());
  for (Eigen::Index j = 0; j < rho.cols(); ++j) left.col(j) = apply(ComplexVector(rho.col(j)));
  const ComplexMatrix left_adj = left.adjoint();
  ComplexMatrix both(rho.rows(), rho.cols());
  for (Eigen::Index j = 0; j < rho.cols(); ++j) both.col(j) = apply(ComplexVector(left_adj.col(j)));
  return TwoModeState(ComplexMatrix(both.adjoint()), FockDim(dimA_), FockDim(dimB_));
}

ComplexMatrix SfgPropagator::dense() const {
  const Eigen::Index n = static_cast<Eigen::Index>(dimA_) * dimB_;
  ComplexMatrix u = ComplexMatrix::Zero(n, n);
  for (const auto& sector : sectors_) {
    const auto size = static_cast<Eigen::Index>(sector.members.size());
    for (Eigen::Index i = 0; i < size; ++i) {
      for (Eigen::Index j = 0; j < size; ++j) u(sector.members[i], sector.members[j]) = sector.unitary(i, j);
    }
  }
  return u;
}

TwoModeState apply_sfg(const TwoModeState& psi, double kappa) {
  return SfgPropagator(kappa, FockDim(psi.dimA()), FockDim(psi.dimB())).apply(psi);
}

TwoModeState spdc_input_state(double nbar_spdc, FockDim dimA, FockDim dimB, double zeta_phase) {
  FockState spdc = squeezed_vacuum(SqueezeParam::from_mean_photons(nbar_spdc, zeta_phase), dimA);
  // The discarded tail (< squeezed_tail_limit) is reported by squeezed_vacuum;
  // the joint state itself must be normalized.
  spdc.amplitudes.normalize();
  ComplexVector vacuum = ComplexVector::Zero(dimB);
  vacuum(0) = 1.0;
  return TwoModeState::product(spdc.amplitudes, vacuum);
}

double sfg_mean_photons(double nbar_spdc, double kappa, FockDim dimA, FockDim dimB, double zeta_phase) {
  const TwoModeState out = SfgPropagator(kappa, dimA, dimB).apply(spdc_input_state(nbar_spdc, dimA, dimB, zeta_phase));
  return photon_number_distribution(partial_trace_over_A(out)).mean();
}

double calibrate_kappa(double nbar_spdc, double target_nbar_sfg, FockDim dimA, FockDim dimB, double zeta_phase) {
  if (!(target_nbar_sfg >= 0.0) || !std::isfinite(target_nbar_sfg)) {
    throw Error(ErrorCode::calibration, "target SFG occupation must be finite and >= 0");
  }
  if (target_nbar_sfg == 0.0) return 0.0;

  auto occupation = [&](double kappa) { return sfg_mean_photons(nbar_spdc, kappa, dimA, dimB, zeta_phase); };
  double lo = 0.0;
  double hi = kappa_bracket_max;
  if (occupation(hi) < target_nbar_sfg) {
    throw Error(ErrorCode::calibration, "target SFG occupation " + std::to_string(target_nbar_sfg) +
                                            " not reached within kappa <= " + std::to_string(hi));
  }
  while (hi - lo > kappa_rel_tol * 0.5 * (hi + lo)) {
    const double mid = 0.5 * (lo + hi);
    if (occupation(mid) < target_nbar_sfg) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double kappa = 0.5 * (lo + hi);
  const double achieved = occupation(kappa);
  if (std::abs(achieved / target_nbar_sfg - 1.0) > kappa_target_rel_tol) {
    throw Error(ErrorCode::calibration, "calibrated kappa misses target occupation by more than 1e-4");
  }
  return kappa;
}

CascadeReport run_cascade(const CascadeConfig& config) {
  if (!(config.nbar_spdc >= 0.0)) throw Error(ErrorCode::config, "nbar_spdc must be >= 0");
  check_kappa(config.kappa);
  const FockDim dimA(config.dimA);
  const FockDim dimB(config.dimB);

  const FockState spdc = squeezed_vacuum(SqueezeParam::from_mean_photons(config.nbar_spdc, config.zeta_phase), dimA);
  const PhotonNumberDistribution pn_spdc = photon_number_distribution(spdc);

  const SfgPropagator propagator(config.kappa, dimA, dimB);
  const TwoModeState out = propagator.apply(spdc_input_state(config.nbar_spdc, dimA, dimB, config.zeta_phase));
  const DensityMatrix rho_sfg = partial_trace_over_A(out);

  CascadeReport report;
  report.pn_sfg = photon_number_distribution(rho_sfg);
  report.nbar_sfg = report.pn_sfg.mean();
  report.g2_sfg = report.nbar_sfg > 0.0 ? coherence_order(report.pn_sfg, 2) : 0.0;
  report.purity_sfg = purity(rho_sfg);
  report.fidelity_coherent = fidelity_to_coherent(rho_sfg, cdouble(std::sqrt(report.nbar_sfg), 0.0));
  report.nbar_spdc_out = expectation(out, number_matrix(dimA), ComplexMatrix::Identity(dimB, dimB)).real();
  if (pn_spdc.mean() > 0.0) {
    report.g2_spdc = coherence_order(pn_spdc, 2);
    report.g4_spdc = coherence_order(pn_spdc, 4);
    report.g2_ratio_law = report.g4_spdc / (report.g2_spdc * report.g2_spdc);
  }
  return report;
}

}  // namespace upconv
