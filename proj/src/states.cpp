#include "upconv/states.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "upconv/error.hpp"

namespace upconv {

namespace {

double wrap_phase(double phase) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::fmod(phase, two_pi);
  if (wrapped <= -std::numbers::pi) wrapped += two_pi;
  if (wrapped > std::numbers::pi) wrapped -= two_pi;
  return wrapped;
}

// Sum of exp(log_term(n)) for n >= first, for sequences that decay
// geometrically once past their maximum.
template <typename LogTerm>
double log_space_tail(int first, LogTerm log_term, int max_terms = 1000000) {
  double total = 0.0;
  double previous = INFINITY;
  for (int n = first; n < first + max_terms; ++n) {
    const double term = std::exp(log_term(n));
    total += term;
    if (term < previous && term <= 1e-18 * total) return total;
    if (term == 0.0 && previous == 0.0) return total;
    previous = term;
  }
  return INFINITY;
}

}  // namespace

SqueezeParam::SqueezeParam(double magnitude, double phase)
    : magnitude_(magnitude), phase_(wrap_phase(phase)) {
  if (!std::isfinite(magnitude) || magnitude < 0.0 || !std::isfinite(phase)) {
    throw Error(ErrorCode::config, "squeeze magnitude must be finite and >= 0");
  }
}

SqueezeParam SqueezeParam::from_mean_photons(double nbar, double phase) {
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
    throw Error(ErrorCode::config, "mean photon number must be finite and >= 0");
  }
  return SqueezeParam(std::asinh(std::sqrt(nbar)), phase);
}

double SqueezeParam::mean_photons() const {
  const double s = std::sinh(magnitude_);
  return s * s;
}

double PhotonNumberDistribution::mean() const { return factorial_moment(1); }

double PhotonNumberDistribution::factorial_moment(int k) const {
  double sum = 0.0;
  for (std::size_t n = static_cast<std::size_t>(k); n < probs.size(); ++n) {
    double falling = 1.0;
    for (int j = 0; j < k; ++j) falling *= static_cast<double>(n - j);
    sum += probs[n] * falling;
  }
  return sum;
}

FockState coherent_state(CoherentAmplitude alpha, FockDim dim) {
  const double nbar = alpha.mean_photons();
  if (!std::isfinite(nbar)) throw Error(ErrorCode::config, "coherent amplitude is not finite");

  FockState out{ComplexVector::Zero(dim), 0.0};
  if (nbar == 0.0) {
    out.amplitudes(0) = 1.0;
    return out;
  }
  const double log_abs = 0.5 * std::log(nbar);
  const double arg = std::arg(alpha.alpha);
  for (int n = 0; n < dim; ++n) {
    const double log_mag = -0.5 * nbar + n * log_abs - 0.5 * std::lgamma(n + 1.0);
    out.amplitudes(n) = std::polar(std::exp(log_mag), n * arg);
  }
  out.truncation_tail = log_space_tail(dim, [&](int n) {
    return -nbar + n * std::log(nbar) - std::lgamma(n + 1.0);
  });
  if (!(out.truncation_tail < coherent_tail_limit)) {
    throw Error(ErrorCode::precision,
                "coherent state truncation tail " + std::to_string(out.truncation_tail) +
                    " exceeds limit at dim " + std::to_string(int(dim)));
  }
  return out;
}

FockMixture thermal_density(double nbar, FockDim dim) {
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
    throw Error(ErrorCode::config, "thermal mean photon number must be finite and >= 0");
  }
  const double ratio = nbar / (1.0 + nbar);
  const double tail = std::pow(ratio, static_cast<double>(dim));
  if (!(tail < thermal_tail_limit)) {
    throw Error(ErrorCode::precision, "thermal state truncation tail " + std::to_string(tail) +
                                          " exceeds limit at dim " + std::to_string(int(dim)));
  }
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  double pn = 1.0 / (1.0 + nbar);
  for (int n = 0; n < dim; ++n) {
    rho(n, n) = pn;
    pn *= ratio;
  }
  return FockMixture{DensityMatrix(std::move(rho)), tail};
}

FockState squeezed_vacuum(const SqueezeParam& zeta, FockDim dim) {
  FockState out{ComplexVector::Zero(dim), 0.0};
  const double r = zeta.magnitude();
  if (r == 0.0) {
    out.amplitudes(0) = 1.0;
    return out;
  }
  const double log_sech = -std::log(std::cosh(r));
  const double log_half_tanh = std::log(0.5 * std::tanh(r));
  // c_n = sqrt(sech r (2n)!) / n! * (-e^{i phi} tanh(r) / 2)^n
  auto log_abs_c = [&](int n) {
    return 0.5 * (log_sech + std::lgamma(2.0 * n + 1.0)) - std::lgamma(n + 1.0) + n * log_half_tanh;
  };
  const double step_phase = zeta.phase() + std::numbers::pi;
  for (int n = 0; 2 * n < dim; ++n) {
    out.amplitudes(2 * n) = std::polar(std::exp(log_abs_c(n)), n * step_phase);
  }
  const int first_dropped = (dim + 1) / 2;
  out.truncation_tail = log_space_tail(first_dropped, [&](int n) { return 2.0 * log_abs_c(n); });
  if (!(out.truncation_tail < squeezed_tail_limit)) {
    throw Error(ErrorCode::precision,
                "squeezed vacuum truncation tail " + std::to_string(out.truncation_tail) +
                    " exceeds limit at dim " + std::to_string(int(dim)));
  }
  return out;
}

PhotonNumberDistribution photon_number_distribution(const ComplexVector& psi) {
  PhotonNumberDistribution pn;
  pn.probs.resize(static_cast<std::size_t>(psi.size()));
  for (Eigen::Index n = 0; n < psi.size(); ++n) pn.probs[n] = std::norm(psi(n));
  return pn;
}

PhotonNumberDistribution photon_number_distribution(const FockState& state) {
  auto pn = photon_number_distribution(state.amplitudes);
  pn.tail_tol = state.truncation_tail;
  return pn;
}

PhotonNumberDistribution photon_number_distribution(const DensityMatrix& rho) {
  PhotonNumberDistribution pn;
  pn.probs.resize(static_cast<std::size_t>(rho.dim()));
  for (int n = 0; n < rho.dim(); ++n) pn.probs[n] = std::max(0.0, rho.matrix()(n, n).real());
  return pn;
}

PhotonNumberDistribution photon_number_distribution(const FockMixture& state) {
  auto pn = photon_number_distribution(state.rho);
  pn.tail_tol = state.truncation_tail;
  return pn;
}

double coherence_order(const PhotonNumberDistribution& pn, int k) {
  if (k < 1) throw Error(ErrorCode::config, "coherence order k must be >= 1");
  const double mean = pn.mean();
  if (!(mean > 0.0)) {
    throw Error(ErrorCode::undefined_statistic, "coherence undefined for zero mean photon number");
  }
  return pn.factorial_moment(k) / std::pow(mean, k);
}

double coherence_order(const ComplexVector& psi, int k) {
  return coherence_order(photon_number_distribution(psi), k);
}

double coherence_order(const DensityMatrix& rho, int k) {
  return coherence_order(photon_number_distribution(rho), k);
}

}  // namespace upconv
