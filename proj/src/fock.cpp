#include "upconv/fock.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "upconv/error.hpp"
#include "upconv/states.hpp"

namespace upconv {

namespace {

using RowMajorMatrix = Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajorMatrix> as_grid(const ComplexVector& psi, int dimA, int dimB) {
  return Eigen::Map<const RowMajorMatrix>(psi.data(), dimA, dimB);
}

double one_norm(const ComplexMatrix& m) {
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    }
  }
  return true;
}

}  // namespace

FockDim::FockDim(int dim) : dim_(dim) {
  if (dim < 2) {
    throw Error(ErrorCode::invalid_dimension,
                "Fock dimension must be >= 2, got " + std::to_string(dim));
  }
}

DensityMatrix::DensityMatrix(ComplexMatrix mat, DensityTolerance tol)
    : mat_(std::move(mat)), tol_(tol) {
  if (mat_.rows() != mat_.cols() || mat_.rows() == 0) {
    throw Error(ErrorCode::shape, "density matrix must be square and non-empty");
  }
  if (!all_finite(mat_)) throw Error(ErrorCode::numerical, "density matrix has non-finite entries");
  const double herm_dev = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
  if (herm_dev > tol_.herm_tol) {
    throw Error(ErrorCode::numerical,
                "density matrix not Hermitian (deviation " + std::to_string(herm_dev) + ")");
  }
  const double trace_dev = std::abs(mat_.trace() - cdouble(1.0));
  if (trace_dev > tol_.herm_tol) {
    throw Error(ErrorCode::numerical,
                "density matrix trace differs from 1 by " + std::to_string(trace_dev));
  }
  const double lowest = min_eigenvalue(mat_);
  if (lowest < -tol_.psd_tol) {
    throw Error(ErrorCode::numerical,
                "density matrix not positive semidefinite (eigenvalue " + std::to_string(lowest) + ")");
  }
}

DensityMatrix DensityMatrix::from_pure(const ComplexVector& psi, DensityTolerance tol) {
  return DensityMatrix(psi * psi.adjoint(), tol);
}

TwoModeState::TwoModeState(ComplexVector amplitudes, FockDim dimA, FockDim dimB)
    : data_(std::move(amplitudes)), dimA_(dimA), dimB_(dimB) {
  const auto& psi = std::get<ComplexVector>(data_);
  if (psi.size() != static_cast<Eigen::Index>(dimA_) * dimB_) {
    throw Error(ErrorCode::shape, "amplitude vector length does not match dimA*dimB");
  }
  const double norm_dev = std::abs(psi.squaredNorm() - 1.0);
  if (!(norm_dev <= 1e-12)) {
    throw Error(ErrorCode::numerical,
                "two-mode state not normalized (|norm^2 - 1| = " + std::to_string(norm_dev) + ")");
  }
}

TwoModeState::TwoModeState(ComplexMatrix density, FockDim dimA, FockDim dimB)
    : data_(std::move(density)), dimA_(dimA), dimB_(dimB) {
  const auto& rho = std::get<ComplexMatrix>(data_);
  const Eigen::Index n = static_cast<Eigen::Index>(dimA_) * dimB_;
  if (rho.rows() != n || rho.cols() != n) {
    throw Error(ErrorCode::shape, "density matrix size does not match dimA*dimB");
  }
  if (!(std::abs(rho.trace() - cdouble(1.0)) <= 1e-10)) {
    throw Error(ErrorCode::numerical, "two-mode density matrix does not have unit trace");
  }
}

TwoModeState TwoModeState::product(const ComplexVector& psiA, const ComplexVector& psiB) {
  ComplexVector joint(psiA.size() * psiB.size());
  for (Eigen::Index a = 0; a < psiA.size(); ++a) {
    joint.segment(a * psiB.size(), psiB.size()) = psiA(a) * psiB;
  }
  return TwoModeState(std::move(joint), FockDim(static_cast<int>(psiA.size())),
                      FockDim(static_cast<int>(psiB.size())));
}

const ComplexVector& TwoModeState::amplitudes() const {
  if (!is_pure()) throw Error(ErrorCode::shape, "state is mixed; no amplitude vector");
  return std::get<ComplexVector>(data_);
}

const ComplexMatrix& TwoModeState::density() const {
  if (is_pure()) throw Error(ErrorCode::shape, "state is pure; no density matrix stored");
  return std::get<ComplexMatrix>(data_);
}

ComplexMatrix annihilation_matrix(FockDim dim) {
  ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

ComplexMatrix number_matrix(FockDim dim) {
  ComplexMatrix n = ComplexMatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix matrix_exponential(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::shape, "matrix_exponential needs a square matrix");
  if (!all_finite(m)) throw Error(ErrorCode::numerical, "matrix_exponential input is not finite");
  if (!(tol > 0.0)) throw Error(ErrorCode::config, "matrix_exponential tolerance must be positive");

  const Eigen::Index n = m.rows();
  if (n == 0) return m;

  const double norm = one_norm(m);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const ComplexMatrix scaled = m / std::ldexp(1.0, squarings);

  constexpr int max_terms = 60;
  ComplexMatrix sum = ComplexMatrix::Identity(n, n);
  ComplexMatrix term = ComplexMatrix::Identity(n, n);
  bool converged = false;
  for (int k = 1; k <= max_terms; ++k) {
    term = (term * scaled) / static_cast<double>(k);
    sum += term;
    if (one_norm(term) <= tol * one_norm(sum)) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw Error(ErrorCode::numerical, "Taylor series did not reach requested tolerance");
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

DensityMatrix partial_trace_over_A(const TwoModeState& state) {
  const int dA = state.dimA();
  const int dB = state.dimB();
  ComplexMatrix rhoB = ComplexMatrix::Zero(dB, dB);
  if (state.is_pure()) {
    const auto grid = as_grid(state.amplitudes(), dA, dB);
    rhoB = grid.transpose() * grid.conjugate();
  } else {
    const auto& rho = state.density();
    for (int a = 0; a < dA; ++a) rhoB += rho.block(a * dB, a * dB, dB, dB);
  }
  rhoB = 0.5 * (rhoB + rhoB.adjoint()).eval();
  return DensityMatrix(std::move(rhoB));
}

double purity(const DensityMatrix& rho) {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return rho.matrix().cwiseAbs2().sum();
}

cdouble expectation(const DensityMatrix& rho, const ComplexMatrix& op) {
  if (op.rows() != rho.dim() || op.cols() != rho.dim()) {
    throw Error(ErrorCode::shape, "operator dimension does not match density matrix");
  }
  return (rho.matrix() * op).trace();
}

cdouble expectation(const TwoModeState& state, const ComplexMatrix& opA, const ComplexMatrix& opB) {
  const int dA = state.dimA();
  const int dB = state.dimB();
  if (opA.rows() != dA || opA.cols() != dA || opB.rows() != dB || opB.cols() != dB) {
    throw Error(ErrorCode::shape, "operator dimensions do not match two-mode state");
  }
  if (state.is_pure()) {
    const auto grid = as_grid(state.amplitudes(), dA, dB);
    const RowMajorMatrix applied = opA * grid * opB.transpose();
    return (grid.conjugate().cwiseProduct(applied)).sum();
  }
  return (state.density() * tensor_product(opA, opB)).trace();
}

double fidelity_to_coherent(const DensityMatrix& rho, cdouble alpha) {
  const FockState ref = coherent_state(CoherentAmplitude{alpha}, FockDim(rho.dim()));
  const cdouble overlap = ref.amplitudes.dot(rho.matrix() * ref.amplitudes);
  return std::sqrt(std::max(0.0, overlap.real()));
}

double min_eigenvalue(const ComplexMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::numerical, "eigenvalue decomposition failed");
  }
  return solver.eigenvalues().minCoeff();
}

}  // namespace upconv
