#pragma once

// Truncated Fock-space linear algebra for one and two bosonic modes.
//
// Two-mode vectors use the ordering index = nA * dimB + nB, i.e. mode A
// (the down-converted mode) is the slow index. tensor_product follows the
// same convention, so (X kron Y) acts as X on mode A and Y on mode B.

#include <complex>
#include <cstddef>
#include <variant>

#include <Eigen/Dense>

namespace upconv {

using cdouble = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Number of retained Fock levels |0>..|dim-1>. Always >= 2.
class FockDim {
 public:
  explicit FockDim(int dim);
  int value() const noexcept { return dim_; }
  operator int() const noexcept { return dim_; }

 private:
  int dim_;
};

struct DensityTolerance {
  double herm_tol = 1e-10;
  double psd_tol = 1e-10;
};

// Validated single-mode density matrix: Hermitian, unit trace and positive
// semidefinite within the stored tolerances.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix mat, DensityTolerance tol = {});

  // Projector |psi><psi| of a (nearly) normalized vector.
  static DensityMatrix from_pure(const ComplexVector& psi, DensityTolerance tol = {});

  const ComplexMatrix& matrix() const noexcept { return mat_; }
  int dim() const noexcept { return static_cast<int>(mat_.rows()); }
  const DensityTolerance& tolerance() const noexcept { return tol_; }

 private:
  ComplexMatrix mat_;
  DensityTolerance tol_;
};

// State on the (A: SPDC) x (B: SFG) product space, pure or mixed.
class TwoModeState {
 public:
  TwoModeState(ComplexVector amplitudes, FockDim dimA, FockDim dimB);
  TwoModeState(ComplexMatrix density, FockDim dimA, FockDim dimB);

  static TwoModeState product(const ComplexVector& psiA, const ComplexVector& psiB);

  bool is_pure() const noexcept { return std::holds_alternative<ComplexVector>(data_); }
  const ComplexVector& amplitudes() const;
  const ComplexMatrix& density() const;
  int dimA() const noexcept { return dimA_; }
  int dimB() const noexcept { return dimB_; }

 private:
  std::variant<ComplexVector, ComplexMatrix> data_;
  int dimA_;
  int dimB_;
};

ComplexMatrix annihilation_matrix(FockDim dim);
ComplexMatrix number_matrix(FockDim dim);

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

// exp(m) by scaling and squaring around a truncated Taylor series. The series
// is cut once the next term is below tol relative to the partial sum; the
// scaling keeps the scaled one-norm below 1/2.
ComplexMatrix matrix_exponential(const ComplexMatrix& m, double tol = 1e-14);

// rho_B = Tr_A |psi><psi| (or Tr_A rho for the mixed case).
DensityMatrix partial_trace_over_A(const TwoModeState& state);

double purity(const DensityMatrix& rho);

// Tr(rho X) for a single-mode operator X.
cdouble expectation(const DensityMatrix& rho, const ComplexMatrix& op);
// <psi| (opA kron opB) |psi>, evaluated without forming the Kronecker product.
cdouble expectation(const TwoModeState& state, const ComplexMatrix& opA, const ComplexMatrix& opB);

// Fidelity to the coherent state |alpha>, using sqrt(<alpha|rho|alpha>) since
// the reference is pure. Throws precision error if |alpha> is not captured by
// the truncation to better than 1e-12.
double fidelity_to_coherent(const DensityMatrix& rho, cdouble alpha);

// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const ComplexMatrix& hermitian);

}  // namespace upconv
