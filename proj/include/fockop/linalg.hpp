#pragma once

// Dense complex linear algebra used by every other module: Hermitian
// eigendecomposition, SVD, spectral norm, and minimal-norm least squares.
// Thin deterministic wrappers over Eigen with the tolerance conventions the
// rest of the toolkit relies on.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

#include "fockop/errors.hpp"

namespace fockop {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Shared tolerance bundle. All three are relative and must lie in (0, 1).
///   rank_tol     - singular values below rank_tol * sigma_max count as zero
///   psd_tol      - eigenvalue floor for PSD verdicts, relative to the Gram norm
///   boundary_tol - band around ||A|| = 1 treated as exactly 1
struct Tolerances {
  double rank_tol;
  double psd_tol = 1e-10;
  double boundary_tol = 1e-9;

  /// Default bundle for problems of dimension n: rank_tol = 1e3 * n * eps.
  static Tolerances for_dim(Eigen::Index n);

  /// Throws InputError unless every field is in (0, 1).
  void validate() const;
};

struct EigResult {
  RealVector eigenvalues;     // ascending
  ComplexMatrix eigenvectors; // columns, unitary
};

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized to
/// (H + H*)/2 before decomposing; asymmetry beyond rank_tol * max(1, ||H||_F)
/// is an InputError because the caller's matrix was not Hermitian to begin with.
EigResult hermitian_eig(const ComplexMatrix& H);

struct SvdResult {
  ComplexMatrix U;
  RealVector singular_values; // descending, nonnegative
  ComplexMatrix V;            // M = U * diag(S) * V^*
};

/// Full SVD (deterministic Jacobi).
SvdResult svd(const ComplexMatrix& M);

/// Largest singular value, computed as sqrt(lambda_max(M^* M)).
double spectral_norm(const ComplexMatrix& M);

struct LeastSquaresResult {
  ComplexVector x;   // minimal-norm least-squares solution
  double residual;   // ||M x - y||
  int rank;          // singular values retained by the cutoff
};

/// Minimal-norm least-squares solve via the SVD pseudoinverse. Singular
/// values below tol.rank_tol * sigma_max are treated as exactly zero.
LeastSquaresResult min_norm_solve(const ComplexMatrix& M, const ComplexVector& y,
                                  const Tolerances& tol);

namespace detail {
/// Frobenius-scale guard shared by the wrappers.
void require_finite(const ComplexMatrix& M, const char* what);
void require_finite(const ComplexVector& v, const char* what);
}  // namespace detail

}  // namespace fockop
