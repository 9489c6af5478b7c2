#pragma once

// Truncated orthonormal monomial basis of the Gaussian kernel space over C^n
// and the exact matrix of an affine composition on it. The subspace of
// polynomials of degree <= d is invariant under composition with z -> Az + b,
// so the truncated matrix is the exact compression of the operator; its
// spectral norm is a monotone lower bound for the operator norm.

#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "fockop/affine.hpp"
#include "fockop/linalg.hpp"

namespace fockop {

using MultiIndex = std::vector<int>;

int degree(const MultiIndex& alpha);

/// k! as a double. Exact integer arithmetic through k = 20, log-domain above.
double factorial(int k);
/// log(k!) via lgamma (exact-table consistent for k <= 20).
double log_factorial(int k);
/// log(alpha!) = sum_i log(alpha_i!).
double log_multi_factorial(const MultiIndex& alpha);

/// All multi-indices with |alpha| <= d over n variables, graded order:
/// total degree ascending, lexicographically descending inside each degree.
/// The zero index comes first, then (1,0,..), (0,1,..), ...
class TruncatedBasis {
 public:
  TruncatedBasis(int n, int d);

  int n() const { return n_; }
  int d() const { return d_; }
  int size() const { return static_cast<int>(indices_.size()); }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  const MultiIndex& index(int i) const { return indices_[static_cast<size_t>(i)]; }

  /// Position of alpha in the enumeration, or -1 if |alpha| > d.
  int position(const MultiIndex& alpha) const;
  /// Position of alpha + e_j, or -1 if that leaves the truncation.
  int bump(int i, int j) const { return bump_[static_cast<size_t>(i)][static_cast<size_t>(j)]; }
  /// First enumeration position of total degree k (== size() for k = d+1).
  int degree_start(int k) const { return degree_start_[static_cast<size_t>(k)]; }

 private:
  int n_;
  int d_;
  std::vector<MultiIndex> indices_;
  std::vector<int> degree_start_;
  std::vector<std::vector<int>> bump_;
  std::map<MultiIndex, int> positions_;
};

/// Builds the basis; throws ResourceError when C(n+d, d) would exceed 2e6.
std::shared_ptr<const TruncatedBasis> enumerate_basis(int n, int d);

/// Polynomial by monomial coefficients over a truncated basis:
/// f(z) = sum_alpha coeffs[alpha] z^alpha.
struct PolyCoeffs {
  std::shared_ptr<const TruncatedBasis> basis;
  ComplexVector coeffs;
};

/// Inner product sum_alpha alpha! c_alpha(f) conj(c_alpha(g)). The monomial
/// z^alpha has squared norm alpha!.
Complex poly_inner(const PolyCoeffs& f, const PolyCoeffs& g);

/// Coefficients of f(Az + b); exact multinomial expansion (compositions with
/// an affine map never raise the degree, so nothing is truncated).
PolyCoeffs compose_poly(const AffineMap& phi, const PolyCoeffs& f);

/// Matrix of the composition operator on the orthonormal basis
/// f_alpha = z^alpha / sqrt(alpha!): column alpha holds the coordinates of
/// f_alpha(Az + b). No spectral constraint on A.
ComplexMatrix matrix_of_composition(const AffineMap& phi, int d);

/// Spectral norm of the degree-d compression. Nondecreasing in d; a lower
/// bound for the operator norm whenever the operator is bounded.
double truncated_norm(const AffineMap& phi, int d);

/// Norm of the block of matrix_of_composition((A, 0)) on the homogeneous
/// degree-m subspace. Equals ||A||^m.
double homogeneous_block_norm(const ComplexMatrix& A, int m);

/// Truncation of the kernel section K_w: coefficient conj(w)^alpha / alpha!.
PolyCoeffs kernel_section(const ComplexVector& w,
                          std::shared_ptr<const TruncatedBasis> basis);

/// f(w) by direct monomial evaluation.
Complex evaluate_poly(const PolyCoeffs& f, const ComplexVector& w);

/// Returns (<f, K_w truncated>, f(w)); both sides coincide up to round-off
/// because the pairing against the truncated kernel section reproduces point
/// evaluation for polynomials inside the truncation.
std::pair<Complex, Complex> reproducing_check(const ComplexVector& w,
                                              const PolyCoeffs& f);

}  // namespace fockop
