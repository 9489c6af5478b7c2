#pragma once

// Analysis of affine symbols phi(z) = A z + b acting by composition on the
// Gaussian reproducing-kernel space over C^n: boundedness, operator norm,
// and structural classification (compact / normal / isometric / co-isometric
// / unitary). Two independent numerical routes back every verdict; when they
// disagree beyond tolerance the functions throw CrossCheckError rather than
// guess.

#include <optional>

#include "fockop/linalg.hpp"

namespace fockop {

/// Affine self-map of C^n. Validates shape and finiteness on construction.
struct AffineMap {
  ComplexMatrix A;
  ComplexVector b;

  AffineMap(ComplexMatrix A_, ComplexVector b_);

  Eigen::Index dim() const { return A.rows(); }
  ComplexVector operator()(const ComplexVector& z) const;
};

/// outer(inner(z)): A = A_outer * A_inner, b = A_outer * b_inner + b_outer.
AffineMap compose(const AffineMap& outer, const AffineMap& inner);

/// (I - A^*A)^{1/2} via Hermitian eigendecomposition. Eigenvalues of I - A^*A
/// inside the band max(2*boundary_tol, rank_tol) * max(1, lambda_max) around 0
/// are clamped to exactly 0, so singular values of A within the boundary band
/// of 1 behave as exactly 1 downstream (the band also swallows round-off).
/// Throws InputError if ||A|| > 1 + boundary_tol (the root does not exist).
ComplexMatrix defect_sqrt(const ComplexMatrix& A,
                          const std::optional<Tolerances>& tol = std::nullopt);

struct MembershipResult {
  bool member;               // A^* b in ran((I - A^*A)^{1/2})
  ComplexVector v;           // minimal-norm solution of (I - A^*A)^{1/2} v = A^* b
  double residual;           // least-squares residual of that solve
  double kernel_projection;  // || P_{ker(I - A^*A)} A^* b ||, the second route
  double tol;                // threshold both routes were compared against
};

/// Range membership test behind the boundedness criterion. Routes:
///  (1) minimal-norm least squares against the defect square root,
///  (2) projection of A^* b onto the kernel of I - A^*A.
/// Both must agree; disagreement throws CrossCheckError.
MembershipResult range_membership(const AffineMap& phi,
                                  const std::optional<Tolerances>& tol = std::nullopt);

/// The minimal-norm v with (I - A^*A)^{1/2} v = A^* b. Cross-checked against
/// the route v = (I - A^*A)^{1/2} w0 where (I - A^*A) w0 = A^* b, which must
/// agree to 1e-8 * max(1, ||v||). Throws UnboundedError when membership fails.
ComplexVector minimal_norm_vector(const AffineMap& phi,
                                  const std::optional<Tolerances>& tol = std::nullopt);

struct NormCertificate {
  bool bounded = false;
  bool boundary = false;  // | ||A|| - 1 | <= boundary_tol
  double a_norm = 0.0;
  std::optional<double> norm;      // exp(||v||^2/2 + ||b||^2/2) when bounded
  std::optional<double> cms_norm;  // exp((||w0||^2 - ||A w0||^2 + ||b||^2)/2)
  std::optional<ComplexVector> v;
  std::optional<ComplexVector> w0;
  // Membership evidence. Absent only when ||A|| > 1 + boundary_tol, where the
  // defect square root does not exist and no membership test is defined.
  std::optional<double> membership_residual;
  std::optional<double> kernel_projection;
  double membership_tol = 0.0;
};

/// Boundedness verdict plus norm. Unboundedness is a result, not an error:
/// bounded=false certificates carry the witness (norm excess of A, or the
/// membership residual). When bounded, the two norm formulas (via v and via
/// w0) must agree to 1e-8 relative or CrossCheckError is thrown.
NormCertificate composition_norm(const AffineMap& phi,
                                 const std::optional<Tolerances>& tol = std::nullopt);

/// True iff <A zeta, b> = 0 for every kernel basis vector zeta of I - A^*A.
/// Must equal range_membership(phi).member; disagreement is a CrossCheckError.
bool cms_condition_check(const AffineMap& phi,
                         const std::optional<Tolerances>& tol = std::nullopt);

struct StructureReport {
  bool compact = false;      // ||A|| < 1 - boundary_tol
  bool normal = false;       // b = 0, A normal, ||A|| <= 1
  bool isometric = false;    // b = 0, A A^* = I
  bool coisometric = false;  // b = 0, A^* A = I
  bool unitary = false;      // isometric and coisometric
};

/// Structural classification of the composition operator with symbol phi.
/// Note the adjoint flip: the operator is isometric iff A is co-isometric,
/// and co-isometric iff A is isometric.
StructureReport classify_structure(const AffineMap& phi,
                                   const std::optional<Tolerances>& tol = std::nullopt);

}  // namespace fockop
