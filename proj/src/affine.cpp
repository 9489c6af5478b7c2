#include "fockop/affine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace fockop {

namespace {

Tolerances resolve(const std::optional<Tolerances>& tol, Eigen::Index n) {
  if (tol) {
    tol->validate();
    return *tol;
  }
  return Tolerances::for_dim(n);
}

struct DefectEig {
  RealVector eigenvalues;      // of I - A^*A, ascending, clamped at the band
  ComplexMatrix eigenvectors;  // unitary
  double clamp_band;           // absolute threshold that was clamped to zero
  std::vector<Eigen::Index> kernel;  // indices with eigenvalue clamped to 0
};

// Shared eigen-analysis of the defect I - A^*A. The clamp band turns both
// round-off noise and boundary_tol-close-to-unit singular values of A into
// exact zeros, which keeps the square-root scale and the kernel decision
// consistent across the membership routes.
DefectEig defect_eig(const ComplexMatrix& A, const Tolerances& tol) {
  const Eigen::Index n = A.rows();
  const double a_norm = spectral_norm(A);
  if (a_norm > 1.0 + tol.boundary_tol) {
    std::ostringstream os;
    os << "defect_sqrt: ||A|| = " << a_norm << " exceeds 1 + boundary_tol";
    throw InputError(os.str());
  }

  const ComplexMatrix D = ComplexMatrix::Identity(n, n) - A.adjoint() * A;
  EigResult eig = hermitian_eig(D);

  const double lam_max = eig.eigenvalues.size() > 0
                             ? std::max(0.0, eig.eigenvalues.maxCoeff())
                             : 0.0;
  const double band =
      std::max(2.0 * tol.boundary_tol, tol.rank_tol) * std::max(1.0, lam_max);

  DefectEig out;
  out.eigenvectors = std::move(eig.eigenvectors);
  out.eigenvalues = std::move(eig.eigenvalues);
  out.clamp_band = band;
  for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i) {
    if (out.eigenvalues(i) <= band) {
      out.eigenvalues(i) = 0.0;
      out.kernel.push_back(i);
    }
  }
  return out;
}

ComplexMatrix sqrt_from_eig(const DefectEig& de) {
  RealVector roots = de.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  ComplexMatrix S = de.eigenvectors * roots.asDiagonal() *
                    de.eigenvectors.adjoint();
  return 0.5 * (S + S.adjoint());  // re-Hermitize round-off
}

}  // namespace

AffineMap::AffineMap(ComplexMatrix A_, ComplexVector b_)
    : A(std::move(A_)), b(std::move(b_)) {
  if (A.rows() < 1 || A.rows() != A.cols())
    throw DimensionError("AffineMap: A must be square and nonempty");
  if (b.size() != A.rows())
    throw DimensionError("AffineMap: b length must match A");
  detail::require_finite(A, "AffineMap");
  detail::require_finite(b, "AffineMap");
}

ComplexVector AffineMap::operator()(const ComplexVector& z) const {
  if (z.size() != dim()) throw DimensionError("AffineMap: point has wrong dimension");
  return A * z + b;
}

AffineMap compose(const AffineMap& outer, const AffineMap& inner) {
  if (outer.dim() != inner.dim())
    throw DimensionError("compose: dimension mismatch");
  return AffineMap(outer.A * inner.A, outer.A * inner.b + outer.b);
}

ComplexMatrix defect_sqrt(const ComplexMatrix& A,
                          const std::optional<Tolerances>& tol) {
  if (A.rows() < 1 || A.rows() != A.cols())
    throw DimensionError("defect_sqrt: A must be square and nonempty");
  detail::require_finite(A, "defect_sqrt");
  const Tolerances t = resolve(tol, A.rows());
  return sqrt_from_eig(defect_eig(A, t));
}

MembershipResult range_membership(const AffineMap& phi,
                                  const std::optional<Tolerances>& tol) {
  const Tolerances t = resolve(tol, phi.dim());
  const DefectEig de = defect_eig(phi.A, t);
  const ComplexMatrix S = sqrt_from_eig(de);
  const ComplexVector rhs = phi.A.adjoint() * phi.b;
  const double threshold = t.rank_tol * std::max(1.0, rhs.norm());

  // Route 1: pseudoinverse residual.
  LeastSquaresResult ls = min_norm_solve(S, rhs, t);
  const bool member_ls = ls.residual <= threshold;

  // Route 2: projection of rhs onto the kernel of I - A^*A.
  double kernel_sq = 0.0;
  for (Eigen::Index idx : de.kernel) {
    const Complex c = de.eigenvectors.col(idx).dot(rhs);
    kernel_sq += std::norm(c);
  }
  const double kernel_proj = std::sqrt(kernel_sq);
  const bool member_proj = kernel_proj <= threshold;

  if (member_ls != member_proj) {
    std::ostringstream os;
    os << "range_membership: routes disagree (least-squares residual "
       << ls.residual << ", kernel projection " << kernel_proj
       << ", threshold " << threshold << ")";
    throw CrossCheckError(os.str());
  }
  return {member_ls, std::move(ls.x), ls.residual, kernel_proj, threshold};
}

ComplexVector minimal_norm_vector(const AffineMap& phi,
                                  const std::optional<Tolerances>& tol) {
  const Tolerances t = resolve(tol, phi.dim());
  MembershipResult mem = range_membership(phi, t);
  if (!mem.member) {
    std::ostringstream os;
    os << "minimal_norm_vector: A^*b is not in the defect range (residual "
       << mem.residual << "); the operator is unbounded";
    throw UnboundedError(os.str());
  }

  // Independent route: v = (I - A^*A)^{1/2} w0 with (I - A^*A) w0 = A^*b.
  const Eigen::Index n = phi.dim();
  const ComplexMatrix D =
      ComplexMatrix::Identity(n, n) - phi.A.adjoint() * phi.A;
  const ComplexVector rhs = phi.A.adjoint() * phi.b;
  LeastSquaresResult w0 = min_norm_solve(D, rhs, t);
  const ComplexMatrix S = defect_sqrt(phi.A, t);
  const double gap = (S * w0.x - mem.v).norm();
  if (gap > 1e-8 * std::max(1.0, mem.v.norm())) {
    std::ostringstream os;
    os << "minimal_norm_vector: v and (I - A^*A)^{1/2} w0 disagree by " << gap;
    throw CrossCheckError(os.str());
  }
  return std::move(mem.v);
}

NormCertificate composition_norm(const AffineMap& phi,
                                 const std::optional<Tolerances>& tol) {
  const Tolerances t = resolve(tol, phi.dim());
  NormCertificate cert;
  cert.a_norm = spectral_norm(phi.A);
  cert.boundary = std::abs(cert.a_norm - 1.0) <= t.boundary_tol;

  if (cert.a_norm > 1.0 + t.boundary_tol) {
    cert.bounded = false;  // witness: a_norm itself
    return cert;
  }

  MembershipResult mem = range_membership(phi, t);
  cert.membership_residual = mem.residual;
  cert.kernel_projection = mem.kernel_projection;
  cert.membership_tol = mem.tol;
  if (!mem.member) {
    cert.bounded = false;
    return cert;
  }

  cert.bounded = true;
  cert.v = mem.v;
  const double b_sq = phi.b.squaredNorm();
  const double exponent = 0.5 * mem.v.squaredNorm() + 0.5 * b_sq;
  if (exponent > 700.0) {
    std::ostringstream os;
    os << "composition_norm: norm = exp(" << exponent
       << ") exceeds the double range";
    throw RangeError(os.str());
  }
  const double norm_v = std::exp(exponent);
  cert.norm = norm_v;

  const Eigen::Index n = phi.dim();
  const ComplexMatrix D =
      ComplexMatrix::Identity(n, n) - phi.A.adjoint() * phi.A;
  const ComplexVector rhs = phi.A.adjoint() * phi.b;
  LeastSquaresResult w0 = min_norm_solve(D, rhs, t);
  cert.w0 = w0.x;
  const double norm_w0 =
      std::exp(0.5 * (w0.x.squaredNorm() - (phi.A * w0.x).squaredNorm() + b_sq));
  cert.cms_norm = norm_w0;

  if (std::abs(norm_v - norm_w0) > 1e-8 * norm_v) {
    std::ostringstream os;
    os << "composition_norm: norm formulas disagree (" << norm_v << " vs "
       << norm_w0 << ")";
    throw CrossCheckError(os.str());
  }
  return cert;
}

bool cms_condition_check(const AffineMap& phi,
                         const std::optional<Tolerances>& tol) {
  const Tolerances t = resolve(tol, phi.dim());
  const DefectEig de = defect_eig(phi.A, t);
  const ComplexVector rhs = phi.A.adjoint() * phi.b;
  const double threshold = t.rank_tol * std::max(1.0, rhs.norm());

  bool ok = true;
  for (Eigen::Index idx : de.kernel) {
    const ComplexVector zeta = de.eigenvectors.col(idx);
    const Complex ip = (phi.A * zeta).dot(phi.b);  // <A zeta, b>
    if (std::abs(ip) > threshold) {
      ok = false;
      break;
    }
  }

  MembershipResult mem = range_membership(phi, t);
  if (ok != mem.member) {
    std::ostringstream os;
    os << "cms_condition_check: orthogonality test (" << (ok ? "pass" : "fail")
       << ") contradicts range membership (" << (mem.member ? "member" : "non-member")
       << ")";
    throw CrossCheckError(os.str());
  }
  return ok;
}

StructureReport classify_structure(const AffineMap& phi,
                                   const std::optional<Tolerances>& tol) {
  const Tolerances t = resolve(tol, phi.dim());
  const Eigen::Index n = phi.dim();
  const ComplexMatrix I = ComplexMatrix::Identity(n, n);

  const double a_norm = spectral_norm(phi.A);
  StructureReport rep;
  // Expanding linear part: every flag is false (compactness, normality,
  // isometry all force ||A|| <= 1), and skipping the products below keeps
  // huge entries from overflowing their Grams.
  if (a_norm > 1.0 + t.boundary_tol) return rep;

  const double eq_tol = t.rank_tol * std::max(1.0, a_norm * a_norm);
  const bool b_zero = phi.b.norm() <= t.rank_tol;

  rep.compact = a_norm < 1.0 - t.boundary_tol;
  rep.normal = b_zero &&
               spectral_norm(phi.A * phi.A.adjoint() - phi.A.adjoint() * phi.A) <= eq_tol &&
               a_norm <= 1.0 + t.boundary_tol;
  rep.isometric = b_zero && spectral_norm(phi.A * phi.A.adjoint() - I) <= eq_tol;
  rep.coisometric = b_zero && spectral_norm(phi.A.adjoint() * phi.A - I) <= eq_tol;
  rep.unitary = rep.isometric && rep.coisometric;
  return rep;
}

}  // namespace fockop
