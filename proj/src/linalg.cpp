#include "fockop/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fockop {

namespace detail {

void require_finite(const ComplexMatrix& M, const char* what) {
  if (!M.allFinite()) throw InputError(std::string(what) + ": non-finite entries");
}

void require_finite(const ComplexVector& v, const char* what) {
  if (!v.allFinite()) throw InputError(std::string(what) + ": non-finite entries");
}

}  // namespace detail

Tolerances Tolerances::for_dim(Eigen::Index n) {
  if (n < 1) throw DimensionError("Tolerances::for_dim: dimension must be >= 1");
  Tolerances t;
  t.rank_tol = 1e3 * static_cast<double>(n) * std::numeric_limits<double>::epsilon();
  t.validate();
  return t;
}

void Tolerances::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0) || !(v < 1.0) || !std::isfinite(v)) {
      std::ostringstream os;
      os << "Tolerances: " << name << " must lie in (0, 1), got " << v;
      throw InputError(os.str());
    }
  };
  check(rank_tol, "rank_tol");
  check(psd_tol, "psd_tol");
  check(boundary_tol, "boundary_tol");
}

EigResult hermitian_eig(const ComplexMatrix& H) {
  if (H.rows() != H.cols() || H.rows() < 1)
    throw DimensionError("hermitian_eig: matrix must be square and nonempty");
  detail::require_finite(H, "hermitian_eig");

  const double scale = H.norm();  // Frobenius
  const double asym = (H - H.adjoint()).norm();
  const Tolerances tol = Tolerances::for_dim(H.rows());
  if (asym > tol.rank_tol * std::max(1.0, scale))
    throw InputError("hermitian_eig: matrix is not Hermitian within tolerance");

  const ComplexMatrix Hs = 0.5 * (H + H.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(Hs);
  if (es.info() != Eigen::Success)
    throw CrossCheckError("hermitian_eig: eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

SvdResult svd(const ComplexMatrix& M) {
  if (M.rows() < 1 || M.cols() < 1)
    throw DimensionError("svd: matrix must be nonempty");
  detail::require_finite(M, "svd");

  Eigen::JacobiSVD<ComplexMatrix> solver(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

double spectral_norm(const ComplexMatrix& M) {
  if (M.rows() < 1 || M.cols() < 1)
    throw DimensionError("spectral_norm: matrix must be nonempty");
  detail::require_finite(M, "spectral_norm");

  // Entries beyond ~1e154 would overflow the Gram below (and tiny ones
  // underflow it to 0); pull extreme scales back toward 1 first.
  const double scale = M.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  const bool rescaled = scale > 1e150 || scale < 1e-150;
  const ComplexMatrix Mw = rescaled ? ComplexMatrix(M / scale) : M;

  // Gram route: accurate to ~n*eps relative for the top singular value and
  // much faster than a full SVD at Galerkin sizes. Use the smaller Gram.
  const bool tall = Mw.rows() >= Mw.cols();
  const ComplexMatrix G = tall ? ComplexMatrix(Mw.adjoint() * Mw)
                               : ComplexMatrix(Mw * Mw.adjoint());
  const ComplexMatrix Gs = 0.5 * (G + G.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(Gs, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw CrossCheckError("spectral_norm: eigensolver did not converge");
  const double top = es.eigenvalues().maxCoeff();
  const double s = std::sqrt(std::max(0.0, top));
  return rescaled ? scale * s : s;
}

LeastSquaresResult min_norm_solve(const ComplexMatrix& M, const ComplexVector& y,
                                  const Tolerances& tol) {
  if (M.rows() < 1 || M.cols() < 1)
    throw DimensionError("min_norm_solve: matrix must be nonempty");
  if (y.size() != M.rows())
    throw DimensionError("min_norm_solve: rhs length does not match matrix rows");
  detail::require_finite(M, "min_norm_solve");
  detail::require_finite(y, "min_norm_solve");
  tol.validate();

  Eigen::JacobiSVD<ComplexMatrix> solver(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sv = solver.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double cutoff = tol.rank_tol * smax;

  ComplexVector x = ComplexVector::Zero(M.cols());
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff && sv(i) > 0.0) {
      const Complex c = solver.matrixU().col(i).dot(y) / sv(i);
      x += c * solver.matrixV().col(i);
      ++rank;
    }
  }
  const double residual = (M * x - y).norm();
  return {std::move(x), residual, rank};
}

}  // namespace fockop
