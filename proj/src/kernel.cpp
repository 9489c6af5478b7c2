#include "fockop/kernel.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace fockop {

namespace {

Complex gaussian_complex(std::mt19937_64& gen) {
  // Box-Muller, hand-rolled so plans do not depend on the standard library's
  // normal_distribution implementation. Unit variance per real component.
  std::uniform_real_distribution<double> unif(std::numeric_limits<double>::min(), 1.0);
  const double u1 = unif(gen);
  const double u2 = unif(gen);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(t), r * std::sin(t)};
}

void validate_plan(const SamplePlan& plan, Eigen::Index n) {
  if (plan.points.empty()) throw InputError("sample plan is empty");
  if (static_cast<int>(plan.points.size()) > kMaxPlanPoints)
    throw InputError("sample plan exceeds the 32-point cap");
  for (const auto& p : plan.points) {
    if (p.size() != n) throw DimensionError("sample plan point has wrong dimension");
    detail::require_finite(p, "sample plan");
  }
}

struct GramPair {
  ComplexMatrix base;   // K(x_l, x_j)
  ComplexMatrix image;  // K(phi(x_l), phi(x_j))
};

GramPair kernel_grams(const AffineMap& phi, const SamplePlan& plan) {
  const int m = static_cast<int>(plan.points.size());
  std::vector<ComplexVector> images;
  images.reserve(static_cast<size_t>(m));
  for (const auto& p : plan.points) images.push_back(phi(p));

  GramPair g;
  g.base.resize(m, m);
  g.image.resize(m, m);
  for (int l = 0; l < m; ++l) {
    for (int j = 0; j < m; ++j) {
      g.base(l, j) = bargmann_kernel(plan.points[static_cast<size_t>(l)],
                                     plan.points[static_cast<size_t>(j)]);
      g.image(l, j) = bargmann_kernel(images[static_cast<size_t>(l)],
                                      images[static_cast<size_t>(j)]);
    }
  }
  return g;
}

double min_eig_hermitian(const ComplexMatrix& G, double* norm_out) {
  const ComplexMatrix Gs = 0.5 * (G + G.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(Gs, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw CrossCheckError("psd test: eigensolver did not converge");
  const auto& ev = es.eigenvalues();
  if (norm_out) *norm_out = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  return ev(0);
}

bool psd_from_grams(const GramPair& g, double M, double psd_tol,
                    double* min_eig_out = nullptr, double* norm_out = nullptr) {
  const ComplexMatrix G = (M * M) * g.base - g.image;
  double gnorm = 0.0;
  const double min_eig = min_eig_hermitian(G, &gnorm);
  if (min_eig_out) *min_eig_out = min_eig;
  if (norm_out) *norm_out = gnorm;
  return min_eig >= -psd_tol * std::max(1.0, gnorm);
}

}  // namespace

SamplePlan make_plan(Eigen::Index n, int m, std::uint64_t seed, double radius) {
  if (n < 1) throw DimensionError("make_plan: need n >= 1");
  if (m < 1) throw InputError("make_plan: need at least one point");
  if (m > kMaxPlanPoints) throw InputError("make_plan: plans are capped at 32 points");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw InputError("make_plan: radius must be positive and finite");

  std::mt19937_64 gen(seed);
  const double scale = radius / (2.0 * std::sqrt(static_cast<double>(n)));
  SamplePlan plan;
  plan.seed = seed;
  plan.radius = radius;
  plan.points.reserve(static_cast<size_t>(m));
  for (int k = 0; k < m; ++k) {
    ComplexVector p(n);
    for (Eigen::Index i = 0; i < n; ++i) p(i) = scale * gaussian_complex(gen);
    const double len = p.norm();
    if (len > radius) p *= radius / len;
    plan.points.push_back(std::move(p));
  }
  return plan;
}

SamplePlan make_structured_plan(const AffineMap& phi, int extra,
                                std::uint64_t seed, double radius,
                                const std::optional<Tolerances>& tol) {
  if (extra < 0) throw InputError("make_structured_plan: extra must be >= 0");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw InputError("make_structured_plan: radius must be positive and finite");

  SamplePlan plan;
  plan.seed = seed;
  plan.radius = radius;
  plan.points.push_back(ComplexVector::Zero(phi.dim()));

  NormCertificate cert = composition_norm(phi, tol);
  if (cert.bounded && cert.w0) {
    const ComplexVector& w0 = *cert.w0;
    if (w0.norm() > 1e-14) {  // skip a w0 that duplicates the origin
      plan.points.push_back(w0);
      plan.radius = std::max(plan.radius, w0.norm());
    }
  }
  if (extra > 0) {
    SamplePlan gauss = make_plan(phi.dim(), extra, seed, radius);
    for (auto& p : gauss.points) plan.points.push_back(std::move(p));
  }
  if (static_cast<int>(plan.points.size()) > kMaxPlanPoints)
    throw InputError("make_structured_plan: plan exceeds the 32-point cap");
  return plan;
}

Complex bargmann_kernel(const ComplexVector& z, const ComplexVector& w) {
  if (z.size() != w.size()) throw DimensionError("bargmann_kernel: dimension mismatch");
  detail::require_finite(z, "bargmann_kernel");
  detail::require_finite(w, "bargmann_kernel");
  if (z.norm() * w.norm() > kKernelExponentGuard) {
    std::ostringstream os;
    os << "bargmann_kernel: |<z,w>| may reach " << z.norm() * w.norm()
       << ", beyond the exp overflow guard " << kKernelExponentGuard;
    throw RangeError(os.str());
  }
  const Complex ip = w.dot(z);  // conj(w)^T z = <z, w>
  return std::exp(ip);
}

ComplexMatrix phi_gram(const AffineMap& phi, double M, const SamplePlan& plan) {
  if (!(M >= 0.0) || !std::isfinite(M)) throw InputError("phi_gram: M must be >= 0");
  validate_plan(plan, phi.dim());
  const GramPair g = kernel_grams(phi, plan);
  return (M * M) * g.base - g.image;
}

PsdVerdict psd_certify(const AffineMap& phi, double M, const SamplePlan& plan,
                       const std::optional<Tolerances>& tol) {
  if (!(M >= 0.0) || !std::isfinite(M)) throw InputError("psd_certify: M must be >= 0");
  validate_plan(plan, phi.dim());
  const Tolerances t = tol ? *tol : Tolerances::for_dim(phi.dim());
  t.validate();

  const GramPair g = kernel_grams(phi, plan);
  PsdVerdict verdict{};
  verdict.psd = psd_from_grams(g, M, t.psd_tol, &verdict.min_eig, &verdict.gram_norm);
  verdict.threshold = t.psd_tol * std::max(1.0, verdict.gram_norm);
  return verdict;
}

double norm_lower_bound(const AffineMap& phi, const SamplePlan& plan,
                        double bisect_tol) {
  if (!(bisect_tol > 0.0) || !(bisect_tol < 1.0))
    throw InputError("norm_lower_bound: bisect_tol must lie in (0, 1)");
  validate_plan(plan, phi.dim());
  const Tolerances t = Tolerances::for_dim(phi.dim());

  // Single-point necessary condition gives the lower bracket.
  double sup_gap = -std::numeric_limits<double>::infinity();
  double sup_image_sq = 0.0;
  for (const auto& x : plan.points) {
    const ComplexVector fx = phi(x);
    sup_gap = std::max(sup_gap, fx.squaredNorm() - x.squaredNorm());
    sup_image_sq = std::max(sup_image_sq, fx.squaredNorm());
  }
  if (0.5 * sup_gap > kKernelExponentGuard)
    throw RangeError("norm_lower_bound: single-point bound overflows");

  const GramPair grams = kernel_grams(phi, plan);
  auto psd_at = [&](double M) { return psd_from_grams(grams, M, t.psd_tol); };

  const double max_base = grams.base.cwiseAbs().maxCoeff();
  const double m_cap = std::sqrt(std::numeric_limits<double>::max() / (2.0 * max_base));

  double lo = std::exp(0.5 * sup_gap);
  if (lo > m_cap)
    throw RangeError("norm_lower_bound: plan scale leaves no evaluable PSD level");
  if (psd_at(lo)) return lo;  // the necessary bound is already sufficient

  // Heuristic upper bracket; verified, and grown if the heuristic fails.
  double hi = std::exp(std::min(0.5 * sup_image_sq + 1.0, 700.0));
  hi = std::min(std::max(hi, lo * 2.0), m_cap);
  while (!psd_at(hi)) {
    hi *= std::numbers::e;
    if (hi > m_cap)
      throw RangeError("norm_lower_bound: no PSD level below the overflow cap");
  }

  while (hi / lo - 1.0 > bisect_tol) {
    const double mid = std::sqrt(lo * hi);  // bisection in log scale
    if (!(mid > lo) || !(mid < hi)) break;  // double resolution exhausted
    if (psd_at(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

QuadraticInfimum quadratic_form_infimum(const QuadraticKernelSpec& spec) {
  const Eigen::Index n = spec.T.rows();
  if (n < 1 || spec.T.cols() != n)
    throw DimensionError("quadratic_form_infimum: T must be square and nonempty");
  if (spec.u.size() != n)
    throw DimensionError("quadratic_form_infimum: u length must match T");
  if (!std::isfinite(spec.M)) throw InputError("quadratic_form_infimum: M must be finite");
  detail::require_finite(spec.T, "quadratic_form_infimum");
  detail::require_finite(spec.u, "quadratic_form_infimum");

  const Tolerances t = Tolerances::for_dim(n);
  const double t_scale = spec.T.norm();
  if ((spec.T - spec.T.adjoint()).norm() > t.rank_tol * std::max(1.0, t_scale))
    throw InputError("quadratic_form_infimum: T is not Hermitian within tolerance");

  EigResult eig = hermitian_eig(spec.T);
  const double lam_max = std::max(0.0, eig.eigenvalues.maxCoeff());
  const double band = t.rank_tol * std::max(1.0, lam_max);

  QuadraticInfimum out{};
  out.v = ComplexVector::Zero(n);
  out.inf = -std::numeric_limits<double>::infinity();
  out.psd_equiv = false;

  if (eig.eigenvalues.minCoeff() < -band) {
    out.bounded_below = false;  // T has a genuinely negative direction
    out.membership_residual = std::numeric_limits<double>::quiet_NaN();
    return out;
  }

  RealVector clamped = eig.eigenvalues.cwiseMax(0.0);
  for (Eigen::Index i = 0; i < clamped.size(); ++i)
    if (clamped(i) <= band) clamped(i) = 0.0;
  const ComplexMatrix Tsqrt = eig.eigenvectors * clamped.cwiseSqrt().asDiagonal() *
                              eig.eigenvectors.adjoint();

  LeastSquaresResult ls = min_norm_solve(0.5 * (Tsqrt + Tsqrt.adjoint()), spec.u, t);
  out.membership_residual = ls.residual;
  const bool member = ls.residual <= t.rank_tol * std::max(1.0, spec.u.norm());
  if (!member) {
    out.bounded_below = false;  // u escapes ran(T^{1/2}); the form dives linearly
    out.v = std::move(ls.x);
    return out;
  }

  out.bounded_below = true;
  out.v = std::move(ls.x);
  out.inf = -out.v.squaredNorm() + spec.M * spec.M;
  out.psd_equiv = out.v.norm() <= std::abs(spec.M) * (1.0 + 1e-12);
  return out;
}

}  // namespace fockop
