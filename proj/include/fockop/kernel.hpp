#pragma once

// Sampled positive-semidefiniteness tests for the norm criterion: the
// operator with affine symbol phi has norm <= M exactly when the kernel
// M^2 exp(<z,w>) - exp(<phi(z), phi(w)>) is PSD. Finite sample plans give
// sound lower bounds: a non-PSD Gram at level M proves the norm exceeds M.

#include <cstdint>
#include <vector>

#include "fockop/affine.hpp"
#include "fockop/linalg.hpp"

namespace fockop {

/// Evaluation points for Gram matrices. Invariant: every point has norm
/// <= radius and the plan is nonempty wherever a Gram is requested.
struct SamplePlan {
  std::vector<ComplexVector> points;
  std::uint64_t seed = 0;
  double radius = 0.0;
};

inline constexpr int kMaxPlanPoints = 32;
inline constexpr double kKernelExponentGuard = 700.0;  // exp stays finite

/// m Gaussian complex points (Box-Muller over mt19937_64, reproducible
/// across platforms), clamped to the radius ball.
SamplePlan make_plan(Eigen::Index n, int m, std::uint64_t seed, double radius);

/// Structured plan: 0 first, then w0 when the symbol is bounded with a
/// defect solution (deduplicated), then `extra` Gaussian points. The plan
/// radius widens to ||w0|| when necessary.
SamplePlan make_structured_plan(const AffineMap& phi, int extra,
                                std::uint64_t seed, double radius,
                                const std::optional<Tolerances>& tol = std::nullopt);

/// exp(<z, w>) with <z, w> = sum_i z_i conj(w_i). Throws RangeError when
/// ||z||*||w|| exceeds the exponent guard.
Complex bargmann_kernel(const ComplexVector& z, const ComplexVector& w);

/// Hermitian Gram G[l][j] = M^2 K(x_l, x_j) - K(phi(x_l), phi(x_j)).
ComplexMatrix phi_gram(const AffineMap& phi, double M, const SamplePlan& plan);

struct PsdVerdict {
  bool psd;
  double min_eig;
  double gram_norm;
  double threshold;  // min_eig >= -threshold was the test
};

/// PSD test of the sampled Gram at level M. psd = false soundly certifies
/// that the operator norm exceeds M; psd = true is evidence, not proof.
PsdVerdict psd_certify(const AffineMap& phi, double M, const SamplePlan& plan,
                       const std::optional<Tolerances>& tol = std::nullopt);

/// Smallest M whose sampled Gram is PSD, located by bisection in log scale.
/// Bracket: below by the single-point bound exp(max(||phi(x)||^2 - ||x||^2)/2),
/// above by a scale that is verified PSD (grown if the heuristic fails).
/// Result is within a factor (1 + bisect_tol) of the plan threshold, hence
/// <= operator norm * (1 + bisect_tol) for bounded symbols. Plans containing
/// w0 make the threshold equal the operator norm exactly.
double norm_lower_bound(const AffineMap& phi, const SamplePlan& plan,
                        double bisect_tol);

/// Quadratic kernel F(z, w) = <Tz, w> - <z, u> - <u, w> + M^2.
struct QuadraticKernelSpec {
  ComplexMatrix T;
  ComplexVector u;
  double M = 0.0;
};

struct QuadraticInfimum {
  bool bounded_below;       // T is PSD and u lies in ran(T^{1/2})
  double inf;               // -||v||^2 + M^2 when bounded below
  ComplexVector v;          // minimal-norm solution of T^{1/2} v = u
  bool psd_equiv;           // ||v|| <= |M|: F is a PSD kernel
  double membership_residual;
};

/// Closed-form infimum of the diagonal F(z, z). Unbounded below when T has a
/// negative eigenvalue or u leaves ran(T^{1/2}).
QuadraticInfimum quadratic_form_infimum(const QuadraticKernelSpec& spec);

}  // namespace fockop
