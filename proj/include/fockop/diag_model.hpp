#pragma once

// Diagonal symbols on infinitely many variables, phi(z)_m = alpha_m z_m + b_m,
// probed through finite horizons. Boundedness is governed by the series
// sum |alpha_m b_m|^2 / (1 - |alpha_m|^2); the canonical family with
// alpha_m^2 = 1 - m^-3/2 and b_m = 1/m diverges even though every finite
// truncation is bounded and the kernel-orthogonality condition is vacuous.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fockop/linalg.hpp"

namespace fockop {

/// Sequence generators are indexed from m = 1. |alpha_m| <= 1 is enforced
/// at evaluation time.
struct DiagonalModel {
  std::function<Complex(int)> alpha;
  std::function<Complex(int)> bcoef;
};

/// alpha_m = sqrt(1 - m^-3 / 2), b_m = 1/m. Gap has the closed form 2m.
DiagonalModel counterexample_model();
/// alpha_m = a constant, b_m = 1/m.
DiagonalModel constant_model(Complex a);
/// alpha_m = r^m, b_m = 1/m. Requires |r| <= 1.
DiagonalModel geometric_model(double r);

enum class SeriesVerdict { converging, diverging, inconclusive };

std::string to_string(SeriesVerdict v);

struct SeriesResult {
  std::vector<double> partial_sums;  // S_1 .. S_N, compensated summation
  double final_sum = 0.0;
  SeriesVerdict verdict = SeriesVerdict::inconclusive;
  double growth_exponent = 0.0;  // log-log slope of S over the last half
  double tail_ratio = 0.0;       // max successive term ratio over the tail
  double decay_exponent = 0.0;   // power-law fit of the tail terms
  double tail_bound = 0.0;       // bound on the dropped tail when converging
  std::string diagnostic;
};

/// Partial sums of sum |alpha_m b_m|^2 / (1 - |alpha_m|^2) up to horizon N
/// with a three-way verdict. Terms with |alpha_m| = 1 are +inf unless
/// alpha_m b_m = 0, in which case they contribute 0 and are dropped.
/// Diverging: an infinite term, S_N beyond the threshold, or growth exponent
/// >= 0.9 over the last half. Converging: tail terms decay geometrically or
/// are dominated by a p-series with p > 1. Otherwise inconclusive.
SeriesResult series_criterion(const DiagonalModel& model, int N,
                              double divergence_threshold = 1e6);

struct DiagNormResult {
  SeriesVerdict verdict = SeriesVerdict::inconclusive;
  std::optional<double> norm;  // exp(S_N/2 + sum|b_m|^2/2); absent otherwise
  double series_sum = 0.0;
  double b_norm_sq = 0.0;
  double tail_bound = 0.0;  // additive bound on the dropped exponent tail
  std::string diagnostic;
};

/// Norm of the horizon-N model when the series verdict is converging.
/// Diverging yields an unbounded verdict (norm absent); inconclusive refuses
/// with a diagnostic (norm absent). Never throws on a verdict.
DiagNormResult diag_norm(const DiagonalModel& model, int N);

struct GapResult {
  double t_m = 0.0;  // alpha_m (1 - alpha_m^2)^{-1} m^{-1}
  double gap = 0.0;  // (t_m alpha_m + b_m)^2 - t_m^2
};

/// Single-coordinate norm gap of the b_m = 1/m construction at the scaled
/// basis vector t_m v_m: gap = (t_m alpha_m + b_m)^2 - t_m^2, evaluated in
/// the cancellation-free expanded form. The full-space difference
/// ||phi(t_m v_m)||^2 - ||t_m v_m||^2 equals this gap plus the nonnegative
/// cross-term sum_{k != m} |b_k|^2, so gap > m already certifies the
/// unboundedness mechanism. Closed form for the canonical family: 2m.
/// Requires real alpha_m in [0, 1) and b_m = 1/m.
GapResult counterexample_gap(const DiagonalModel& model, int m);

}  // namespace fockop
