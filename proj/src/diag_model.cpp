#include "fockop/diag_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fockop {

namespace {

constexpr double kUnitBand = 1e-14;  // |alpha|^2 within this of 1 counts as 1

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

Complex eval_alpha(const DiagonalModel& model, int m) {
  const Complex a = model.alpha(m);
  if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
    throw InputError("diagonal model: alpha generator produced a non-finite value");
  if (std::abs(a) > 1.0 + kUnitBand) {
    std::ostringstream os;
    os << "diagonal model: |alpha_" << m << "| = " << std::abs(a) << " exceeds 1";
    throw InputError(os.str());
  }
  return a;
}

Complex eval_b(const DiagonalModel& model, int m) {
  const Complex b = model.bcoef(m);
  if (!std::isfinite(b.real()) || !std::isfinite(b.imag()))
    throw InputError("diagonal model: b generator produced a non-finite value");
  return b;
}

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t k = x.size();
  if (k < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < k; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < k; ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return den > 0.0 ? num / den : 0.0;
}

struct TailEstimate {
  bool all_zero = false;
  bool summable = false;   // geometric or p > 1 evidence over the tail
  double max_ratio = 0.0;  // max successive ratio of nonzero tail terms
  double p_hat = 0.0;      // power-law decay exponent fit
  double bound = 0.0;      // conservative estimate of the dropped tail
};

// Tail diagnostics over terms[tail_start-1 .. N-1] (1-based m). The reported
// bound takes the larger of the geometric estimate t_N * r / (1 - r) and the
// integral estimate t_N * N / (p - 1): p-series tails drift their ratios
// toward 1 beyond the horizon, so the geometric estimate alone understates.
TailEstimate tail_estimate(const std::vector<double>& terms, int tail_start, int N) {
  TailEstimate est;

  bool any = false;
  double max_ratio = 0.0;
  bool ratio_valid = false;
  double prev = -1.0;
  std::vector<double> lx, ly;
  for (int m = tail_start; m <= N; ++m) {
    const double t = terms[static_cast<size_t>(m - 1)];
    if (t > 0.0) {
      any = true;
      lx.push_back(std::log(static_cast<double>(m)));
      ly.push_back(std::log(t));
      if (prev > 0.0) {
        max_ratio = std::max(max_ratio, t / prev);
        ratio_valid = true;
      }
      prev = t;
    } else if (prev > 0.0) {
      prev = -1.0;  // a zero breaks the ratio chain
    }
  }
  if (!any) {
    est.all_zero = true;
    est.summable = true;
    return est;
  }

  est.max_ratio = max_ratio;
  if (lx.size() >= 3) est.p_hat = -fit_slope(lx, ly);

  const double last = terms[static_cast<size_t>(N - 1)];
  double geo = -1.0, pow_bound = -1.0;
  if (ratio_valid && max_ratio <= 0.999)
    geo = last * max_ratio / (1.0 - max_ratio);
  if (est.p_hat >= 1.05)
    pow_bound = last * static_cast<double>(N) / (est.p_hat - 1.0);

  if (geo >= 0.0 || pow_bound >= 0.0) {
    est.summable = true;
    est.bound = std::max(geo, pow_bound);
  }
  return est;
}

}  // namespace

std::string to_string(SeriesVerdict v) {
  switch (v) {
    case SeriesVerdict::converging: return "converging";
    case SeriesVerdict::diverging: return "diverging";
    case SeriesVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

DiagonalModel counterexample_model() {
  DiagonalModel m;
  m.alpha = [](int k) {
    const double s = 0.5 / (static_cast<double>(k) * k * k);  // 1 - alpha^2
    return Complex(std::sqrt(1.0 - s), 0.0);
  };
  m.bcoef = [](int k) { return Complex(1.0 / static_cast<double>(k), 0.0); };
  return m;
}

DiagonalModel constant_model(Complex a) {
  if (std::abs(a) > 1.0 + kUnitBand)
    throw InputError("constant_model: |a| must be <= 1");
  DiagonalModel m;
  m.alpha = [a](int) { return a; };
  m.bcoef = [](int k) { return Complex(1.0 / static_cast<double>(k), 0.0); };
  return m;
}

DiagonalModel geometric_model(double r) {
  if (!(std::abs(r) <= 1.0))
    throw InputError("geometric_model: |r| must be <= 1");
  DiagonalModel m;
  m.alpha = [r](int k) { return Complex(std::pow(r, k), 0.0); };
  m.bcoef = [](int k) { return Complex(1.0 / static_cast<double>(k), 0.0); };
  return m;
}

SeriesResult series_criterion(const DiagonalModel& model, int N,
                              double divergence_threshold) {
  if (N < 1) throw InputError("series_criterion: horizon must be >= 1");
  if (!(divergence_threshold > 0.0))
    throw InputError("series_criterion: divergence threshold must be positive");

  SeriesResult res;
  res.partial_sums.reserve(static_cast<size_t>(N));
  std::vector<double> terms(static_cast<size_t>(N), 0.0);

  KahanSum acc;
  for (int m = 1; m <= N; ++m) {
    const Complex a = eval_alpha(model, m);
    const Complex b = eval_b(model, m);
    const double asq = std::norm(a);
    const double prod_sq = std::norm(a * b);
    double term;
    if (asq >= 1.0 - kUnitBand) {
      if (prod_sq > 0.0) {
        res.verdict = SeriesVerdict::diverging;
        std::ostringstream os;
        os << "term " << m << " is infinite: |alpha| = 1 with alpha*b != 0";
        res.diagnostic = os.str();
        res.final_sum = std::numeric_limits<double>::infinity();
        res.partial_sums.push_back(res.final_sum);
        return res;
      }
      term = 0.0;  // drop rule: unit alpha with alpha*b = 0 contributes nothing
    } else {
      term = prod_sq / (1.0 - asq);
    }
    terms[static_cast<size_t>(m - 1)] = term;
    acc.add(term);
    res.partial_sums.push_back(acc.sum);
  }
  res.final_sum = acc.sum;

  // Divergence: absolute threshold, then the growth exponent of the partial
  // sums over the last half of the horizon.
  if (res.final_sum > divergence_threshold) {
    res.verdict = SeriesVerdict::diverging;
    res.diagnostic = "partial sum exceeds the divergence threshold";
    return res;
  }
  if (N >= 4) {
    std::vector<double> lx, ly;
    for (int m = N / 2; m <= N; ++m) {
      const double s = res.partial_sums[static_cast<size_t>(m - 1)];
      if (s > 0.0) {
        lx.push_back(std::log(static_cast<double>(m)));
        ly.push_back(std::log(s));
      }
    }
    res.growth_exponent = fit_slope(lx, ly);
    if (lx.size() >= 3 && res.growth_exponent >= 0.9) {
      res.verdict = SeriesVerdict::diverging;
      std::ostringstream os;
      os << "partial sums grow like m^" << res.growth_exponent
         << " over the last half";
      res.diagnostic = os.str();
      return res;
    }
  }

  const TailEstimate tail = tail_estimate(terms, std::max(1, N / 2), N);
  res.tail_ratio = tail.max_ratio;
  res.decay_exponent = tail.p_hat;
  if (tail.all_zero) {
    res.verdict = SeriesVerdict::converging;
    res.tail_bound = 0.0;
    res.diagnostic = "tail terms vanish";
    return res;
  }
  if (tail.summable) {
    res.verdict = SeriesVerdict::converging;
    res.tail_bound = tail.bound;
    std::ostringstream os;
    os << "tail summable (max ratio " << tail.max_ratio << ", decay exponent "
       << tail.p_hat << ")";
    res.diagnostic = os.str();
    return res;
  }

  res.verdict = SeriesVerdict::inconclusive;
  res.diagnostic =
      "tail neither clearly summable nor clearly divergent at this horizon";
  return res;
}

DiagNormResult diag_norm(const DiagonalModel& model, int N) {
  SeriesResult series = series_criterion(model, N);

  DiagNormResult out;
  out.verdict = series.verdict;
  out.series_sum = series.final_sum;

  std::vector<double> bterms(static_cast<size_t>(N), 0.0);
  KahanSum bsq;
  for (int m = 1; m <= N; ++m) {
    const double t = std::norm(eval_b(model, m));
    bterms[static_cast<size_t>(m - 1)] = t;
    bsq.add(t);
  }
  out.b_norm_sq = bsq.sum;

  if (series.verdict == SeriesVerdict::diverging) {
    out.diagnostic = "series diverges; the operator is unbounded: " + series.diagnostic;
    return out;
  }
  if (series.verdict == SeriesVerdict::inconclusive) {
    out.diagnostic = "series verdict inconclusive; refusing to report a norm: " +
                     series.diagnostic;
    return out;
  }

  const TailEstimate b_tail = tail_estimate(bterms, std::max(1, N / 2), N);
  if (!b_tail.summable) {
    out.verdict = SeriesVerdict::inconclusive;
    out.diagnostic =
        "cannot certify square-summability of the shift coefficients at this "
        "horizon; refusing to report a norm";
    return out;
  }
  // The two bounds cap the truncation error of the exponent
  // (series sum + shift norm squared) / 2.
  out.tail_bound = 0.5 * series.tail_bound + 0.5 * b_tail.bound;
  const double exponent = 0.5 * series.final_sum + 0.5 * bsq.sum;
  if (exponent > 700.0) {
    std::ostringstream os;
    os << "norm = exp(" << exponent
       << ") exceeds the double range; series sum and shift norm are reported";
    out.diagnostic = os.str();
    return out;
  }
  out.norm = std::exp(exponent);
  return out;
}

GapResult counterexample_gap(const DiagonalModel& model, int m) {
  if (m < 1) throw InputError("counterexample_gap: index must be >= 1");
  const Complex a = eval_alpha(model, m);
  const Complex b = eval_b(model, m);
  if (std::abs(a.imag()) > 1e-15 || a.real() < 0.0)
    throw InputError("counterexample_gap: construction expects real alpha_m >= 0");
  if (std::abs(b - Complex(1.0 / static_cast<double>(m), 0.0)) > 1e-12)
    throw InputError("counterexample_gap: construction expects b_m = 1/m");

  const double alpha = a.real();
  const double s = 1.0 - alpha * alpha;  // defect of the m-th coordinate
  if (s <= 0.0)
    throw InputError("counterexample_gap: construction expects |alpha_m| < 1");
  const double bm = b.real();

  GapResult res;
  res.t_m = alpha * bm / s;
  // (t alpha + b)^2 - t^2 expanded: -s t^2 + 2 t alpha b + b^2. The expanded
  // form avoids the catastrophic cancellation of the difference of squares
  // (t^2 ~ 4 m^4 while the gap is ~2m for the canonical family).
  res.gap = -s * res.t_m * res.t_m + 2.0 * res.t_m * alpha * bm + bm * bm;
  return res;
}

}  // namespace fockop
