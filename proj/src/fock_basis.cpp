#include "fockop/fock_basis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace fockop {

namespace {

// C(n+d, d) without overflow; saturates at ~1.8e308.
double basis_cardinality(int n, int d) {
  double c = 1.0;
  for (int k = 1; k <= n; ++k) {
    c *= static_cast<double>(d + k) / static_cast<double>(k);
    if (c > 1e18) return c;  // already far beyond any cap
  }
  return c;
}

void append_degree_block(int n, int deg, std::vector<MultiIndex>& out) {
  // Descending lexicographic enumeration of compositions of deg into n parts.
  MultiIndex cur(static_cast<size_t>(n), 0);
  // Recursive lambda over the remaining slots.
  auto rec = [&](auto&& self, int slot, int remaining) -> void {
    if (slot == n - 1) {
      cur[static_cast<size_t>(slot)] = remaining;
      out.push_back(cur);
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      cur[static_cast<size_t>(slot)] = k;
      self(self, slot + 1, remaining - k);
    }
  };
  rec(rec, 0, deg);
}

// Exact factorials through 20! (fits in 64 bits; converted once to double).
constexpr int kExactFactMax = 20;
const double* exact_factorials() {
  static double table[kExactFactMax + 1];
  static bool init = [] {
    unsigned long long f = 1;
    table[0] = 1.0;
    for (int k = 1; k <= kExactFactMax; ++k) {
      f *= static_cast<unsigned long long>(k);
      table[k] = static_cast<double>(f);
    }
    return true;
  }();
  (void)init;
  return table;
}

// sqrt(beta! / alpha!) for the orthonormal rescaling of monomial columns.
double norm_ratio(const MultiIndex& beta, const MultiIndex& alpha) {
  bool small = true;
  for (int v : beta) small = small && v <= kExactFactMax;
  for (int v : alpha) small = small && v <= kExactFactMax;
  if (small) {
    double num = 1.0, den = 1.0;
    for (int v : beta) num *= exact_factorials()[v];
    for (int v : alpha) den *= exact_factorials()[v];
    return std::sqrt(num / den);
  }
  return std::exp(0.5 * (log_multi_factorial(beta) - log_multi_factorial(alpha)));
}

// Monomial-coordinate matrix of f -> f(Az+b): column t holds the monomial
// coefficients of z^{alpha_t} composed with phi. Built incrementally: the
// column for alpha is the column for alpha - e_i multiplied by the affine
// polynomial phi_i, so each degree block only touches the previous one.
ComplexMatrix monomial_composition_table(const AffineMap& phi,
                                         const TruncatedBasis& basis) {
  const int N = basis.size();
  const int n = basis.n();
  ComplexMatrix table = ComplexMatrix::Zero(N, N);
  table(0, 0) = Complex(1.0, 0.0);  // the constant polynomial is fixed

  for (int t = 1; t < N; ++t) {
    const MultiIndex& alpha = basis.index(t);
    int i = 0;
    while (alpha[static_cast<size_t>(i)] == 0) ++i;
    MultiIndex prev = alpha;
    --prev[static_cast<size_t>(i)];
    const int p = basis.position(prev);

    // column(t) = column(p) * (sum_j A(i,j) z_j + b(i))
    for (int row = 0; row < N; ++row) {
      const Complex c = table(row, p);
      if (c == Complex(0.0, 0.0)) continue;
      if (phi.b(i) != Complex(0.0, 0.0)) table(row, t) += c * phi.b(i);
      for (int j = 0; j < n; ++j) {
        if (phi.A(i, j) == Complex(0.0, 0.0)) continue;
        const int up = basis.bump(row, j);
        table(up, t) += c * phi.A(i, j);
      }
    }
  }
  return table;
}

}  // namespace

int degree(const MultiIndex& alpha) {
  return std::accumulate(alpha.begin(), alpha.end(), 0);
}

double factorial(int k) {
  if (k < 0) throw InputError("factorial: negative argument");
  if (k <= kExactFactMax) return exact_factorials()[k];
  return std::exp(std::lgamma(static_cast<double>(k) + 1.0));
}

double log_factorial(int k) {
  if (k < 0) throw InputError("log_factorial: negative argument");
  if (k <= kExactFactMax) return std::log(exact_factorials()[k]);
  return std::lgamma(static_cast<double>(k) + 1.0);
}

double log_multi_factorial(const MultiIndex& alpha) {
  double s = 0.0;
  for (int v : alpha) s += log_factorial(v);
  return s;
}

TruncatedBasis::TruncatedBasis(int n, int d) : n_(n), d_(d) {
  if (n < 1) throw DimensionError("TruncatedBasis: need n >= 1");
  if (d < 0) throw InputError("TruncatedBasis: need d >= 0");

  degree_start_.reserve(static_cast<size_t>(d) + 2);
  for (int deg = 0; deg <= d; ++deg) {
    degree_start_.push_back(static_cast<int>(indices_.size()));
    append_degree_block(n, deg, indices_);
  }
  degree_start_.push_back(static_cast<int>(indices_.size()));

  bump_.assign(indices_.size(), std::vector<int>(static_cast<size_t>(n), -1));
  std::map<MultiIndex, int> pos;
  for (size_t i = 0; i < indices_.size(); ++i) pos[indices_[i]] = static_cast<int>(i);
  for (size_t i = 0; i < indices_.size(); ++i) {
    MultiIndex up = indices_[i];
    for (int j = 0; j < n; ++j) {
      ++up[static_cast<size_t>(j)];
      auto it = pos.find(up);
      bump_[i][static_cast<size_t>(j)] = it == pos.end() ? -1 : it->second;
      --up[static_cast<size_t>(j)];
    }
  }
  positions_ = std::move(pos);
}

int TruncatedBasis::position(const MultiIndex& alpha) const {
  auto it = positions_.find(alpha);
  return it == positions_.end() ? -1 : it->second;
}

std::shared_ptr<const TruncatedBasis> enumerate_basis(int n, int d) {
  if (n < 1) throw DimensionError("enumerate_basis: need n >= 1");
  if (d < 0) throw InputError("enumerate_basis: need d >= 0");
  const double card = basis_cardinality(n, d);
  if (card > 2e6) {
    std::ostringstream os;
    os << "enumerate_basis: basis of size ~" << card << " exceeds the 2e6 cap";
    throw ResourceError(os.str());
  }
  return std::make_shared<const TruncatedBasis>(n, d);
}

Complex poly_inner(const PolyCoeffs& f, const PolyCoeffs& g) {
  if (!f.basis || !g.basis) throw InputError("poly_inner: missing basis");
  if (f.basis->n() != g.basis->n() || f.basis->d() != g.basis->d())
    throw DimensionError("poly_inner: operands use different bases");
  if (f.coeffs.size() != f.basis->size() || g.coeffs.size() != g.basis->size())
    throw DimensionError("poly_inner: coefficient length mismatch");

  Complex acc(0.0, 0.0);
  const int N = f.basis->size();
  for (int i = 0; i < N; ++i) {
    const MultiIndex& alpha = f.basis->index(i);
    double w = 1.0;
    bool small = true;
    for (int v : alpha) small = small && v <= kExactFactMax;
    if (small) {
      for (int v : alpha) w *= exact_factorials()[v];
    } else {
      w = std::exp(log_multi_factorial(alpha));
    }
    acc += w * f.coeffs(i) * std::conj(g.coeffs(i));
  }
  return acc;
}

PolyCoeffs compose_poly(const AffineMap& phi, const PolyCoeffs& f) {
  if (!f.basis) throw InputError("compose_poly: missing basis");
  if (phi.dim() != f.basis->n())
    throw DimensionError("compose_poly: map dimension does not match basis");
  if (f.coeffs.size() != f.basis->size())
    throw DimensionError("compose_poly: coefficient length mismatch");

  const ComplexMatrix table = monomial_composition_table(phi, *f.basis);
  return {f.basis, table * f.coeffs};
}

ComplexMatrix matrix_of_composition(const AffineMap& phi, int d) {
  auto basis = enumerate_basis(static_cast<int>(phi.dim()), d);
  const ComplexMatrix table = monomial_composition_table(phi, *basis);

  const int N = basis->size();
  ComplexMatrix M = ComplexMatrix::Zero(N, N);
  for (int col = 0; col < N; ++col) {
    const MultiIndex& alpha = basis->index(col);
    for (int row = 0; row < N; ++row) {
      const Complex c = table(row, col);
      if (c == Complex(0.0, 0.0)) {
        // keep exact zeros exact: the block structure for b = 0 is bitwise
        continue;
      }
      M(row, col) = c * norm_ratio(basis->index(row), alpha);
    }
  }
  return M;
}

double truncated_norm(const AffineMap& phi, int d) {
  return spectral_norm(matrix_of_composition(phi, d));
}

double homogeneous_block_norm(const ComplexMatrix& A, int m) {
  if (A.rows() < 1 || A.rows() != A.cols())
    throw DimensionError("homogeneous_block_norm: A must be square");
  if (m < 0) throw InputError("homogeneous_block_norm: need m >= 0");
  const AffineMap phi(A, ComplexVector::Zero(A.rows()));
  auto basis = enumerate_basis(static_cast<int>(A.rows()), m);
  const ComplexMatrix M = matrix_of_composition(phi, m);
  const int lo = basis->degree_start(m);
  const int sz = basis->size() - lo;
  return spectral_norm(M.block(lo, lo, sz, sz));
}

PolyCoeffs kernel_section(const ComplexVector& w,
                          std::shared_ptr<const TruncatedBasis> basis) {
  if (!basis) throw InputError("kernel_section: missing basis");
  if (w.size() != basis->n())
    throw DimensionError("kernel_section: point dimension does not match basis");
  detail::require_finite(w, "kernel_section");

  const int N = basis->size();
  ComplexVector c(N);
  for (int i = 0; i < N; ++i) {
    const MultiIndex& alpha = basis->index(i);
    Complex num(1.0, 0.0);
    double denom_log = 0.0;
    bool small = true;
    for (int v : alpha) small = small && v <= kExactFactMax;
    for (int j = 0; j < basis->n(); ++j) {
      for (int k = 0; k < alpha[static_cast<size_t>(j)]; ++k) num *= std::conj(w(j));
    }
    if (small) {
      double denom = 1.0;
      for (int v : alpha) denom *= exact_factorials()[v];
      c(i) = num / denom;
    } else {
      denom_log = log_multi_factorial(alpha);
      c(i) = num * std::exp(-denom_log);
    }
  }
  return {std::move(basis), std::move(c)};
}

Complex evaluate_poly(const PolyCoeffs& f, const ComplexVector& w) {
  if (!f.basis) throw InputError("evaluate_poly: missing basis");
  if (w.size() != f.basis->n())
    throw DimensionError("evaluate_poly: point dimension does not match basis");
  if (f.coeffs.size() != f.basis->size())
    throw DimensionError("evaluate_poly: coefficient length mismatch");

  // Power table w_j^k, k <= d.
  const int n = f.basis->n();
  const int d = f.basis->d();
  ComplexMatrix pow(n, d + 1);
  for (int j = 0; j < n; ++j) {
    pow(j, 0) = Complex(1.0, 0.0);
    for (int k = 1; k <= d; ++k) pow(j, k) = pow(j, k - 1) * w(j);
  }
  Complex acc(0.0, 0.0);
  for (int i = 0; i < f.basis->size(); ++i) {
    if (f.coeffs(i) == Complex(0.0, 0.0)) continue;
    const MultiIndex& alpha = f.basis->index(i);
    Complex mono(1.0, 0.0);
    for (int j = 0; j < n; ++j) mono *= pow(j, alpha[static_cast<size_t>(j)]);
    acc += f.coeffs(i) * mono;
  }
  return acc;
}

std::pair<Complex, Complex> reproducing_check(const ComplexVector& w,
                                              const PolyCoeffs& f) {
  PolyCoeffs kw = kernel_section(w, f.basis);
  return {poly_inner(f, kw), evaluate_poly(f, w)};
}

}  // namespace fockop
