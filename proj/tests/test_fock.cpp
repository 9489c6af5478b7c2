#include <cmath>

#include <doctest.h>

#include "fockop/affine.hpp"
#include "fockop/errors.hpp"
#include "fockop/fock_basis.hpp"
#include "support/oracles.hpp"

using namespace fockop;
namespace ts = testsupport;

namespace {

AffineMap scalar_map(Complex a, Complex b) {
  ComplexMatrix A(1, 1);
  A(0, 0) = a;
  ComplexVector bv(1);
  bv(0) = b;
  return AffineMap(A, bv);
}

PolyCoeffs random_poly(std::shared_ptr<const TruncatedBasis> basis,
                       std::mt19937_64& g) {
  PolyCoeffs f{std::move(basis), ComplexVector()};
  f.coeffs = ts::gauss_vec(g, f.basis->size());
  return f;
}

}  // namespace

TEST_SUITE("fock") {

TEST_CASE("enumerate_basis: order, size, degree blocks") {
  auto b21 = enumerate_basis(2, 1);
  REQUIRE(b21->size() == 3);
  CHECK(b21->index(0) == MultiIndex{0, 0});
  CHECK(b21->index(1) == MultiIndex{1, 0});
  CHECK(b21->index(2) == MultiIndex{0, 1});

  auto b13 = enumerate_basis(1, 3);
  REQUIRE(b13->size() == 4);
  for (int k = 0; k <= 3; ++k) CHECK(b13->index(k) == MultiIndex{k});

  CHECK(enumerate_basis(3, 2)->size() == 10);  // C(5, 2)

  auto b32 = enumerate_basis(3, 2);
  CHECK(b32->degree_start(0) == 0);
  CHECK(b32->degree_start(1) == 1);
  CHECK(b32->degree_start(2) == 4);
  CHECK(b32->degree_start(3) == 10);
  CHECK(b32->position(MultiIndex{0, 1, 1}) >= 4);
  CHECK(b32->position(MultiIndex{3, 0, 0}) == -1);

  CHECK_THROWS_AS(enumerate_basis(30, 12), ResourceError);
}

TEST_CASE("poly_inner: monomial norms and orthogonality") {
  auto basis = enumerate_basis(2, 3);
  PolyCoeffs one{basis, ComplexVector::Zero(basis->size())};
  one.coeffs(0) = 1.0;
  CHECK(std::abs(poly_inner(one, one) - Complex(1.0, 0.0)) <= 1e-15);

  // <z1^2 z2, z1^2 z2> = 2! 1! = 2.
  PolyCoeffs m{basis, ComplexVector::Zero(basis->size())};
  const int pos = basis->position(MultiIndex{2, 1});
  REQUIRE(pos >= 0);
  m.coeffs(pos) = 1.0;
  CHECK(std::abs(poly_inner(m, m) - Complex(2.0, 0.0)) <= 1e-15);

  PolyCoeffs z1{basis, ComplexVector::Zero(basis->size())};
  z1.coeffs(basis->position(MultiIndex{1, 0})) = 1.0;
  PolyCoeffs z2{basis, ComplexVector::Zero(basis->size())};
  z2.coeffs(basis->position(MultiIndex{0, 1})) = 1.0;
  CHECK(std::abs(poly_inner(z1, z2)) <= 1e-15);
}

TEST_CASE("compose_poly: shift and scaling in one variable") {
  auto basis = enumerate_basis(1, 3);

  // Identity leaves coefficients alone.
  auto g = ts::rng(31);
  PolyCoeffs f = random_poly(basis, g);
  const AffineMap id(ComplexMatrix::Identity(1, 1), ComplexVector::Zero(1));
  const PolyCoeffs fid = compose_poly(id, f);
  CHECK((fid.coeffs - f.coeffs).norm() <= 1e-15);

  // f = z, phi(z) = z + b: coefficients {0: b, 1: 1}.
  PolyCoeffs z{basis, ComplexVector::Zero(4)};
  z.coeffs(1) = 1.0;
  const PolyCoeffs shifted = compose_poly(scalar_map(1.0, 0.75), z);
  CHECK(std::abs(shifted.coeffs(0) - Complex(0.75, 0.0)) <= 1e-15);
  CHECK(std::abs(shifted.coeffs(1) - Complex(1.0, 0.0)) <= 1e-15);

  // f = z^3, phi(z) = a z: coefficient a^3 on z^3.
  PolyCoeffs z3{basis, ComplexVector::Zero(4)};
  z3.coeffs(3) = 1.0;
  const Complex a(0.4, 0.3);
  const PolyCoeffs scaled = compose_poly(scalar_map(a, 0.0), z3);
  CHECK(std::abs(scaled.coeffs(3) - a * a * a) <= 1e-15);
  CHECK(std::abs(scaled.coeffs(0)) + std::abs(scaled.coeffs(1)) +
            std::abs(scaled.coeffs(2)) <=
        1e-15);
}

TEST_CASE("compose_poly: matches pointwise evaluation on random input") {
  auto g = ts::rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(g() % 3);
    const int d = 2 + static_cast<int>(g() % 4);
    auto basis = enumerate_basis(n, d);
    const PolyCoeffs f = random_poly(basis, g);
    const AffineMap phi(0.6 * ts::gauss_mat(g, n), 0.5 * ts::gauss_vec(g, n));
    const PolyCoeffs composed = compose_poly(phi, f);
    for (int probe = 0; probe < 4; ++probe) {
      const ComplexVector z = ts::gauss_vec(g, n);
      const Complex direct = evaluate_poly(f, phi(z));
      const Complex via = evaluate_poly(composed, z);
      CHECK(std::abs(direct - via) <= 1e-10 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST_CASE("matrix_of_composition: known matrices") {
  // phi(z) = a z in one variable: diagonal powers.
  const Complex a(0.3, 0.4);
  const ComplexMatrix M = matrix_of_composition(scalar_map(a, 0.0), 3);
  REQUIRE(M.rows() == 4);
  for (int i = 0; i <= 3; ++i)
    for (int j = 0; j <= 3; ++j) {
      const Complex expected = i == j ? std::pow(a, i) : Complex(0.0, 0.0);
      CHECK(std::abs(M(i, j) - expected) <= 1e-14);
    }

  // Identity symbol at any degree: identity matrix, exactly.
  const AffineMap id(ComplexMatrix::Identity(2, 2), ComplexVector::Zero(2));
  const ComplexMatrix I = matrix_of_composition(id, 4);
  CHECK((I - ComplexMatrix::Identity(I.rows(), I.cols())).norm() == 0.0);

  // Degree-1 block structure: row f_0 of column f_{e_j} is b_j, and the
  // linear block is A transposed in the orthonormal coordinates.
  auto g = ts::rng(33);
  const ComplexMatrix A = ts::gauss_mat(g, 3);
  const ComplexVector b = ts::gauss_vec(g, 3);
  const ComplexMatrix M1 = matrix_of_composition(AffineMap(A, b), 1);
  REQUIRE(M1.rows() == 4);
  CHECK(std::abs(M1(0, 0) - Complex(1.0, 0.0)) <= 1e-15);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(M1(0, 1 + j) - b(j)) <= 1e-15);
    CHECK(std::abs(M1(1 + j, 0)) <= 1e-15);
    for (int i = 0; i < 3; ++i)
      CHECK(std::abs(M1(1 + i, 1 + j) - A(j, i)) <= 1e-15);
  }
}

TEST_CASE("matrix_of_composition: factorization over random pairs") {
  auto g = ts::rng(34);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 1 + static_cast<int>(g() % 3);
    const int d = 2 + static_cast<int>(g() % 5);
    const AffineMap phi1(0.8 * ts::gauss_mat(g, n), 0.5 * ts::gauss_vec(g, n));
    const AffineMap phi2(0.8 * ts::gauss_mat(g, n), 0.5 * ts::gauss_vec(g, n));
    const ComplexMatrix lhs = matrix_of_composition(compose(phi2, phi1), d);
    const ComplexMatrix rhs =
        matrix_of_composition(phi1, d) * matrix_of_composition(phi2, d);
    const double scale = std::max(1.0, lhs.cwiseAbs().maxCoeff());
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-11 * scale);
  }
}

TEST_CASE("matrix_of_composition: exact block diagonality when b = 0") {
  auto g = ts::rng(35);
  const int n = 2, d = 5;
  const ComplexMatrix A = ts::gauss_mat(g, n);
  const AffineMap phi(A, ComplexVector::Zero(n));
  const ComplexMatrix M = matrix_of_composition(phi, d);
  auto basis = enumerate_basis(n, d);
  for (int i = 0; i < basis->size(); ++i)
    for (int j = 0; j < basis->size(); ++j)
      if (degree(basis->index(i)) != degree(basis->index(j)))
        CHECK(M(i, j) == Complex(0.0, 0.0));  // exact zero, not approximate
}

TEST_CASE("matrix transfer of isometry and normality") {
  auto g = ts::rng(36);
  const int n = 3, d = 4;
  const ComplexMatrix U = ts::haar_unitary(g, n);
  const ComplexMatrix MU =
      matrix_of_composition(AffineMap(U, ComplexVector::Zero(n)), d);
  CHECK((MU.adjoint() * MU - ComplexMatrix::Identity(MU.rows(), MU.cols()))
            .norm() <= 1e-10);

  // Normal non-unitary A: diagonal with distinct moduli.
  ComplexMatrix D = ComplexMatrix::Zero(n, n);
  D(0, 0) = Complex(0.5, 0.0);
  D(1, 1) = Complex(0.0, 0.7);
  D(2, 2) = Complex(0.3, 0.3);
  const ComplexMatrix MD =
      matrix_of_composition(AffineMap(D, ComplexVector::Zero(n)), d);
  CHECK((MD.adjoint() * MD - MD * MD.adjoint()).norm() <= 1e-10);
}

TEST_CASE("truncated_norm: identity is exactly 1; contraction converges") {
  const AffineMap id(ComplexMatrix::Identity(2, 2), ComplexVector::Zero(2));
  for (int d = 1; d <= 6; ++d) CHECK(truncated_norm(id, d) == 1.0);

  // a = b = 1/2: nondecreasing toward exp(1/6).
  const AffineMap half = scalar_map(0.5, 0.5);
  const double target = std::exp(1.0 / 6.0);
  double prev = 0.0;
  double last = 0.0;
  for (int d = 1; d <= 16; ++d) {
    last = truncated_norm(half, d);
    CHECK(last >= prev - 1e-14);
    CHECK(last <= target * (1.0 + 1e-8));
    prev = last;
  }
  CHECK(last == doctest::Approx(target).epsilon(1e-3));
}

TEST_CASE("truncated_norm: divergence witness for an unbounded boundary symbol") {
  const AffineMap bad = scalar_map(1.0, 1.0);
  double prev = 0.0;
  double last = 0.0;
  for (int d = 2; d <= 24; d += 2) {
    last = truncated_norm(bad, d);
    CHECK(last >= prev - 1e-12);
    prev = last;
  }
  CHECK(last > 10.0);  // no bounded symbol reaches this on the scalar family
}

TEST_CASE("homogeneous_block_norm: tensor-power identity") {
  ComplexMatrix A = 0.5 * ComplexMatrix::Identity(2, 2);
  CHECK(homogeneous_block_norm(A, 3) == doctest::Approx(0.125).epsilon(1e-12));

  CHECK(homogeneous_block_norm(ComplexMatrix::Identity(3, 3), 2) ==
        doctest::Approx(1.0).epsilon(1e-12));

  auto g = ts::rng(37);
  const ComplexMatrix R = ts::with_norm(g, 3, 0.8);
  CHECK(homogeneous_block_norm(R, 2) == doctest::Approx(0.64).epsilon(1e-10));

  for (int trial = 0; trial < 15; ++trial) {
    const int n = 1 + static_cast<int>(g() % 3);
    std::uniform_real_distribution<double> pick(0.3, 1.0);
    const double s = pick(g);
    const ComplexMatrix M = ts::with_norm(g, n, s);
    for (int m = 1; m <= 4; ++m)
      CHECK(homogeneous_block_norm(M, m) ==
            doctest::Approx(std::pow(s, m)).epsilon(1e-10));
  }
}

TEST_CASE("reproducing_check: pairing against the kernel section evaluates") {
  auto basis1 = enumerate_basis(1, 3);
  PolyCoeffs one{basis1, ComplexVector::Zero(4)};
  one.coeffs(0) = 1.0;
  ComplexVector w(1);
  w << Complex(1.3, -0.4);
  auto [lhs0, rhs0] = reproducing_check(w, one);
  CHECK(std::abs(lhs0 - Complex(1.0, 0.0)) <= 1e-14);
  CHECK(std::abs(rhs0 - Complex(1.0, 0.0)) <= 1e-14);

  PolyCoeffs z{basis1, ComplexVector::Zero(4)};
  z.coeffs(1) = 1.0;
  w(0) = 2.0;
  auto [lhs1, rhs1] = reproducing_check(w, z);
  CHECK(std::abs(lhs1 - Complex(2.0, 0.0)) <= 1e-13);
  CHECK(std::abs(rhs1 - Complex(2.0, 0.0)) <= 1e-13);

  auto basis2 = enumerate_basis(2, 2);
  PolyCoeffs z1z2{basis2, ComplexVector::Zero(basis2->size())};
  z1z2.coeffs(basis2->position(MultiIndex{1, 1})) = 1.0;
  ComplexVector w2(2);
  w2 << Complex(1.0, 0.0), Complex(0.0, 1.0);
  auto [lhs2, rhs2] = reproducing_check(w2, z1z2);
  CHECK(std::abs(lhs2 - Complex(0.0, 1.0)) <= 1e-13);
  CHECK(std::abs(rhs2 - Complex(0.0, 1.0)) <= 1e-13);
}

TEST_CASE("reproducing_check: random polynomials and points") {
  auto g = ts::rng(38);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(g() % 3);
    const int d = 2 + static_cast<int>(g() % 7);
    auto basis = enumerate_basis(n, d);
    const PolyCoeffs f = random_poly(basis, g);
    ComplexVector w = ts::gauss_vec(g, n);
    if (w.norm() > 2.0) w *= 2.0 / w.norm();
    const auto [lhs, rhs] = reproducing_check(w, f);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("weak decay: Gaussian-weighted polynomial decays along rays") {
  auto g = ts::rng(39);
  const int n = 2, d = 4;
  auto basis = enumerate_basis(n, d);
  const PolyCoeffs f = random_poly(basis, g);
  ComplexVector dir = ts::gauss_vec(g, n);
  dir.normalize();
  double prev = std::numeric_limits<double>::infinity();
  for (double radius : {1.0, 2.0, 4.0, 8.0}) {
    const ComplexVector z = radius * dir;
    const double weighted =
        std::abs(evaluate_poly(f, z)) * std::exp(-0.5 * z.squaredNorm());
    if (radius >= 4.0) CHECK(weighted < prev);  // beyond the polynomial hump
    prev = weighted;
  }
}

TEST_CASE("adjoint action maps kernel sections to kernel sections when b = 0") {
  auto g = ts::rng(40);
  const int n = 2, d = 6;
  auto basis = enumerate_basis(n, d);
  const ComplexMatrix A = 0.7 * ts::gauss_mat(g, n);
  const AffineMap phi(A, ComplexVector::Zero(n));
  const ComplexMatrix M = matrix_of_composition(phi, d);

  ComplexVector z = 0.8 * ts::gauss_vec(g, n);
  // Coefficients of K_z and K_{phi(z)} in the orthonormal basis.
  auto orthonormal_coeffs = [&](const ComplexVector& point) {
    const PolyCoeffs section = kernel_section(point, basis);
    ComplexVector out(basis->size());
    for (int i = 0; i < basis->size(); ++i) {
      const double logf = log_multi_factorial(basis->index(i));
      out(i) = section.coeffs(i) * std::exp(0.5 * logf);
    }
    return out;
  };
  const ComplexVector lhs = M.adjoint() * orthonormal_coeffs(z);
  const ComplexVector rhs = orthonormal_coeffs(phi(z));
  CHECK((lhs - rhs).norm() <= 1e-10 * std::max(1.0, rhs.norm()));

  // The relation survives truncation even with a shift: composition never
  // raises the degree, so the compression's adjoint annihilates the dropped
  // tail of the section exactly. Both degrees give pure roundoff.
  const AffineMap shifted(A, 0.3 * ComplexVector::Ones(n));
  for (int dd : {4, 8}) {
    auto bb = enumerate_basis(n, dd);
    const ComplexMatrix Md = matrix_of_composition(shifted, dd);
    auto coeffs = [&](const ComplexVector& point) {
      const PolyCoeffs section = kernel_section(point, bb);
      ComplexVector out(bb->size());
      for (int i = 0; i < bb->size(); ++i)
        out(i) = section.coeffs(i) *
                 std::exp(0.5 * log_multi_factorial(bb->index(i)));
      return out;
    };
    const ComplexVector expect = coeffs(shifted(z));
    const double r = (Md.adjoint() * coeffs(z) - expect).norm();
    CHECK(r <= 1e-10 * std::max(1.0, expect.norm()));
  }
}

}  // TEST_SUITE
