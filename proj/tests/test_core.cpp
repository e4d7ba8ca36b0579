#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <complex>
#include <vector>

#include "bqc/angle.hpp"
#include "bqc/linalg.hpp"
#include "bqc/rng.hpp"

using namespace bqc;

namespace {

Matrix random_hermitian(int dim, SplitMix64& rng) {
  Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      a(i, j) = Complex(2.0 * rng.next_unit() - 1.0,
                        2.0 * rng.next_unit() - 1.0);
  return 0.5 * (a + a.adjoint()).eval();
}

Matrix random_density(int dim, SplitMix64& rng) {
  Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      a(i, j) = Complex(2.0 * rng.next_unit() - 1.0,
                        2.0 * rng.next_unit() - 1.0);
  Matrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

Matrix random_unitary(int dim, SplitMix64& rng) {
  Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      a(i, j) = Complex(2.0 * rng.next_unit() - 1.0,
                        2.0 * rng.next_unit() - 1.0);
  return Eigen::HouseholderQR<Matrix>(a).householderQ();
}

// Independent eigenvalue oracle: evaluate det(M - x I) in long-double
// arithmetic by Gaussian elimination, locate sign changes of the
// characteristic polynomial on a fine grid over the Gershgorin interval,
// and bisect each bracket. Valid for Hermitian matrices with distinct
// eigenvalues, which random instances have.
long double char_poly(const Matrix& m, long double x) {
  using C = std::complex<long double>;
  const int n = static_cast<int>(m.rows());
  std::vector<std::vector<C>> a(n, std::vector<C>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a[i][j] = C(m(i, j).real(), m(i, j).imag());
      if (i == j) a[i][j] -= x;
    }
  C det(1.0L, 0.0L);
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row)
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    if (std::abs(a[pivot][col]) == 0.0L) return 0.0L;
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (int row = col + 1; row < n; ++row) {
      const C factor = a[row][col] / a[col][col];
      for (int j = col; j < n; ++j) a[row][j] -= factor * a[col][j];
    }
  }
  return det.real();
}

std::vector<double> oracle_eigenvalues(const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  long double radius = 0.0L;
  for (int i = 0; i < n; ++i) {
    long double row = 0.0L;
    for (int j = 0; j < n; ++j) row += std::abs(m(i, j));
    radius = std::max(radius, row);
  }
  const long double lo = -radius - 1.0L, hi = radius + 1.0L;
  const int grid = 40000;
  std::vector<double> roots;
  long double x_prev = lo;
  long double f_prev = char_poly(m, x_prev);
  for (int g = 1; g <= grid; ++g) {
    const long double x = lo + (hi - lo) * g / grid;
    const long double f = char_poly(m, x);
    if ((f_prev < 0.0L) != (f < 0.0L)) {
      long double a = x_prev, b = x, fa = f_prev;
      for (int iter = 0; iter < 90; ++iter) {
        const long double mid = 0.5L * (a + b);
        const long double fm = char_poly(m, mid);
        if ((fa < 0.0L) == (fm < 0.0L)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      roots.push_back(static_cast<double>(0.5L * (a + b)));
    }
    x_prev = x;
    f_prev = f;
  }
  return roots;
}

}  // namespace

TEST_CASE("angle addition is modular") {
  CHECK(angle_add(Angle8(1), Angle8(3)).index() == 4);
  CHECK(angle_add(Angle8(7), Angle8(1)).index() == 0);
  CHECK(angle_add(Angle8(5), Angle8(4)).index() == 1);
}

TEST_CASE("angle negation, flip and reduction stay in range") {
  for (int k = -17; k <= 17; ++k) {
    const Angle8 a(k);
    CHECK(a.index() >= 0);
    CHECK(a.index() < 8);
    CHECK((a + (-a)).index() == 0);
    CHECK(a.flipped(1).index() == (a.index() + 4) % 8);
    CHECK(a.flipped(0) == a);
  }
  CHECK(Angle8(-1).index() == 7);
  CHECK(Angle8(8).index() == 0);
}

TEST_CASE("plus_state matches the closed forms") {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  auto s0 = plus_state(Angle8(0));
  CHECK(std::abs(s0(0) - Complex(inv_sqrt2, 0)) < 1e-15);
  CHECK(std::abs(s0(1) - Complex(inv_sqrt2, 0)) < 1e-15);
  auto s4 = plus_state(Angle8(4));
  CHECK(std::abs(s4(1) - Complex(-inv_sqrt2, 0)) < 1e-15);
  auto s2 = plus_state(Angle8(2));
  CHECK(std::abs(s2(1) - Complex(0, inv_sqrt2)) < 1e-15);
}

TEST_CASE("plus_state antipodes are orthogonal") {
  for (int k = 0; k < 8; ++k) {
    const auto a = plus_state(Angle8(k));
    const auto b = plus_state(Angle8(k).antipode());
    CHECK(std::abs(a.dot(b)) < 1e-12);
  }
}

TEST_CASE("trace distance on the worked examples") {
  const auto plus = plus_state(Angle8(0));
  const Matrix p = plus * plus.adjoint();
  CHECK(trace_distance(p, p) == doctest::Approx(0.0).epsilon(1e-12));

  const auto minus = plus_state(Angle8(4));
  const Matrix q = minus * minus.adjoint();
  CHECK(trace_distance(p, q) == doctest::Approx(1.0).epsilon(1e-12));

  // Eigenvalues of |+><+| - I/2 are +-1/2.
  const Matrix mixed = 0.5 * Matrix::Identity(2, 2);
  CHECK(trace_distance(p, mixed) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("trace distance input validation") {
  const Matrix a = Matrix::Identity(2, 2) * 0.5;
  const Matrix b = Matrix::Identity(4, 4) * 0.25;
  CHECK_THROWS_AS(trace_distance(a, b), std::invalid_argument);
  Matrix skew(2, 2);
  skew << Complex(0.5, 0), Complex(0.5, 0), Complex(-0.5, 0), Complex(0.5, 0);
  CHECK_THROWS_AS(trace_distance(a, skew), std::invalid_argument);
}

TEST_CASE("trace distance properties on random densities") {
  SplitMix64 rng(0x1234);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_density(4, rng);
    const Matrix b = random_density(4, rng);
    const Matrix c = random_density(4, rng);
    CHECK(trace_distance(a, a) < 1e-12);
    CHECK(trace_distance(a, b) ==
          doctest::Approx(trace_distance(b, a)).epsilon(1e-12));
    CHECK(trace_distance(a, c) <=
          trace_distance(a, b) + trace_distance(b, c) + 1e-10);
    const Matrix u = random_unitary(4, rng);
    CHECK(trace_distance((u * a * u.adjoint()).eval(),
                         (u * b * u.adjoint()).eval()) ==
          doctest::Approx(trace_distance(a, b)).epsilon(1e-10));
  }
}

TEST_CASE("hermitian_eigenvalues on fixed matrices") {
  const Eigen::VectorXd id_eigs = hermitian_eigenvalues(Matrix::Identity(2, 2));
  CHECK(id_eigs(0) == doctest::Approx(1.0));
  CHECK(id_eigs(1) == doctest::Approx(1.0));

  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = Complex(5, 0);
  diag(1, 1) = Complex(-3, 0);
  const Eigen::VectorXd eigs = hermitian_eigenvalues(diag);
  CHECK(eigs(0) == doctest::Approx(-3.0));
  CHECK(eigs(1) == doctest::Approx(5.0));

  CHECK_THROWS_AS(hermitian_eigenvalues(Matrix::Zero(2, 3)),
                  std::invalid_argument);
}

TEST_CASE("hermitian_eigenvalues matches the characteristic-poly oracle") {
  SplitMix64 rng(0xfeed);
  for (int dim : {4, 8}) {
    for (int trial = 0; trial < 3; ++trial) {
      const Matrix m = random_hermitian(dim, rng);
      const Eigen::VectorXd eigs = hermitian_eigenvalues(m);
      const std::vector<double> oracle = oracle_eigenvalues(m);
      REQUIRE(oracle.size() == static_cast<std::size_t>(dim));
      for (int i = 0; i < dim; ++i)
        CHECK(eigs(i) == doctest::Approx(oracle[i]).epsilon(1e-10));
    }
  }
}
