#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

#include "bqc/angle.hpp"

namespace bqc {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
/// Hermitian, trace-1, PSD complex matrix. Validity is checked by the
/// operations that require it rather than carried as a type invariant.
using DensityMatrix = Eigen::MatrixXcd;

inline constexpr double kDefaultTol = 1e-10;
inline constexpr double kHermitianTol = 1e-12;

/// |+_theta> = (|0> + e^{i theta}|1>)/sqrt(2)
inline Eigen::Vector2cd plus_state(Angle8 theta) {
  const double inv_sqrt2 = 0.70710678118654752440;
  return {Complex(inv_sqrt2, 0.0), theta.phase() * inv_sqrt2};
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m,
                  double tol = kHermitianTol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// Eigenvalues of a Hermitian matrix, ascending. Rejects non-square or
/// non-Hermitian input.
template <typename Derived>
Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("hermitian_eigenvalues: matrix not square");
  if (!is_hermitian(m))
    throw std::invalid_argument("hermitian_eigenvalues: matrix not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.derived(),
                                               Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("hermitian_eigenvalues: eigensolver failed");
  return solver.eigenvalues();
}

/// (1/2) sum |lambda_k| over eigenvalues of (a - b). Inputs must be
/// same-dimension Hermitian matrices.
template <typename DerivedA, typename DerivedB>
double trace_distance(const Eigen::MatrixBase<DerivedA>& a,
                      const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  if (!is_hermitian(a) || !is_hermitian(b))
    throw std::invalid_argument("trace_distance: non-Hermitian input");
  Matrix diff = a.derived() - b.derived();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(diff, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("trace_distance: eigensolver failed");
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

/// Kronecker product, row-major qubit convention: the left factor holds the
/// high-order index bits.
template <typename DerivedA, typename DerivedB>
Matrix tensor(const Eigen::MatrixBase<DerivedA>& a,
              const Eigen::MatrixBase<DerivedB>& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
          a.derived()(i, j) * b.derived();
  return out;
}

/// Projector |k><k| in the given dimension.
inline Matrix basis_projector(int k, int dim) {
  Matrix p = Matrix::Zero(dim, dim);
  p(k, k) = Complex(1.0, 0.0);
  return p;
}

}  // namespace bqc
