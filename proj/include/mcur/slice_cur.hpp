#pragma once

// Matrix-level kernels used per hat-domain slice: SVD pseudoinverse,
// numerical rank, and the matrix CUR identity A ~= A(:,J) A(I,J)^+ A(I,:).

#include <limits>

#include "mcur/tensor.hpp"

namespace mcur {

/// Default numerical-rank tolerance: max(m,n) * sigma_1 * machine epsilon.
inline double rank_tolerance(Index rows, Index cols, double sigma_max) {
  return static_cast<double>(std::max(rows, cols)) * sigma_max *
         std::numeric_limits<double>::epsilon();
}

/// Moore-Penrose pseudoinverse via SVD. Singular values <= tol are treated
/// as zero; tol < 0 selects the default rank tolerance. The zero matrix
/// maps to the zero matrix.
template <class T>
MatrixX<T> pseudoinverse(const MatrixX<T>& A, double tol = -1.0) {
  if (A.rows() == 0 || A.cols() == 0) return MatrixX<T>(A.cols(), A.rows());
  Eigen::JacobiSVD<MatrixX<T>> svd(A,
                                   Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (tol < 0) tol = rank_tolerance(A.rows(), A.cols(), sv.size() ? sv(0) : 0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

template <class T>
Index numerical_rank(const MatrixX<T>& A, double tol = -1.0) {
  if (A.rows() == 0 || A.cols() == 0) return 0;
  Eigen::JacobiSVD<MatrixX<T>> svd(A);
  const auto& sv = svd.singularValues();
  if (tol < 0) tol = rank_tolerance(A.rows(), A.cols(), sv.size() ? sv(0) : 0);
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return r;
}

template <class T>
double spectral_norm(const MatrixX<T>& A) {
  if (A.rows() == 0 || A.cols() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixX<T>> svd(A);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

/// One hat-domain slice of the CUR factorization.
template <class T>
struct MatrixCurSlice {
  MatrixX<T> C_hat;
  MatrixX<T> U_hat_pinv;
  MatrixX<T> R_hat;
  Index rank_U = 0;
};

template <class T>
MatrixCurSlice<T> cur_slice(const MatrixX<T>& A_hat, const IndexSet& I,
                            const IndexSet& J) {
  if (I.bound() != A_hat.rows() || J.bound() != A_hat.cols())
    throw std::invalid_argument("cur_slice: IndexSet bounds mismatch");
  MatrixCurSlice<T> out;
  out.C_hat.resize(A_hat.rows(), J.size());
  for (Index j = 0; j < J.size(); ++j) out.C_hat.col(j) = A_hat.col(J[j]);
  out.R_hat.resize(I.size(), A_hat.cols());
  for (Index i = 0; i < I.size(); ++i) out.R_hat.row(i) = A_hat.row(I[i]);
  MatrixX<T> U(I.size(), J.size());
  for (Index i = 0; i < I.size(); ++i)
    for (Index j = 0; j < J.size(); ++j) U(i, j) = A_hat(I[i], J[j]);
  out.U_hat_pinv = pseudoinverse(U);
  out.rank_U = numerical_rank(U);
  return out;
}

}  // namespace mcur
