#pragma once

// The *_M-product and the tensor CUR decomposition built on it, together
// with Q-DEIM index selection and a reconstruction-exactness check.

#include <type_traits>

#include "mcur/slice_cur.hpp"
#include "mcur/tensor.hpp"
#include "mcur/transforms.hpp"

namespace mcur {

/// A_hat = A x_3 M. Real tensors require a real transform; promote with
/// to_complex() for the dft family.
template <class T>
Tensor3<T> hat(const Tensor3<T>& t, const TransformMatrix& M) {
  if constexpr (std::is_same_v<T, double>) {
    return mode3_product(t, M.real());
  } else {
    return mode3_product(t, M.cplx());
  }
}

/// Map back from the hat domain with M's pseudoinverse.
template <class T>
Tensor3<T> unhat(const Tensor3<T>& t_hat, const TransformMatrix& M) {
  if constexpr (std::is_same_v<T, double>) {
    return mode3_product(t_hat, M.real_pinv());
  } else {
    return mode3_product(t_hat, M.cplx_pinv());
  }
}

/// Tensor spectral norm: max over hat-domain slices of the matrix 2-norm.
template <class T>
double spectral_norm_M(const Tensor3<T>& t, const TransformMatrix& M) {
  Tensor3<T> th = hat(t, M);
  double best = 0.0;
#pragma omp parallel for reduction(max : best) schedule(dynamic)
  for (Index k = 0; k < th.slices(); ++k) {
    MatrixX<T> s = th.slice(k);
    best = std::max(best, spectral_norm(s));
  }
  return best;
}

/// Per-hat-slice numerical ranks. tol < 0 selects the default tolerance
/// max(m,n) * sigma_1 * eps per slice.
template <class T>
Multirank multirank_M(const Tensor3<T>& t, const TransformMatrix& M,
                      double tol = -1.0) {
  Tensor3<T> th = hat(t, M);
  const Index q = th.slices();
  std::vector<Eigen::VectorXd> spectra(static_cast<std::size_t>(q));
#pragma omp parallel for schedule(dynamic)
  for (Index k = 0; k < q; ++k) {
    MatrixX<T> s = th.slice(k);
    spectra[static_cast<std::size_t>(k)] =
        Eigen::JacobiSVD<MatrixX<T>>(s).singularValues();
  }
  if (tol < 0.0) {
    // Tensor-scale default: slices that are zero up to transform round-off
    // must report rank 0 (see mcur_decompose for the same convention).
    double smax = 0.0;
    for (const auto& sv : spectra)
      if (sv.size() > 0) smax = std::max(smax, sv(0));
    const Index dim = std::max({t.rows(), t.cols(), q});
    tol = rank_tolerance(dim, dim, smax);
  }
  Multirank out;
  out.ranks.assign(static_cast<std::size_t>(q), 0);
  for (Index k = 0; k < q; ++k) {
    const auto& sv = spectra[static_cast<std::size_t>(k)];
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
      if (sv(i) > tol) ++rank;
    out.ranks[static_cast<std::size_t>(k)] = rank;
  }
  return out;
}

/// A *_M B = ((A x_3 M) facewise (B x_3 M)) x_3 M^+.
template <class T>
Tensor3<T> m_product(const Tensor3<T>& a, const Tensor3<T>& b,
                     const TransformMatrix& M) {
  if (a.slices() != M.cols() || b.slices() != M.cols())
    throw std::invalid_argument("m_product: slice count != M cols");
  return unhat(facewise_product(hat(a, M), hat(b, M)), M);
}

template <class T>
struct CurFactors {
  IndexSet I;
  IndexSet J;
  Tensor3<T> C;       // A(:,J,:), p slices
  Tensor3<T> U_pinv;  // invertible/surjective: U_hat^+ x_3 M^+ (p slices);
                      // injective: U_hat^+ itself (q slices, hat domain)
  Tensor3<T> R;       // A(I,:,:), p slices
  TransformSpec transform;
  Multirank multirank_A;
  Multirank multirank_U;
};

template <class T>
CurFactors<T> mcur_decompose(const Tensor3<T>& A, const TransformMatrix& M,
                             const IndexSet& I, const IndexSet& J) {
  if (A.slices() != M.cols())
    throw std::invalid_argument("mcur_decompose: slice count != M cols");
  CurFactors<T> f{I, J, slice_lateral(A, J), Tensor3<T>(),
                  slice_horizontal(A, I), M.spec(), Multirank{}, Multirank{}};
  Tensor3<T> U_hat = hat(subtensor(A, I, J), M);
  const Index q = U_hat.slices();

  // Rank/pseudoinverse tolerances are anchored at the whole-tensor scale:
  // a hat slice that is zero in exact arithmetic carries only transform
  // round-off, and a per-slice relative tolerance would invert that noise.
  std::vector<Eigen::JacobiSVD<MatrixX<T>>> svds(
      static_cast<std::size_t>(q));
#pragma omp parallel for schedule(dynamic)
  for (Index k = 0; k < q; ++k) {
    MatrixX<T> u = U_hat.slice(k);
    svds[static_cast<std::size_t>(k)].compute(
        u, Eigen::ComputeThinU | Eigen::ComputeThinV);
  }
  double smax_U = 0.0;
  for (const auto& s : svds)
    if (s.singularValues().size() > 0)
      smax_U = std::max(smax_U, s.singularValues()(0));
  // The hat domain is produced by a length-p tube transform, so round-off
  // in exactly-zero slices scales with the tensor dimensions, not just the
  // core size; anchor the tolerance at the largest dimension involved.
  const Index dim_U = std::max({I.size(), J.size(), A.rows(), A.cols(), q});
  const double tol_U = rank_tolerance(dim_U, dim_U, smax_U);

  Tensor3<T> U_hat_pinv(J.size(), I.size(), q);
  f.multirank_U.ranks.assign(static_cast<std::size_t>(q), 0);
#pragma omp parallel for schedule(dynamic)
  for (Index k = 0; k < q; ++k) {
    const auto& svd = svds[static_cast<std::size_t>(k)];
    const auto& sv = svd.singularValues();
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
      if (sv(i) > tol_U) {
        inv(i) = 1.0 / sv(i);
        ++rank;
      }
    U_hat_pinv.slice(k) =
        svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
    f.multirank_U.ranks[static_cast<std::size_t>(k)] = rank;
  }
  f.U_pinv = (M.spec().regime == Regime::injective)
                 ? std::move(U_hat_pinv)
                 : unhat(U_hat_pinv, M);

  f.multirank_A = multirank_M(A, M);
  return f;
}

/// A ~= C *_M U^+ *_M R, evaluated left-to-right. In the injective regime
/// the whole product is evaluated facewise in the hat domain and mapped
/// back with M^+ once (the *_M-product is non-associative there).
template <class T>
Tensor3<T> mcur_reconstruct(const CurFactors<T>& f, const TransformMatrix& M) {
  if (f.transform.regime != M.spec().regime ||
      f.transform.p != M.spec().p || f.transform.q != M.spec().q)
    throw std::invalid_argument("mcur_reconstruct: factors built for a different transform");
  if (M.spec().regime == Regime::injective) {
    Tensor3<T> h =
        facewise_product(facewise_product(hat(f.C, M), f.U_pinv), hat(f.R, M));
    return unhat(h, M);
  }
  return m_product(m_product(f.C, f.U_pinv, M), f.R, M);
}

namespace detail {

// Column-pivoted Gram-Schmidt pivot selection: r steps, pivot = largest
// remaining column norm, lowest index on exact ties.
template <class T>
std::vector<Index> cpqr_pivots(MatrixX<T> W, Index r) {
  std::vector<Index> pivots;
  Eigen::VectorXd norms(W.cols());
  for (Index j = 0; j < W.cols(); ++j) norms(j) = W.col(j).squaredNorm();
  std::vector<bool> used(static_cast<std::size_t>(W.cols()), false);
  for (Index step = 0; step < r; ++step) {
    Index best = -1;
    double bestv = -1.0;
    for (Index j = 0; j < W.cols(); ++j)
      if (!used[static_cast<std::size_t>(j)] && norms(j) > bestv) {
        bestv = norms(j);
        best = j;
      }
    if (best < 0 || bestv <= 0.0) break;
    used[static_cast<std::size_t>(best)] = true;
    pivots.push_back(best);
    Eigen::Vector<T, Eigen::Dynamic> q = W.col(best);
    const double qn = q.norm();
    if (qn == 0.0) break;
    q /= qn;
    for (Index j = 0; j < W.cols(); ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const T coef = q.dot(W.col(j));
      W.col(j) -= coef * q;
      norms(j) = W.col(j).squaredNorm();
    }
  }
  return pivots;
}

/// Mode-1 unfolding of the hat tensor: m x (n*q).
template <class T>
MatrixX<T> mode1_unfold(const Tensor3<T>& t) {
  MatrixX<T> out(t.rows(), t.cols() * t.slices());
  for (Index k = 0; k < t.slices(); ++k)
    out.middleCols(k * t.cols(), t.cols()) = t.slice(k);
  return out;
}

/// Mode-2 unfolding of the hat tensor: n x (m*q).
template <class T>
MatrixX<T> mode2_unfold(const Tensor3<T>& t) {
  MatrixX<T> out(t.cols(), t.rows() * t.slices());
  for (Index k = 0; k < t.slices(); ++k)
    out.middleCols(k * t.rows(), t.rows()) = t.slice(k).transpose();
  return out;
}

template <class T>
std::vector<Index> qdeim_axis(const MatrixX<T>& unfolding, Index r) {
  Eigen::JacobiSVD<MatrixX<T>> svd(unfolding, Eigen::ComputeThinU);
  MatrixX<T> Ur = svd.matrixU().leftCols(std::min(r, svd.matrixU().cols()));
  return cpqr_pivots(MatrixX<T>(Ur.adjoint()), r);
}

}  // namespace detail

// Q-DEIM index selection: rows from the top-r left singular vectors of the
// mode-1 unfolding of A_hat, columns analogously from the mode-2 unfolding,
// pivots via column-pivoted QR. Deterministic for fixed input.
template <class T>
std::pair<IndexSet, IndexSet> qdeim_select(const Tensor3<T>& A,
                                           const TransformMatrix& M, Index r) {
  if (r < 1 || r > std::min(A.rows(), A.cols()))
    throw std::invalid_argument("qdeim_select: r out of range");
  Tensor3<T> Ah = hat(A, M);
  std::vector<Index> rows = detail::qdeim_axis(detail::mode1_unfold(Ah), r);
  std::vector<Index> cols = detail::qdeim_axis(detail::mode2_unfold(Ah), r);
  if (static_cast<Index>(rows.size()) != r ||
      static_cast<Index>(cols.size()) != r)
    throw std::runtime_error("qdeim_select: rank-deficient input, fewer than r pivots");
  return {IndexSet(std::move(rows), A.rows()),
          IndexSet(std::move(cols), A.cols())};
}

struct ExactnessReport {
  Multirank multirank_A;
  Multirank multirank_U;
  double rel_error = 0.0;
  bool rank_condition_met = false;
};

// Exactness check: the rank condition is rank(U_hat^(k)) =
// rank(A_hat^(k)) for every k; the error is measured against the regime's
// reconstruction target (A x_3 M^+M in the surjective regime, A itself
// otherwise).
template <class T>
ExactnessReport verify_exactness(const Tensor3<T>& A, const CurFactors<T>& f,
                                 const TransformMatrix& M) {
  ExactnessReport rep;
  rep.multirank_A = f.multirank_A;
  rep.multirank_U = f.multirank_U;
  rep.rank_condition_met = (rep.multirank_A.ranks == rep.multirank_U.ranks);
  Tensor3<T> target =
      (M.spec().regime == Regime::surjective) ? unhat(hat(A, M), M) : A;
  rep.rel_error = rel_error(mcur_reconstruct(f, M), target);
  return rep;
}

}  // namespace mcur
