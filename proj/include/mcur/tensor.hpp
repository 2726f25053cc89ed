#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcur {

using Index = Eigen::Index;
using cd = std::complex<double>;

template <class T>
using MatrixX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
using MatrixXd = Eigen::MatrixXd;
using MatrixXcd = Eigen::MatrixXcd;

/// Strictly increasing set of 0-based indices into a dimension of size `bound`.
class IndexSet {
 public:
  IndexSet(std::vector<Index> indices, Index bound)
      : indices_(std::move(indices)), bound_(bound) {
    if (indices_.empty()) throw std::invalid_argument("IndexSet: empty");
    std::sort(indices_.begin(), indices_.end());
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      if (indices_[i] < 0 || indices_[i] >= bound_)
        throw std::out_of_range("IndexSet: index " +
                                std::to_string(indices_[i]) +
                                " outside bound " + std::to_string(bound_));
      if (i > 0 && indices_[i] == indices_[i - 1])
        throw std::invalid_argument("IndexSet: duplicate index " +
                                    std::to_string(indices_[i]));
    }
  }

  static IndexSet full(Index bound) {
    std::vector<Index> v(static_cast<std::size_t>(bound));
    std::iota(v.begin(), v.end(), Index{0});
    return IndexSet(std::move(v), bound);
  }

  Index size() const { return static_cast<Index>(indices_.size()); }
  Index bound() const { return bound_; }
  Index operator[](std::size_t i) const { return indices_[i]; }
  const std::vector<Index>& indices() const { return indices_; }

  bool operator==(const IndexSet& o) const {
    return bound_ == o.bound_ && indices_ == o.indices_;
  }

 private:
  std::vector<Index> indices_;
  Index bound_;
};

/// Vector of per-hat-slice matrix ranks.
struct Multirank {
  std::vector<Index> ranks;

  Index max() const {
    return ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end());
  }
  bool operator==(const Multirank& o) const { return ranks == o.ranks; }
};

// Dense m x n x p tensor. Storage is slice-major with column-major frontal
// slices: entry (i,j,k) lives at data[k*m*n + j*m + i].
template <class T>
class Tensor3 {
 public:
  Tensor3() : m_(0), n_(0), p_(0) {}

  Tensor3(Index m, Index n, Index p)
      : m_(m), n_(n), p_(p), data_(static_cast<std::size_t>(m * n * p), T{}) {
    if (m <= 0 || n <= 0 || p <= 0)
      throw std::invalid_argument("Tensor3: dims must be positive");
  }

  static Tensor3 from_data(Index m, Index n, Index p, std::vector<T> data) {
    Tensor3 t(m, n, p);
    if (data.size() != t.data_.size())
      throw std::invalid_argument("Tensor3: data length != m*n*p");
    t.data_ = std::move(data);
    return t;
  }

  Index rows() const { return m_; }
  Index cols() const { return n_; }
  Index slices() const { return p_; }
  Index size() const { return m_ * n_ * p_; }
  bool empty() const { return data_.empty(); }

  T& operator()(Index i, Index j, Index k) {
    return data_[static_cast<std::size_t>(k * m_ * n_ + j * m_ + i)];
  }
  const T& operator()(Index i, Index j, Index k) const {
    return data_[static_cast<std::size_t>(k * m_ * n_ + j * m_ + i)];
  }

  /// Frontal slice k as an m x n column-major matrix view.
  Eigen::Map<const MatrixX<T>> slice(Index k) const {
    check_slice(k);
    return Eigen::Map<const MatrixX<T>>(data_.data() + k * m_ * n_, m_, n_);
  }
  Eigen::Map<MatrixX<T>> slice(Index k) {
    check_slice(k);
    return Eigen::Map<MatrixX<T>>(data_.data() + k * m_ * n_, m_, n_);
  }

  template <class Derived>
  void set_slice(Index k, const Eigen::MatrixBase<Derived>& mat) {
    slice(k) = mat;
  }

  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

 private:
  void check_slice(Index k) const {
    if (k < 0 || k >= p_)
      throw std::out_of_range("Tensor3: slice " + std::to_string(k) +
                              " out of range [0," + std::to_string(p_) + ")");
  }

  Index m_, n_, p_;
  std::vector<T> data_;
};

using Tensor3d = Tensor3<double>;
using Tensor3c = Tensor3<cd>;

template <class T>
MatrixX<T> slice_frontal(const Tensor3<T>& t, Index k) {
  return t.slice(k);
}

/// A(:,J,:) with columns in J's (increasing) order.
template <class T>
Tensor3<T> slice_lateral(const Tensor3<T>& t, const IndexSet& J) {
  if (J.bound() != t.cols())
    throw std::invalid_argument("slice_lateral: IndexSet bound != cols");
  Tensor3<T> out(t.rows(), J.size(), t.slices());
  for (Index k = 0; k < t.slices(); ++k) {
    auto src = t.slice(k);
    auto dst = out.slice(k);
    for (Index j = 0; j < J.size(); ++j) dst.col(j) = src.col(J[j]);
  }
  return out;
}

/// A(I,:,:).
template <class T>
Tensor3<T> slice_horizontal(const Tensor3<T>& t, const IndexSet& I) {
  if (I.bound() != t.rows())
    throw std::invalid_argument("slice_horizontal: IndexSet bound != rows");
  Tensor3<T> out(I.size(), t.cols(), t.slices());
  for (Index k = 0; k < t.slices(); ++k) {
    auto src = t.slice(k);
    auto dst = out.slice(k);
    for (Index i = 0; i < I.size(); ++i) dst.row(i) = src.row(I[i]);
  }
  return out;
}

/// A(I,J,:).
template <class T>
Tensor3<T> subtensor(const Tensor3<T>& t, const IndexSet& I,
                     const IndexSet& J) {
  if (I.bound() != t.rows() || J.bound() != t.cols())
    throw std::invalid_argument("subtensor: IndexSet bounds mismatch");
  Tensor3<T> out(I.size(), J.size(), t.slices());
  for (Index k = 0; k < t.slices(); ++k) {
    auto src = t.slice(k);
    auto dst = out.slice(k);
    for (Index j = 0; j < J.size(); ++j)
      for (Index i = 0; i < I.size(); ++i) dst(i, j) = src(I[i], J[j]);
  }
  return out;
}

// Mode-3 product A x_3 M. Computed as q per-slice linear combinations
// rather than per-tube loops; slices are independent so the outer loop
// parallelizes.
template <class TT, class TM>
auto mode3_product(const Tensor3<TT>& t, const MatrixX<TM>& M)
    -> Tensor3<decltype(TT{} * TM{})> {
  using R = decltype(TT{} * TM{});
  if (M.cols() != t.slices())
    throw std::invalid_argument("mode3_product: M cols != tensor slices");
  const Index q = M.rows();
  Tensor3<R> out(t.rows(), t.cols(), q);
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < q; ++k) {
    auto dst = out.slice(k);
    for (Index j = 0; j < t.slices(); ++j)
      dst += M(k, j) * t.slice(j).template cast<R>();
  }
  return out;
}

/// Facewise product: slice k of output = a.slice(k) * b.slice(k).
template <class T>
Tensor3<T> facewise_product(const Tensor3<T>& a, const Tensor3<T>& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("facewise_product: inner dims mismatch");
  if (a.slices() != b.slices())
    throw std::invalid_argument("facewise_product: slice counts differ");
  Tensor3<T> out(a.rows(), b.cols(), a.slices());
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < a.slices(); ++k)
    out.slice(k) = a.slice(k) * b.slice(k);
  return out;
}

template <class T>
double frobenius_norm(const Tensor3<T>& t) {
  double s = 0.0;
#pragma omp parallel for reduction(+ : s) schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(t.data().size());
       ++i)
    s += std::norm(std::complex<double>(t.data()[static_cast<std::size_t>(i)]));
  return std::sqrt(s);
}

inline Tensor3c to_complex(const Tensor3d& t) {
  Tensor3c out(t.rows(), t.cols(), t.slices());
  for (std::size_t i = 0; i < t.data().size(); ++i)
    out.data()[i] = cd(t.data()[i], 0.0);
  return out;
}

inline Tensor3d real_part(const Tensor3c& t) {
  Tensor3d out(t.rows(), t.cols(), t.slices());
  for (std::size_t i = 0; i < t.data().size(); ++i)
    out.data()[i] = t.data()[i].real();
  return out;
}

inline double max_imag_abs(const Tensor3c& t) {
  double m = 0.0;
  for (const auto& v : t.data()) m = std::max(m, std::abs(v.imag()));
  return m;
}

template <class T>
Tensor3<T> operator+(const Tensor3<T>& a, const Tensor3<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.slices() != b.slices())
    throw std::invalid_argument("Tensor3 +: dims mismatch");
  Tensor3<T> out = a;
  for (std::size_t i = 0; i < out.data().size(); ++i)
    out.data()[i] += b.data()[i];
  return out;
}

template <class T>
Tensor3<T> operator-(const Tensor3<T>& a, const Tensor3<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.slices() != b.slices())
    throw std::invalid_argument("Tensor3 -: dims mismatch");
  Tensor3<T> out = a;
  for (std::size_t i = 0; i < out.data().size(); ++i)
    out.data()[i] -= b.data()[i];
  return out;
}

template <class T, class S>
Tensor3<T> operator*(S scale, const Tensor3<T>& t) {
  Tensor3<T> out = t;
  for (auto& v : out.data()) v *= scale;
  return out;
}

/// Relative Frobenius distance ||a - b||_F / ||b||_F (absolute when b = 0).
template <class T>
double rel_error(const Tensor3<T>& a, const Tensor3<T>& b) {
  const double nb = frobenius_norm(b);
  const double d = frobenius_norm(a - b);
  return nb > 0 ? d / nb : d;
}

}  // namespace mcur
