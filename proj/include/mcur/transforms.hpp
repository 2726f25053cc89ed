#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "mcur/tensor.hpp"

namespace mcur {

enum class Family { identity, dct, dst, dft, u3 };
enum class Regime { invertible, surjective, injective };

std::string to_string(Family f);
std::string to_string(Regime r);
Family parse_family(const std::string& s);
Regime parse_regime(const std::string& s);

/// The map M: kind of transform, regime, and its q x p shape.
struct TransformSpec {
  Family family = Family::dct;
  Regime regime = Regime::invertible;
  Index p = 0;  // source tube length
  Index q = 0;  // target tube length

  void validate() const;
};

// Materialized transform together with its pseudoinverse. Real families
// keep a real matrix (so real tensors stay real through the pipeline); a
// complex copy is always available for mixed arithmetic.
class TransformMatrix {
 public:
  TransformMatrix(TransformSpec spec, MatrixXd M);   // real family
  TransformMatrix(TransformSpec spec, MatrixXcd M);  // complex family (dft)

  const TransformSpec& spec() const { return spec_; }
  bool is_real() const { return is_real_; }
  Index rows() const { return spec_.q; }
  Index cols() const { return spec_.p; }

  const MatrixXd& real() const;
  const MatrixXd& real_pinv() const;
  const MatrixXcd& cplx() const { return Mc_; }
  const MatrixXcd& cplx_pinv() const { return Mc_pinv_; }

 private:
  void finish();  // compute pseudoinverse, verify regime identities

  TransformSpec spec_;
  bool is_real_;
  MatrixXd Mr_, Mr_pinv_;
  MatrixXcd Mc_, Mc_pinv_;
};

/// Orthonormal DCT-II matrix of size p x p.
Eigen::MatrixXd dct_matrix(Index p);
/// Orthonormal DST-I matrix of size p x p.
Eigen::MatrixXd dst_matrix(Index p);
/// Unitary DFT matrix of size p x p (1/sqrt(p) scaling).
Eigen::MatrixXcd dft_matrix(Index p);

/// Mode-3 unfolding: row k is the column-major vectorization of slice k.
template <class T>
MatrixX<T> mode3_unfold(const Tensor3<T>& t) {
  const Index mn = t.rows() * t.cols();
  MatrixX<T> out(t.slices(), mn);
  for (Index k = 0; k < t.slices(); ++k)
    for (Index c = 0; c < mn; ++c)
      out(k, c) = t.data()[static_cast<std::size_t>(k * mn + c)];
  return out;
}

template <class T>
Tensor3<T> mode3_refold(const MatrixX<T>& u, Index m, Index n) {
  if (u.cols() != m * n)
    throw std::invalid_argument("mode3_refold: column count != m*n");
  Tensor3<T> t(m, n, u.rows());
  for (Index k = 0; k < u.rows(); ++k)
    for (Index c = 0; c < m * n; ++c)
      t.data()[static_cast<std::size_t>(k * m * n + c)] = u(k, c);
  return t;
}

/// Data-dependent p x p orthogonal transform: U^T from the SVD of the
/// mode-3 unfolding, each singular vector sign-fixed so its
/// largest-magnitude entry is positive.
Eigen::MatrixXd u3_from_data(const Tensor3d& t);

/// Build the transform for `spec`. `data` is required for the u3 family;
/// `seed` fixes the Gaussian extension block in the injective regime.
TransformMatrix build_transform(const TransformSpec& spec,
                                const Tensor3d* data = nullptr,
                                std::uint64_t seed = 0);

}  // namespace mcur
