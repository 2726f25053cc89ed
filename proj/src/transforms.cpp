#include "mcur/transforms.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "mcur/slice_cur.hpp"

namespace mcur {

std::string to_string(Family f) {
  switch (f) {
    case Family::identity: return "identity";
    case Family::dct: return "dct";
    case Family::dst: return "dst";
    case Family::dft: return "dft";
    case Family::u3: return "u3";
  }
  return "?";
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::invertible: return "inv";
    case Regime::surjective: return "surj";
    case Regime::injective: return "inj";
  }
  return "?";
}

Family parse_family(const std::string& s) {
  if (s == "identity") return Family::identity;
  if (s == "dct") return Family::dct;
  if (s == "dst") return Family::dst;
  if (s == "dft") return Family::dft;
  if (s == "u3") return Family::u3;
  throw std::invalid_argument("unknown transform family: " + s);
}

Regime parse_regime(const std::string& s) {
  if (s == "inv" || s == "invertible") return Regime::invertible;
  if (s == "surj" || s == "surjective") return Regime::surjective;
  if (s == "inj" || s == "injective") return Regime::injective;
  throw std::invalid_argument("unknown regime: " + s);
}

void TransformSpec::validate() const {
  if (p < 1 || q < 1)
    throw std::invalid_argument("TransformSpec: p, q must be >= 1");
  switch (regime) {
    case Regime::invertible:
      if (q != p)
        throw std::invalid_argument("invertible regime requires q = p");
      break;
    case Regime::surjective:
      if (q >= p)
        throw std::invalid_argument("surjective regime requires q < p");
      break;
    case Regime::injective:
      if (q <= p)
        throw std::invalid_argument("injective regime requires q > p");
      break;
  }
}

Eigen::MatrixXd dct_matrix(Index p) {
  MatrixXd M(p, p);
  const double pi = std::numbers::pi;
  for (Index k = 0; k < p; ++k) {
    const double scale =
        (k == 0 ? std::sqrt(1.0 / p) : std::sqrt(2.0 / p));
    for (Index j = 0; j < p; ++j)
      M(k, j) = scale * std::cos(pi * (2.0 * j + 1.0) * k / (2.0 * p));
  }
  return M;
}

Eigen::MatrixXd dst_matrix(Index p) {
  MatrixXd M(p, p);
  const double pi = std::numbers::pi;
  const double scale = std::sqrt(2.0 / (p + 1.0));
  for (Index k = 0; k < p; ++k)
    for (Index j = 0; j < p; ++j)
      M(k, j) = scale * std::sin(pi * (k + 1.0) * (j + 1.0) / (p + 1.0));
  return M;
}

Eigen::MatrixXcd dft_matrix(Index p) {
  MatrixXcd M(p, p);
  const double w = -2.0 * std::numbers::pi / static_cast<double>(p);
  const double scale = 1.0 / std::sqrt(static_cast<double>(p));
  for (Index k = 0; k < p; ++k)
    for (Index j = 0; j < p; ++j)
      M(k, j) = scale * std::polar(1.0, w * static_cast<double>(k * j));
  return M;
}

Eigen::MatrixXd u3_from_data(const Tensor3d& t) {
  MatrixXd unf = mode3_unfold(t);
  if (unf.norm() == 0.0)
    throw std::invalid_argument("u3_from_data: zero tensor");
  Eigen::JacobiSVD<MatrixXd> svd(unf, Eigen::ComputeFullU);
  MatrixXd U = svd.matrixU();
  // Sign convention: largest-magnitude entry of each singular vector
  // positive.
  for (Index c = 0; c < U.cols(); ++c) {
    Index imax = 0;
    U.col(c).cwiseAbs().maxCoeff(&imax);
    if (U(imax, c) < 0) U.col(c) = -U.col(c);
  }
  return U.transpose();
}

namespace {

MatrixXd gaussian_block(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  MatrixXd G(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) G(i, j) = dist(rng);
  return G;
}

template <class Mat>
Mat shape_to_regime(Mat base, const TransformSpec& spec, std::uint64_t seed) {
  switch (spec.regime) {
    case Regime::invertible:
      return base;
    case Regime::surjective:
      // Keep the first q (low-frequency) rows.
      return base.topRows(spec.q);
    case Regime::injective: {
      // Stack the full p x p matrix over a seeded Gaussian block.
      Mat M(spec.q, spec.p);
      M.topRows(spec.p) = base;
      M.bottomRows(spec.q - spec.p) =
          gaussian_block(spec.q - spec.p, spec.p, seed).template cast<
              typename Mat::Scalar>();
      return M;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace

TransformMatrix::TransformMatrix(TransformSpec spec, MatrixXd M)
    : spec_(spec), is_real_(true), Mr_(std::move(M)) {
  spec_.validate();
  if (Mr_.rows() != spec_.q || Mr_.cols() != spec_.p)
    throw std::invalid_argument("TransformMatrix: matrix shape != (q,p)");
  Mr_pinv_ = pseudoinverse(Mr_);
  Mc_ = Mr_.cast<cd>();
  Mc_pinv_ = Mr_pinv_.cast<cd>();
  finish();
}

TransformMatrix::TransformMatrix(TransformSpec spec, MatrixXcd M)
    : spec_(spec), is_real_(false), Mc_(std::move(M)) {
  spec_.validate();
  if (Mc_.rows() != spec_.q || Mc_.cols() != spec_.p)
    throw std::invalid_argument("TransformMatrix: matrix shape != (q,p)");
  Mc_pinv_ = pseudoinverse(Mc_);
  finish();
}

const MatrixXd& TransformMatrix::real() const {
  if (!is_real_)
    throw std::logic_error("TransformMatrix: complex transform has no real view");
  return Mr_;
}

const MatrixXd& TransformMatrix::real_pinv() const {
  if (!is_real_)
    throw std::logic_error("TransformMatrix: complex transform has no real view");
  return Mr_pinv_;
}

void TransformMatrix::finish() {
  const Index p = spec_.p, q = spec_.q;
  if (numerical_rank(Mc_) != std::min(p, q))
    throw std::invalid_argument("TransformMatrix: M is rank-deficient");
  const MatrixXcd Ip = MatrixXcd::Identity(p, p);
  const MatrixXcd Iq = MatrixXcd::Identity(q, q);
  const double tol = 1e-10;
  switch (spec_.regime) {
    case Regime::invertible:
      if ((Mc_ * Mc_pinv_ - Ip).norm() > tol ||
          (Mc_pinv_ * Mc_ - Ip).norm() > tol)
        throw std::runtime_error("TransformMatrix: inverse identity failed");
      break;
    case Regime::surjective:
      if ((Mc_ * Mc_pinv_ - Iq).norm() > tol)
        throw std::runtime_error("TransformMatrix: right-inverse identity failed");
      break;
    case Regime::injective:
      if ((Mc_pinv_ * Mc_ - Ip).norm() > tol)
        throw std::runtime_error("TransformMatrix: left-inverse identity failed");
      break;
  }
}

TransformMatrix build_transform(const TransformSpec& spec, const Tensor3d* data,
                                std::uint64_t seed) {
  spec.validate();
  const Index p = spec.p;
  switch (spec.family) {
    case Family::identity:
      return TransformMatrix(spec,
                             shape_to_regime(MatrixXd(MatrixXd::Identity(p, p)),
                                             spec, seed));
    case Family::dct:
      return TransformMatrix(spec, shape_to_regime(dct_matrix(p), spec, seed));
    case Family::dst:
      return TransformMatrix(spec, shape_to_regime(dst_matrix(p), spec, seed));
    case Family::dft:
      return TransformMatrix(spec, shape_to_regime(dft_matrix(p), spec, seed));
    case Family::u3: {
      if (data == nullptr)
        throw std::invalid_argument("u3 transform requires data");
      if (data->slices() != p)
        throw std::invalid_argument("u3 transform: data slice count != p");
      return TransformMatrix(spec,
                             shape_to_regime(u3_from_data(*data), spec, seed));
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace mcur
