#include "mcur/separation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

namespace mcur {

void SeparationConfig::validate() const {
  if (rank < 1) throw std::invalid_argument("SeparationConfig: rank < 1");
  if (gamma <= 0.0 || gamma >= 1.0)
    throw std::invalid_argument("SeparationConfig: gamma must be in (0,1)");
  if (tol <= 0.0) throw std::invalid_argument("SeparationConfig: tol <= 0");
  if (max_iters < 1)
    throw std::invalid_argument("SeparationConfig: max_iters < 1");
}

namespace {

// Largest deviation of X from its per-pixel temporal median; the first
// threshold then passes only genuine outliers.
double auto_zeta0(const Tensor3d& X) {
  const Index m = X.rows(), n = X.cols(), p = X.slices();
  double zeta = 0.0;
#pragma omp parallel for reduction(max : zeta) collapse(2) schedule(static)
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) {
      std::vector<double> tube(static_cast<std::size_t>(p));
      for (Index k = 0; k < p; ++k)
        tube[static_cast<std::size_t>(k)] = X(i, j, k);
      std::nth_element(tube.begin(), tube.begin() + p / 2, tube.end());
      const double med = tube[static_cast<std::size_t>(p / 2)];
      for (Index k = 0; k < p; ++k)
        zeta = std::max(zeta, std::abs(X(i, j, k) - med));
    }
  return zeta;
}

template <class T>
Tensor3d low_rank_step(const Tensor3d& D, const TransformMatrix& M,
                       const IndexSet& I, const IndexSet& J) {
  if constexpr (std::is_same_v<T, double>) {
    return mcur_reconstruct(mcur_decompose(D, M, I, J), M);
  } else {
    Tensor3c Dc = to_complex(D);
    return real_part(mcur_reconstruct(mcur_decompose(Dc, M, I, J), M));
  }
}

template <class T>
std::pair<IndexSet, IndexSet> select_indices(const Tensor3d& D,
                                             const TransformMatrix& M,
                                             Index r) {
  if constexpr (std::is_same_v<T, double>) {
    return qdeim_select(D, M, r);
  } else {
    return qdeim_select(to_complex(D), M, r);
  }
}

template <class T>
SeparationResult separate_impl(const Tensor3d& X, const SeparationConfig& cfg,
                               const TransformMatrix& M) {
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  SeparationResult res;
  const double norm_X = frobenius_norm(X);
  if (norm_X == 0.0) {
    res.L = Tensor3d(X.rows(), X.cols(), X.slices());
    res.S = res.L;
    res.trace.push_back({1, 0.0, 0.0, elapsed()});
    res.converged = true;
    return res;
  }

  const double zeta0 = cfg.zeta0 >= 0 ? cfg.zeta0 : auto_zeta0(X);
  Tensor3d S(X.rows(), X.cols(), X.slices());
  Tensor3d L = S;
  std::optional<std::pair<IndexSet, IndexSet>> indices;
  double prev_residual = std::numeric_limits<double>::infinity();

  for (int it = 1; it <= cfg.max_iters; ++it) {
    Tensor3d D = X - S;
    if (!indices || cfg.resample_indices)
      indices = select_indices<T>(D, M, cfg.rank);
    L = low_rank_step<T>(D, M, indices->first, indices->second);
    const double zeta = std::pow(cfg.gamma, it) * zeta0;
    S = hard_threshold(X - L, zeta);
    const double residual = frobenius_norm(X - L - S) / norm_X;
    res.trace.push_back({it, residual, zeta, elapsed()});
    if (std::abs(prev_residual - residual) < cfg.tol) {
      res.converged = true;
      break;
    }
    prev_residual = residual;
  }
  res.L = std::move(L);
  res.S = std::move(S);
  return res;
}

}  // namespace

SeparationResult separate(const Tensor3d& X, const SeparationConfig& cfg) {
  cfg.validate();
  if (X.empty() || X.slices() != cfg.transform.p)
    throw std::invalid_argument("separate: transform p != slice count");
  TransformMatrix M = build_transform(cfg.transform, &X, cfg.seed);
  if (M.is_real()) return separate_impl<double>(X, cfg, M);
  return separate_impl<cd>(X, cfg, M);
}

SynthVideo synth_video(Index m, Index n, Index p, Index square_size,
                       Motion motion, std::uint64_t seed) {
  if (m < 1 || n < 1 || p < 1)
    throw std::invalid_argument("synth_video: dims must be positive");
  if (square_size < 0 || square_size > m || square_size > n)
    throw std::invalid_argument("synth_video: square does not fit in frame");

  SynthVideo out;
  // Spatially rank-1 background (so the broadcast tensor has multirank 1):
  // outer product of two smooth seeded profiles, values kept in (0, 0.5).
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.02, 0.02);
  Eigen::VectorXd u(m), v(n);
  const double pi = 3.14159265358979323846;
  for (Index i = 0; i < m; ++i)
    u(i) = 0.55 + 0.2 * std::sin(pi * i / std::max<Index>(m - 1, 1)) +
           jitter(rng);
  for (Index j = 0; j < n; ++j)
    v(j) = 0.45 + 0.15 * std::cos(pi * j / std::max<Index>(n - 1, 1)) +
           jitter(rng);
  out.bg = u * v.transpose();

  out.X = Tensor3d(m, n, p);
  out.fg_mask = Tensor3<std::uint8_t>(m, n, p);
  const Index s = square_size;
  for (Index k = 0; k < p; ++k) {
    out.X.slice(k) = out.bg;
    if (s == 0) continue;
    const double frac = p > 1 ? static_cast<double>(k) / (p - 1) : 0.0;
    Index ci = 1, cj = 1;
    if (motion == Motion::linear) {
      ci = static_cast<Index>(std::lround(frac * (m - s)));
      cj = static_cast<Index>(std::lround(frac * (n - s)));
    }
    ci = std::clamp<Index>(ci, 0, m - s);
    cj = std::clamp<Index>(cj, 0, n - s);
    for (Index j = cj; j < cj + s; ++j)
      for (Index i = ci; i < ci + s; ++i) {
        out.X(i, j, k) = std::min(out.bg(i, j) + 0.5, 1.0);
        out.fg_mask(i, j, k) = 1;
      }
  }
  return out;
}

}  // namespace mcur
