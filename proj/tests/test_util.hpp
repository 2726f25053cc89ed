#pragma once

#include <random>

#include "mcur/mcur.hpp"

namespace mcur::testutil {

inline Tensor3d random_tensor(Index m, Index n, Index p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Tensor3d t(m, n, p);
  for (auto& v : t.data()) v = dist(rng);
  return t;
}

inline Tensor3c random_tensor_c(Index m, Index n, Index p,
                                std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Tensor3c t(m, n, p);
  for (auto& v : t.data()) v = cd(dist(rng), dist(rng));
  return t;
}

template <class T>
MatrixX<T> random_matrix(Index m, Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  MatrixX<T> M(m, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) {
      if constexpr (std::is_same_v<T, cd>)
        M(i, j) = cd(dist(rng), dist(rng));
      else
        M(i, j) = dist(rng);
    }
  return M;
}

// Tensor with every hat-domain slice of rank <= r: build random m x r and
// r x n hat slices, multiply facewise, map back with M^+.
template <class T>
Tensor3<T> random_multirank_tensor(Index m, Index n, Index r,
                                   const TransformMatrix& M,
                                   std::mt19937_64& rng) {
  const Index q = M.rows();
  Tensor3<T> hat(m, n, q);
  for (Index k = 0; k < q; ++k)
    hat.slice(k) =
        random_matrix<T>(m, r, rng) * random_matrix<T>(r, n, rng);
  return unhat(hat, M);
}

inline IndexSet random_index_set(Index count, Index bound,
                                 std::mt19937_64& rng) {
  std::vector<Index> all(static_cast<std::size_t>(bound));
  std::iota(all.begin(), all.end(), Index{0});
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(static_cast<std::size_t>(count));
  return IndexSet(std::move(all), bound);
}

}  // namespace mcur::testutil
