#pragma once

// Serial reference kernels. These are deliberately naive (per-tube loops,
// triple-loop matmul) and single-threaded; the tests pin the parallel
// kernels in tensor.hpp against them, and tools/bench_kernels compares
// their runtimes.

#include "mcur/tensor.hpp"

namespace mcur::ref {

template <class TT, class TM>
auto mode3_product(const Tensor3<TT>& t, const MatrixX<TM>& M)
    -> Tensor3<decltype(TT{} * TM{})> {
  using R = decltype(TT{} * TM{});
  if (M.cols() != t.slices())
    throw std::invalid_argument("ref::mode3_product: M cols != slices");
  Tensor3<R> out(t.rows(), t.cols(), M.rows());
  for (Index i = 0; i < t.rows(); ++i)
    for (Index j = 0; j < t.cols(); ++j)
      for (Index k = 0; k < M.rows(); ++k) {
        R acc{};
        for (Index l = 0; l < t.slices(); ++l) acc += M(k, l) * t(i, j, l);
        out(i, j, k) = acc;
      }
  return out;
}

template <class T>
Tensor3<T> facewise_product(const Tensor3<T>& a, const Tensor3<T>& b) {
  if (a.cols() != b.rows() || a.slices() != b.slices())
    throw std::invalid_argument("ref::facewise_product: dims mismatch");
  Tensor3<T> out(a.rows(), b.cols(), a.slices());
  for (Index k = 0; k < a.slices(); ++k)
    for (Index j = 0; j < b.cols(); ++j)
      for (Index i = 0; i < a.rows(); ++i) {
        T acc{};
        for (Index l = 0; l < a.cols(); ++l) acc += a(i, l, k) * b(l, j, k);
        out(i, j, k) = acc;
      }
  return out;
}

template <class T>
double frobenius_norm(const Tensor3<T>& t) {
  double s = 0.0;
  for (const auto& v : t.data()) s += std::norm(std::complex<double>(v));
  return std::sqrt(s);
}

}  // namespace mcur::ref
