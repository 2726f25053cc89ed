// Compares the OpenMP kernels against the serial reference implementations
// on a video-sized tensor and reports speedups.

#include <cstdio>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mcur/metrics.hpp"
#include "mcur/ref_kernels.hpp"
#include "mcur/tensor.hpp"
#include "mcur/transforms.hpp"

using namespace mcur;

namespace {

Tensor3d random_tensor(Index m, Index n, Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Tensor3d t(m, n, p);
  for (auto& v : t.data()) v = dist(rng);
  return t;
}

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) best = std::min(best, time_block(f).second);
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  Index m = 192, n = 192, p = 96;
  if (argc == 4) {
    m = std::atol(argv[1]);
    n = std::atol(argv[2]);
    p = std::atol(argv[3]);
  }
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP\n");
#endif
  std::printf("tensor size %ld x %ld x %ld\n\n", long(m), long(n), long(p));

  Tensor3d a = random_tensor(m, n, p, 1);
  Tensor3d b = random_tensor(n, m, p, 2);
  MatrixXd M = dct_matrix(p);

  struct Row {
    const char* name;
    double serial, parallel, dev;
  };
  std::vector<Row> rows;

  {
    auto [ref_out, ts] = time_block([&] { return ref::mode3_product(a, M); });
    double tp = best_of(3, [&] { return mode3_product(a, M); });
    rows.push_back({"mode3_product", ts, tp, rel_error(mode3_product(a, M), ref_out)});
  }
  {
    auto [ref_out, ts] =
        time_block([&] { return ref::facewise_product(a, b); });
    double tp = best_of(3, [&] { return facewise_product(a, b); });
    rows.push_back(
        {"facewise_product", ts, tp, rel_error(facewise_product(a, b), ref_out)});
  }
  {
    auto [ref_out, ts] = time_block([&] { return ref::frobenius_norm(a); });
    double tp = best_of(3, [&] { return frobenius_norm(a); });
    rows.push_back({"frobenius_norm", ts, tp,
                    std::abs(frobenius_norm(a) - ref_out) / ref_out});
  }

  std::printf("%-18s %12s %12s %9s %12s\n", "kernel", "serial (s)",
              "parallel(s)", "speedup", "rel dev");
  for (const auto& r : rows)
    std::printf("%-18s %12.4f %12.4f %8.2fx %12.3e\n", r.name, r.serial,
                r.parallel, r.serial / r.parallel, r.dev);
  return 0;
}
