#pragma once

// Robust low-rank + sparse separation X = L + S. The low-rank step is the
// *_M-CUR reconstruction at multirank r with Q-DEIM indices; the sparse
// step is entrywise hard thresholding with a geometrically decaying level.

#include <cstdint>

#include "mcur/mcur.hpp"

namespace mcur {

struct SeparationConfig {
  Index rank = 1;
  TransformSpec transform;
  double zeta0 = -1.0;  // < 0: auto from the per-pixel temporal median
  double gamma = 0.7;
  int max_iters = 50;
  double tol = 1e-4;
  bool resample_indices = false;
  std::uint64_t seed = 0;

  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  double residual = 0.0;  // ||X - L - S||_F / ||X||_F
  double zeta = 0.0;
  double elapsed_seconds = 0.0;
};

struct SeparationResult {
  Tensor3d L;
  Tensor3d S;
  std::vector<IterationRecord> trace;
  bool converged = false;
};

/// Keep entries with |value| > zeta, zero the rest.
template <class T>
Tensor3<T> hard_threshold(const Tensor3<T>& t, double zeta) {
  if (zeta < 0) throw std::invalid_argument("hard_threshold: zeta < 0");
  Tensor3<T> out = t;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0;
       i < static_cast<std::ptrdiff_t>(out.data().size()); ++i) {
    auto& v = out.data()[static_cast<std::size_t>(i)];
    if (std::abs(v) <= zeta) v = T{};
  }
  return out;
}

SeparationResult separate(const Tensor3d& X, const SeparationConfig& cfg);

enum class Motion { none, linear };

struct SynthVideo {
  Tensor3d X;
  Tensor3<std::uint8_t> fg_mask;
  MatrixXd bg;
};

/// Deterministic synthetic grayscale sequence: a static smooth background
/// plus a bright moving square. Pixel values in [0,1].
SynthVideo synth_video(Index m, Index n, Index p, Index square_size,
                       Motion motion, std::uint64_t seed);

}  // namespace mcur
