#pragma once

// Background-reconstruction metrics: AGE (mean absolute gray-level error),
// pEPs (fraction of pixels with error > tau) and PSNR, per frame and
// averaged, on the 0-255 gray scale.

#include <chrono>
#include <utility>

#include "mcur/tensor.hpp"

namespace mcur {

struct FrameMetrics {
  double age = 0.0;
  double peps = 0.0;
  double psnr = 0.0;  // +inf when the frame matches exactly
};

struct MetricReport {
  std::vector<FrameMetrics> per_frame;
  double avg_age = 0.0;
  double avg_peps = 0.0;
  double avg_psnr = 0.0;   // mean over frames with finite PSNR
  int inf_psnr_frames = 0;  // excluded from avg_psnr
  double runtime_seconds = 0.0;
};

struct MetricOptions {
  double tau = 20.0;      // pEPs threshold, 0-255 scale
  bool scale255 = false;  // inputs already on the 0-255 scale
};

/// Compare an estimated background against ground truth, frame by frame.
/// `gt` may have a single slice, in which case it is broadcast.
MetricReport evaluate(const Tensor3d& est_bg, const Tensor3d& gt_bg,
                      const MetricOptions& opts = {});

inline MetricReport evaluate(const Tensor3d& est_bg, const MatrixXd& gt_image,
                             const MetricOptions& opts = {}) {
  Tensor3d gt(gt_image.rows(), gt_image.cols(), 1);
  gt.slice(0) = gt_image;
  return evaluate(est_bg, gt, opts);
}

/// Run `op`, returning its result and the wall-clock seconds it took.
template <class Op>
auto time_block(Op&& op) {
  const auto t0 = std::chrono::steady_clock::now();
  auto result = std::forward<Op>(op)();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return std::make_pair(std::move(result), secs);
}

}  // namespace mcur
