#include "mcur/metrics.hpp"

#include <cmath>
#include <limits>

namespace mcur {

MetricReport evaluate(const Tensor3d& est_bg, const Tensor3d& gt_bg,
                      const MetricOptions& opts) {
  if (est_bg.rows() != gt_bg.rows() || est_bg.cols() != gt_bg.cols())
    throw std::invalid_argument("evaluate: spatial dims mismatch");
  if (gt_bg.slices() != 1 && gt_bg.slices() != est_bg.slices())
    throw std::invalid_argument("evaluate: ground truth must have 1 or matching slices");

  const double scale = opts.scale255 ? 1.0 : 255.0;
  const Index p = est_bg.slices();
  const double npix = static_cast<double>(est_bg.rows() * est_bg.cols());

  MetricReport rep;
  rep.per_frame.resize(static_cast<std::size_t>(p));
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < p; ++k) {
    const Index gk = gt_bg.slices() == 1 ? 0 : k;
    double sum_abs = 0.0, sum_sq = 0.0;
    Index bad = 0;
    for (Index j = 0; j < est_bg.cols(); ++j)
      for (Index i = 0; i < est_bg.rows(); ++i) {
        const double d = scale * (est_bg(i, j, k) - gt_bg(i, j, gk));
        sum_abs += std::abs(d);
        sum_sq += d * d;
        if (std::abs(d) > opts.tau) ++bad;
      }
    FrameMetrics& fm = rep.per_frame[static_cast<std::size_t>(k)];
    fm.age = sum_abs / npix;
    fm.peps = static_cast<double>(bad) / npix;
    const double mse = sum_sq / npix;
    fm.psnr = mse == 0.0 ? std::numeric_limits<double>::infinity()
                         : 10.0 * std::log10(255.0 * 255.0 / mse);
  }

  double psnr_sum = 0.0;
  int finite = 0;
  for (const auto& fm : rep.per_frame) {
    rep.avg_age += fm.age;
    rep.avg_peps += fm.peps;
    if (std::isinf(fm.psnr)) {
      ++rep.inf_psnr_frames;
    } else {
      psnr_sum += fm.psnr;
      ++finite;
    }
  }
  rep.avg_age /= static_cast<double>(p);
  rep.avg_peps /= static_cast<double>(p);
  rep.avg_psnr = finite > 0 ? psnr_sum / finite
                            : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace mcur
