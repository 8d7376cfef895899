#pragma once

#include "omnivr/image.hpp"

namespace omnivr {

// Reported for identical inputs, where PSNR is unbounded.
inline constexpr double kPsnrCap = 99.0;

// 10 log10(1 / MSE) over all channels, [0, 1] data.
double psnr(const Image& a, const Image& b);

// Mean SSIM over valid 11x11 Gaussian windows (sigma 1.5), K1 = 0.01,
// K2 = 0.03, dynamic range 1, averaged over the three channels. Images smaller
// than the window use a single window covering the whole image.
double ssim(const Image& a, const Image& b);

// PSNR with rows weighted by cos(pi (y + 0.5 - H/2) / H), weights normalized.
double ws_psnr(const Image& a, const Image& b);

enum class ImageKind { kViewport, kErp };

struct MetricReport {
  double psnr = 0.0;
  double ssim = 0.0;
  double ws_psnr = 0.0;  // ERP only; NaN for viewports
};

MetricReport metric_suite(const Image& pred, const Image& gt, ImageKind kind);

}  // namespace omnivr
