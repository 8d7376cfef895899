#pragma once

#include <array>

#include "omnivr/geometry.hpp"
#include "omnivr/image.hpp"

namespace omnivr {

enum class KernelType { kNearest, kBilinear, kBicubic };

struct Kernel {
  KernelType type = KernelType::kBicubic;
  double a = -0.5;  // Keys parameter, bicubic only

  static Kernel nearest() { return {KernelType::kNearest}; }
  static Kernel bilinear() { return {KernelType::kBilinear}; }
  static Kernel bicubic(double a = -0.5) { return {KernelType::kBicubic, a}; }
};

// Keys cubic convolution weight for a tap at signed distance t.
double cubic_weight(double t, double a = -0.5);

// The four taps of bilinear interpolation, ordered (y0,x0) (y0,x1) (y1,x0) (y1,x1).
// `index` addresses a row-major plane of the given size. With wrap_x the column
// is taken modulo width; rows (and columns otherwise) are clamped.
struct BilinearTaps {
  std::array<int, 4> index{};
  std::array<int, 4> row{};
  std::array<int, 4> col{};
  std::array<double, 4> weight{};
};

BilinearTaps bilinear_taps(double x, double y, int width, int height, bool wrap_x);

Rgb sample_at(const Image& img, const ErpCoord& c, const Kernel& kernel, bool wrap_longitude);

enum class EdgeMode { kClamp, kWrapX };

// Antialiased bicubic reduction by an integer factor (Keys kernel stretched by
// `scale`, per-pixel normalized weights). Output clamped to [0, 1].
Image bicubic_downscale(const Image& img, int scale, EdgeMode edge = EdgeMode::kClamp);

// p x p crop with the top-left corner at column a, row b. Columns wrap modulo W.
Image crop_patch(const Image& img, int a, int b, int p);

// Per-pixel baseline renderer: sample the panorama at f^-1 of every viewport pixel center.
Image render_viewport_baseline(const Image& erp, const ViewportSpec& spec, const Kernel& kernel);

}  // namespace omnivr
