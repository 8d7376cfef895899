#include "omnivr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "omnivr/error.hpp"

namespace omnivr {

namespace {

void require_same(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw Error(ErrorCode::kShapeMismatch, "metric inputs differ in shape");
}

double psnr_from_mse(double mse) {
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

std::vector<double> gaussian_window(int size, double sigma) {
  std::vector<double> g(size);
  double total = 0.0;
  const double c = (size - 1) / 2.0;
  for (int i = 0; i < size; ++i) {
    g[i] = std::exp(-(i - c) * (i - c) / (2.0 * sigma * sigma));
    total += g[i];
  }
  for (double& v : g) v /= total;
  return g;
}

// Separable valid filtering of one plane.
std::vector<double> filter_valid(const std::vector<double>& in, int w, int h,
                                 const std::vector<double>& g) {
  const int k = static_cast<int>(g.size());
  const int ow = w - k + 1, oh = h - k + 1;
  std::vector<double> tmp(static_cast<std::size_t>(h) * ow);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += g[i] * in[static_cast<std::size_t>(y) * w + x + i];
      tmp[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += g[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

}  // namespace

double psnr(const Image& a, const Image& b) {
  require_same(a, b);
  double se = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    se += d * d;
  }
  return psnr_from_mse(se / static_cast<double>(a.data().size()));
}

double ssim(const Image& a, const Image& b) {
  require_same(a, b);
  constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  const int w = a.width(), h = a.height();
  const int win = std::min({11, w, h});
  // Shrunk windows keep sigma proportional to the window size.
  const auto g = gaussian_window(win, 1.5 * win / 11.0);
  double total = 0.0;
  for (int c = 0; c < Image::kChannels; ++c) {
    std::vector<double> x(a.plane(c).begin(), a.plane(c).end());
    std::vector<double> y(b.plane(c).begin(), b.plane(c).end());
    std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      xx[i] = x[i] * x[i];
      yy[i] = y[i] * y[i];
      xy[i] = x[i] * y[i];
    }
    const auto mx = filter_valid(x, w, h, g), my = filter_valid(y, w, h, g);
    const auto sxx = filter_valid(xx, w, h, g), syy = filter_valid(yy, w, h, g),
               sxy = filter_valid(xy, w, h, g);
    double acc = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const double vx = sxx[i] - mx[i] * mx[i];
      const double vy = syy[i] - my[i] * my[i];
      const double cov = sxy[i] - mx[i] * my[i];
      acc += ((2 * mx[i] * my[i] + c1) * (2 * cov + c2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    total += acc / static_cast<double>(mx.size());
  }
  return total / Image::kChannels;
}

double ws_psnr(const Image& a, const Image& b) {
  require_same(a, b);
  const int h = a.height(), w = a.width();
  double num = 0.0, den = 0.0;
  for (int y = 0; y < h; ++y) {
    const double wy = std::cos(std::numbers::pi * (y + 0.5 - h / 2.0) / h);
    double row = 0.0;
    for (int c = 0; c < Image::kChannels; ++c) {
      for (int x = 0; x < w; ++x) {
        const double d = a.at(c, y, x) - b.at(c, y, x);
        row += d * d;
      }
    }
    num += wy * row;
    den += wy * Image::kChannels * w;
  }
  return psnr_from_mse(num / den);
}

MetricReport metric_suite(const Image& pred, const Image& gt, ImageKind kind) {
  MetricReport r;
  r.psnr = psnr(pred, gt);
  r.ssim = ssim(pred, gt);
  r.ws_psnr = kind == ImageKind::kErp ? ws_psnr(pred, gt) : std::numeric_limits<double>::quiet_NaN();
  return r;
}

}  // namespace omnivr
