#include "omnivr/resample.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "omnivr/error.hpp"

namespace omnivr {

namespace {

int wrap_index(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

int clamp_index(int i, int n) { return std::clamp(i, 0, n - 1); }

double wrap_coord(double x, int n) {
  double w = std::fmod(x, static_cast<double>(n));
  if (w < 0.0) w += n;
  if (w >= n) w -= n;
  return w;
}

}  // namespace

double cubic_weight(double t, double a) {
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

BilinearTaps bilinear_taps(double x, double y, int width, int height, bool wrap_x) {
  y = std::clamp(y, 0.0, static_cast<double>(height - 1));
  x = wrap_x ? wrap_coord(x, width) : std::clamp(x, 0.0, static_cast<double>(width - 1));
  const double fx0 = std::floor(x), fy0 = std::floor(y);
  const double fx = x - fx0, fy = y - fy0;
  const int x0 = static_cast<int>(fx0), y0 = static_cast<int>(fy0);
  const int xa = wrap_x ? wrap_index(x0, width) : clamp_index(x0, width);
  const int xb = wrap_x ? wrap_index(x0 + 1, width) : clamp_index(x0 + 1, width);
  const int ya = clamp_index(y0, height), yb = clamp_index(y0 + 1, height);
  BilinearTaps t;
  t.row = {ya, ya, yb, yb};
  t.col = {xa, xb, xa, xb};
  t.weight = {(1.0 - fx) * (1.0 - fy), fx * (1.0 - fy), (1.0 - fx) * fy, fx * fy};
  for (int k = 0; k < 4; ++k) t.index[k] = t.row[k] * width + t.col[k];
  return t;
}

Rgb sample_at(const Image& img, const ErpCoord& c, const Kernel& kernel, bool wrap_longitude) {
  const int w = img.width(), h = img.height();
  const double y = std::clamp(c.x2, 0.0, static_cast<double>(h - 1));
  const double x = wrap_longitude ? wrap_coord(c.x1, w)
                                  : std::clamp(c.x1, 0.0, static_cast<double>(w - 1));
  auto col = [&](int i) { return wrap_longitude ? wrap_index(i, w) : clamp_index(i, w); };
  Rgb out{0.0, 0.0, 0.0};
  switch (kernel.type) {
    case KernelType::kNearest: {
      const int xi = col(static_cast<int>(std::floor(x + 0.5)));
      const int yi = clamp_index(static_cast<int>(std::floor(y + 0.5)), h);
      return img.pixel(yi, xi);
    }
    case KernelType::kBilinear: {
      const BilinearTaps t = bilinear_taps(x, y, w, h, wrap_longitude);
      for (int c3 = 0; c3 < Image::kChannels; ++c3) {
        const auto plane = img.plane(c3);
        double s = 0.0;
        for (int k = 0; k < 4; ++k) s += t.weight[k] * plane[t.index[k]];
        out[c3] = s;
      }
      return out;
    }
    case KernelType::kBicubic: {
      const double fx0 = std::floor(x), fy0 = std::floor(y);
      const int x0 = static_cast<int>(fx0), y0 = static_cast<int>(fy0);
      double wx[4], wy[4];
      int cx[4], ry[4];
      for (int k = 0; k < 4; ++k) {
        wx[k] = cubic_weight(x - (fx0 + k - 1), kernel.a);
        wy[k] = cubic_weight(y - (fy0 + k - 1), kernel.a);
        cx[k] = col(x0 + k - 1);
        ry[k] = clamp_index(y0 + k - 1, h);
      }
      for (int c3 = 0; c3 < Image::kChannels; ++c3) {
        double s = 0.0;
        for (int j = 0; j < 4; ++j) {
          double row = 0.0;
          for (int i = 0; i < 4; ++i) row += wx[i] * img.at(c3, ry[j], cx[i]);
          s += wy[j] * row;
        }
        out[c3] = s;
      }
      return out;
    }
  }
  return out;
}

namespace {

struct FilterTaps {
  std::vector<int> first;       // per output sample, offset into `index`/`weight`
  std::vector<int> count;
  std::vector<int> index;
  std::vector<double> weight;
};

FilterTaps downscale_taps(int in_size, int scale, bool wrap) {
  FilterTaps taps;
  const int out_size = in_size / scale;
  const double support = 2.0 * scale;
  for (int o = 0; o < out_size; ++o) {
    const double center = (o + 0.5) * scale - 0.5;
    const int lo = static_cast<int>(std::floor(center - support)) + 1;
    const int hi = static_cast<int>(std::ceil(center + support)) - 1;
    taps.first.push_back(static_cast<int>(taps.index.size()));
    double total = 0.0;
    const std::size_t begin = taps.weight.size();
    for (int i = lo; i <= hi; ++i) {
      const double wgt = cubic_weight((i - center) / scale);
      if (wgt == 0.0) continue;
      taps.index.push_back(wrap ? wrap_index(i, in_size) : clamp_index(i, in_size));
      taps.weight.push_back(wgt);
      total += wgt;
    }
    for (std::size_t k = begin; k < taps.weight.size(); ++k) taps.weight[k] /= total;
    taps.count.push_back(static_cast<int>(taps.weight.size() - begin));
  }
  return taps;
}

}  // namespace

Image bicubic_downscale(const Image& img, int scale, EdgeMode edge) {
  if (scale < 1 || img.width() % scale != 0 || img.height() % scale != 0) {
    throw Error(ErrorCode::kIndivisibleShape, "image dimensions must be divisible by the scale");
  }
  if (scale == 1) return img;
  const int w = img.width(), h = img.height();
  const int ow = w / scale, oh = h / scale;
  const FilterTaps tx = downscale_taps(w, scale, edge == EdgeMode::kWrapX);
  const FilterTaps ty = downscale_taps(h, scale, false);
  Image out(ow, oh);
  std::vector<double> horiz(static_cast<std::size_t>(h) * ow);
  for (int c = 0; c < Image::kChannels; ++c) {
    for (int y = 0; y < h; ++y) {
      for (int o = 0; o < ow; ++o) {
        double s = 0.0;
        for (int k = 0; k < tx.count[o]; ++k) {
          s += tx.weight[tx.first[o] + k] * img.at(c, y, tx.index[tx.first[o] + k]);
        }
        horiz[static_cast<std::size_t>(y) * ow + o] = s;
      }
    }
    for (int o = 0; o < oh; ++o) {
      for (int x = 0; x < ow; ++x) {
        double s = 0.0;
        for (int k = 0; k < ty.count[o]; ++k) {
          s += ty.weight[ty.first[o] + k] *
               horiz[static_cast<std::size_t>(ty.index[ty.first[o] + k]) * ow + x];
        }
        out.at(c, o, x) = std::clamp(s, 0.0, 1.0);
      }
    }
  }
  return out;
}

Image crop_patch(const Image& img, int a, int b, int p) {
  if (p <= 0) throw Error(ErrorCode::kInvalidArgument, "patch size must be positive");
  if (b < 0 || b + p > img.height()) {
    throw Error(ErrorCode::kVerticalOutOfBounds, "patch rows exceed the image height");
  }
  Image out(p, p);
  for (int c = 0; c < Image::kChannels; ++c) {
    for (int y = 0; y < p; ++y) {
      for (int x = 0; x < p; ++x) {
        out.at(c, y, x) = img.at(c, b + y, wrap_index(a + x, img.width()));
      }
    }
  }
  return out;
}

Image render_viewport_baseline(const Image& erp, const ViewportSpec& spec, const Kernel& kernel) {
  const ViewportProjection proj(spec);
  Image out(spec.width, spec.height);
  for (int v = 0; v < spec.height; ++v) {
    for (int u = 0; u < spec.width; ++u) {
      const ErpCoord x = proj.inverse_map({static_cast<double>(u), static_cast<double>(v)},
                                          erp.height(), erp.width());
      out.set_pixel(v, u, sample_at(erp, x, kernel, true));
    }
  }
  return out;
}

Image roll_columns(const Image& img, int k) {
  Image out(img.width(), img.height());
  const int w = img.width();
  for (int c = 0; c < Image::kChannels; ++c) {
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < w; ++x) out.at(c, y, wrap_index(x + k, w)) = img.at(c, y, x);
    }
  }
  return out;
}

}  // namespace omnivr
