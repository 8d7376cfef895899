#include <algorithm>
#include <cmath>
#include <numbers>

#include "omnivr/codec/jpeg.hpp"

namespace omnivr::codec {

namespace {

constexpr std::array<int, 64> kLumaBase = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

constexpr std::array<int, 64> kChromaBase = {
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99, 47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

const std::array<double, 64>& dct_basis() {
  static const std::array<double, 64> b = [] {
    std::array<double, 64> m{};
    for (int k = 0; k < 8; ++k) {
      const double ck = k == 0 ? std::sqrt(0.125) : 0.5;
      for (int i = 0; i < 8; ++i) m[k * 8 + i] = ck * std::cos((2 * i + 1) * k * std::numbers::pi / 16);
    }
    return m;
  }();
  return b;
}

}  // namespace

const std::array<int, 64>& zigzag_to_natural() {
  static const std::array<int, 64> order = [] {
    std::array<int, 64> z{};
    int k = 0;
    for (int s = 0; s < 15; ++s) {
      // Odd anti-diagonals run top-right to bottom-left, even ones the other way.
      if (s % 2 == 1) {
        for (int r = std::max(0, s - 7); r <= std::min(7, s); ++r) z[k++] = r * 8 + (s - r);
      } else {
        for (int r = std::min(7, s); r >= std::max(0, s - 7); --r) z[k++] = r * 8 + (s - r);
      }
    }
    return z;
  }();
  return order;
}

int QuantTables::max_entry() const {
  return std::max(*std::max_element(luma.begin(), luma.end()),
                  *std::max_element(chroma.begin(), chroma.end()));
}

QuantTables standard_tables(double quality) {
  quality = std::clamp(quality, 1.0, 100.0);
  const double scale = quality < 50.0 ? 5000.0 / quality : 200.0 - 2.0 * quality;
  QuantTables q;
  q.quality = quality;
  for (int i = 0; i < 64; ++i) {
    q.luma[i] = std::clamp(static_cast<int>(std::floor((kLumaBase[i] * scale + 50.0) / 100.0)), 1, 255);
    q.chroma[i] =
        std::clamp(static_cast<int>(std::floor((kChromaBase[i] * scale + 50.0) / 100.0)), 1, 255);
  }
  return q;
}

QuantTables unit_tables() {
  QuantTables q;
  q.luma.fill(1);
  q.chroma.fill(1);
  q.quality = 100.0;
  return q;
}

std::array<double, 3> rgb_to_ycbcr(double r, double g, double b) {
  return {0.299 * r + 0.587 * g + 0.114 * b,
          -0.168735892 * r - 0.331264108 * g + 0.5 * b + 128.0,
          0.5 * r - 0.418687589 * g - 0.081312411 * b + 128.0};
}

std::array<double, 3> ycbcr_to_rgb(double y, double cb, double cr) {
  cb -= 128.0;
  cr -= 128.0;
  return {y + 1.402 * cr, y - 0.344136286 * cb - 0.714136286 * cr, y + 1.772 * cb};
}

void fdct8x8(const double* in, double* out) {
  const auto& b = dct_basis();
  double tmp[64];
  for (int y = 0; y < 8; ++y) {
    for (int k = 0; k < 8; ++k) {
      double s = 0.0;
      for (int i = 0; i < 8; ++i) s += b[k * 8 + i] * in[y * 8 + i];
      tmp[y * 8 + k] = s;
    }
  }
  for (int x = 0; x < 8; ++x) {
    for (int k = 0; k < 8; ++k) {
      double s = 0.0;
      for (int i = 0; i < 8; ++i) s += b[k * 8 + i] * tmp[i * 8 + x];
      out[k * 8 + x] = s;
    }
  }
}

void idct8x8(const double* in, double* out) {
  const auto& b = dct_basis();
  double tmp[64];
  for (int y = 0; y < 8; ++y) {
    for (int i = 0; i < 8; ++i) {
      double s = 0.0;
      for (int k = 0; k < 8; ++k) s += b[k * 8 + i] * in[y * 8 + k];
      tmp[y * 8 + i] = s;
    }
  }
  for (int x = 0; x < 8; ++x) {
    for (int i = 0; i < 8; ++i) {
      double s = 0.0;
      for (int k = 0; k < 8; ++k) s += b[k * 8 + i] * tmp[k * 8 + x];
      out[i * 8 + x] = s;
    }
  }
}

CoeffBlocks forward_quantize(const Image& img, const QuantTables& q) {
  CoeffBlocks out;
  out.blocks_w = (img.width() + 7) / 8;
  out.blocks_h = (img.height() + 7) / 8;
  for (auto& ch : out.channels) ch.resize(out.block_count());
  const auto& zz = zigzag_to_natural();
  double planes[3][64];
  double coef[64];
  for (int by = 0; by < out.blocks_h; ++by) {
    for (int bx = 0; bx < out.blocks_w; ++bx) {
      for (int y = 0; y < 8; ++y) {
        const int sy = std::min(by * 8 + y, img.height() - 1);
        for (int x = 0; x < 8; ++x) {
          const int sx = std::min(bx * 8 + x, img.width() - 1);
          const auto ycc = rgb_to_ycbcr(255.0 * img.at(0, sy, sx), 255.0 * img.at(1, sy, sx),
                                        255.0 * img.at(2, sy, sx));
          for (int c = 0; c < 3; ++c) planes[c][y * 8 + x] = ycc[c] - 128.0;
        }
      }
      const std::size_t blk = static_cast<std::size_t>(by) * out.blocks_w + bx;
      for (int c = 0; c < 3; ++c) {
        fdct8x8(planes[c], coef);
        const auto& t = q.table(c);
        auto& dst = out.channels[c][blk];
        for (int k = 0; k < 64; ++k) {
          const int n = zz[k];
          // Baseline categories: AC magnitudes <= 1023, DC differences <= 2047.
          const int lo = k == 0 ? -1024 : -1023;
          dst[k] = std::clamp(static_cast<int>(std::nearbyint(coef[n] / t[n])), lo, 1023);
        }
      }
    }
  }
  return out;
}

Image reconstruct(const CoeffBlocks& blocks, const QuantTables& q, int width, int height) {
  Image out(width, height);
  const auto& zz = zigzag_to_natural();
  double coef[64];
  double planes[3][64];
  for (int by = 0; by < blocks.blocks_h; ++by) {
    for (int bx = 0; bx < blocks.blocks_w; ++bx) {
      const std::size_t blk = static_cast<std::size_t>(by) * blocks.blocks_w + bx;
      for (int c = 0; c < 3; ++c) {
        const auto& t = q.table(c);
        const auto& src = blocks.channels[c][blk];
        for (int k = 0; k < 64; ++k) coef[zz[k]] = static_cast<double>(src[k]) * t[zz[k]];
        idct8x8(coef, planes[c]);
      }
      for (int y = 0; y < 8; ++y) {
        const int oy = by * 8 + y;
        if (oy >= height) break;
        for (int x = 0; x < 8; ++x) {
          const int ox = bx * 8 + x;
          if (ox >= width) break;
          const int i = y * 8 + x;
          const auto rgb =
              ycbcr_to_rgb(planes[0][i] + 128.0, planes[1][i] + 128.0, planes[2][i] + 128.0);
          for (int c = 0; c < 3; ++c) out.at(c, oy, ox) = std::clamp(rgb[c] / 255.0, 0.0, 1.0);
        }
      }
    }
  }
  return out;
}

double bpp_real(std::size_t n_bytes, int hr_height, int hr_width) {
  if (hr_height <= 0 || hr_width <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "bpp denominator must be positive");
  }
  return 8.0 * static_cast<double>(n_bytes) / (static_cast<double>(hr_height) * hr_width);
}

RateFit fit_quant_tables(const Image& img, double target_bpp, int hr_height, int hr_width,
                         double tol, HuffmanMode mode) {
  if (!(target_bpp > 0.0)) throw Error(ErrorCode::kInvalidArgument, "target bpp must be positive");
  RateFit best;
  double best_err = INFINITY;
  int evaluations = 0;
  auto evaluate = [&](double quality) {
    RateFit r;
    r.tables = standard_tables(quality);
    r.encoded = encode(img, r.tables, mode);
    r.bpp = bpp_real(r.encoded.bytes.size(), hr_height, hr_width);
    ++evaluations;
    const double bpp = r.bpp;
    const double err = std::abs(bpp - target_bpp) / target_bpp;
    if (err < best_err) {
      best_err = err;
      best = std::move(r);
    }
    best.evaluations = evaluations;
    return bpp;
  };
  double lo = 1.0, hi = 100.0;
  const double bpp_hi = evaluate(hi);
  if (best_err <= tol) return best;
  if (bpp_hi < target_bpp) {
    throw Error(ErrorCode::kTargetUnreachable,
                "target exceeds the finest-table rate " + std::to_string(bpp_hi) + " bpp");
  }
  const double bpp_lo = evaluate(lo);
  if (best_err <= tol) return best;
  if (bpp_lo > target_bpp) {
    throw Error(ErrorCode::kTargetUnreachable,
                "target is below the coarsest-table rate " + std::to_string(bpp_lo) + " bpp");
  }
  // Invariant: bpp(lo) < target < bpp(hi).
  for (int it = 0; it < 40 && hi - lo > 1e-6; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double bpp = evaluate(mid);
    if (best_err <= tol) return best;
    (bpp < target_bpp ? lo : hi) = mid;
  }
  throw Error(ErrorCode::kTargetUnreachable,
              "no quality reaches " + std::to_string(target_bpp) + " bpp within tolerance");
}

}  // namespace omnivr::codec
