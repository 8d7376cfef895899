#include <algorithm>
#include <cmath>

#include "omnivr/oracles/oracles.hpp"

namespace omnivr::oracle {

namespace {

double keys(double t) {
  t = std::abs(t);
  const double a = -0.5;
  if (t < 1) return (a + 2) * t * t * t - (a + 3) * t * t + 1;
  if (t < 2) return a * t * t * t - 5 * a * t * t + 8 * a * t - 4 * a;
  return 0.0;
}

}  // namespace

Image dense_downscale(const Image& img, int scale, bool wrap_x) {
  const int ow = img.width() / scale, oh = img.height() / scale;
  Image out(ow, oh);
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      const double cx = (ox + 0.5) * scale - 0.5, cy = (oy + 0.5) * scale - 0.5;
      double acc[3] = {0, 0, 0}, total = 0.0;
      for (int y = static_cast<int>(std::floor(cy)) - 2 * scale; y <= cy + 2 * scale; ++y) {
        for (int x = static_cast<int>(std::floor(cx)) - 2 * scale; x <= cx + 2 * scale; ++x) {
          const double w = keys((x - cx) / scale) * keys((y - cy) / scale);
          if (w == 0.0) continue;
          const int sx = wrap_x ? ((x % img.width()) + img.width()) % img.width() : std::clamp(x, 0, img.width() - 1), sy = std::clamp(y, 0, img.height() - 1);
          for (int c = 0; c < 3; ++c) acc[c] += w * img.at(c, sy, sx);
          total += w;
        }
      }
      for (int c = 0; c < 3; ++c) out.at(c, oy, ox) = std::clamp(acc[c] / total, 0.0, 1.0);
    }
  }
  return out;
}

}  // namespace omnivr::oracle
