#include "omnivr/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "omnivr/random.hpp"

namespace omnivr {

namespace {

Vec3 random_direction(Rng& rng) {
  for (;;) {
    const Vec3 v{rng.normal(), rng.normal(), rng.normal()};
    const double n = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
    if (n > 1e-9) return {v.x / n, v.y / n, v.z / n};
  }
}

Rgb random_color(Rng& rng) { return {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}; }

double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

}  // namespace

SphericalPattern::SphericalPattern(std::uint64_t seed, const SyntheticOptions& opts) {
  Rng rng(seed);
  const double lf0 = std::log(opts.min_freq), lf1 = std::log(opts.max_freq);
  double total = 0.0;
  for (int i = 0; i < opts.waves; ++i) {
    Wave w;
    w.dir = random_direction(rng);
    w.freq = std::exp(rng.uniform(lf0, lf1));
    w.phase = rng.uniform(0, kTwoPi);
    w.amp = 1.0 / std::sqrt(w.freq);
    w.edge = rng.uniform() < opts.edge_fraction;
    w.color = random_color(rng);
    total += w.amp;
    waves_.push_back(w);
  }
  for (auto& w : waves_) w.amp *= 0.35 / std::max(total, 1e-12) * std::sqrt(static_cast<double>(opts.waves));
  for (int i = 0; i < opts.caps; ++i) {
    Cap c;
    c.center = random_direction(rng);
    c.cos_radius = std::cos(rng.uniform(0.15, 0.6));
    c.sharpness = rng.uniform(40.0, 200.0);
    c.color = random_color(rng);
    for (double& v : c.color) v *= 0.25;
    caps_.push_back(c);
  }
}

Rgb SphericalPattern::eval(const Vec3& d) const {
  Rgb out{0.5, 0.5, 0.5};
  for (const auto& w : waves_) {
    double v = std::sin(w.freq * dot(w.dir, d) + w.phase);
    if (w.edge) v = std::tanh(4.0 * v);
    v *= w.amp;
    for (int c = 0; c < 3; ++c) out[c] += v * w.color[c];
  }
  for (const auto& cap : caps_) {
    const double inside = 0.5 * (1.0 + std::tanh(cap.sharpness * (dot(cap.center, d) - cap.cos_radius)));
    for (int c = 0; c < 3; ++c) out[c] += inside * cap.color[c];
  }
  return out;
}

Image synthetic_panorama(int height, int width, std::uint64_t seed, const SyntheticOptions& opts) {
  const SphericalPattern pattern(seed, opts);
  Rng noise(derive_seed(seed, 0x6e6f697365));
  Image img(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Vec3 d = sphere_to_unit(erp_to_sphere({static_cast<double>(x), static_cast<double>(y)}, height, width));
      Rgb v = pattern.eval(d);
      for (int c = 0; c < 3; ++c) {
        if (opts.noise > 0) v[c] += opts.noise * (noise.uniform() - 0.5);
        img.at(c, y, x) = std::clamp(v[c], 0.0, 1.0);
      }
    }
  }
  return img;
}

}  // namespace omnivr
