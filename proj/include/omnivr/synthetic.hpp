#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "omnivr/geometry.hpp"
#include "omnivr/image.hpp"

namespace omnivr {

struct SyntheticOptions {
  int waves = 24;              // plane waves on the sphere
  double min_freq = 2.0;       // angular frequency, radians^-1
  double max_freq = 100.0;
  double edge_fraction = 0.5;  // share of waves passed through a steep tanh (sharp stripes)
  int caps = 6;                // spherical caps with hard-ish boundaries
  double noise = 0.0;          // per-pixel uniform noise amplitude
};

// A smooth RGB function of the unit direction. Being defined on the sphere, it
// has no seam at longitude +-pi and no singularity at the poles.
class SphericalPattern {
 public:
  SphericalPattern(std::uint64_t seed, const SyntheticOptions& opts = {});

  Rgb eval(const Vec3& d) const;

 private:
  struct Wave {
    Vec3 dir;
    double freq, phase, amp;
    bool edge;
    Rgb color;
  };
  struct Cap {
    Vec3 center;
    double cos_radius, sharpness;
    Rgb color;
  };
  std::vector<Wave> waves_;
  std::vector<Cap> caps_;
};

// Samples the pattern at every ERP pixel center (values clamped to [0, 1]).
Image synthetic_panorama(int height, int width, std::uint64_t seed, const SyntheticOptions& opts = {});

}  // namespace omnivr
