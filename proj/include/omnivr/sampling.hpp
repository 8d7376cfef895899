#pragma once

#include <array>
#include <vector>

#include "omnivr/geometry.hpp"
#include "omnivr/image.hpp"
#include "omnivr/random.hpp"

namespace omnivr {

// Training crop: top-left (a, b), side p, downscale factor s.
struct PatchSpec {
  int a = 0;
  int b = 0;
  int p = 64;
  int s = 2;

  void validate() const;
  // Pixel coordinate of the patch center in the full ERP frame.
  ErpCoord center() const { return {a + (p - 1) / 2.0, b + (p - 1) / 2.0}; }
};

using NormCoord = std::array<double, 2>;

// Discrete supervision: normalized patch coordinates in [-1, 1)^2, the
// ground-truth pixel at each, and the viewport pixel each sample came from.
struct SampleSet {
  std::vector<NormCoord> coords;
  std::vector<Rgb> pixels;
  std::vector<ViewportCoord> view_coords;

  std::size_t size() const noexcept { return coords.size(); }
};

// Points with a <= x1 < a+p and b <= x2 < b+p. Columns are tested on the
// unwrapped interval [a, a+p) modulo W, and returned unwrapped (x1 in [a, a+p)).
std::vector<ErpCoord> filter_with_bounds(const std::vector<ErpCoord>& points, const PatchSpec& ps,
                                         int erp_width);
// Same predicate, returning positions into `points`.
std::vector<std::size_t> filter_indices(const std::vector<ErpCoord>& points, const PatchSpec& ps,
                                        int erp_width);

// T(x) = 2((x - (a, b)) / p) - 1. Throws kOutOfPatch for points outside the patch.
std::vector<NormCoord> coord_space_transform(const std::vector<ErpCoord>& points,
                                             const PatchSpec& ps);
NormCoord to_patch_normalized(const ErpCoord& x, const PatchSpec& ps);
// Inverse of T, in patch-local pixel units (0 = first patch column/row center).
ErpCoord from_patch_normalized(const NormCoord& t, int p);

// Uniform subset of size k (without replacement) of {0..n-1}, ascending order.
std::vector<std::size_t> random_subsample(std::size_t n, std::size_t k, Rng& rng);

struct DisSampResult {
  SampleSet samples;
  Image hr_patch;
  Image lr_patch;  // bicubic reference, p/s x p/s
};

// Discrete pixel sampling of one training item.
// crop -> inverse-map the viewport grid -> filter to the patch -> subsample to N
// -> normalize -> bicubic ground truth -> bicubic LR patch.
DisSampResult dis_samp(const Image& erp, const PatchSpec& ps, const ViewportSpec& spec,
                       std::size_t n_samples, Rng& rng);

struct ViewChoices {
  std::vector<double> fovs_deg = {80, 90, 100, 110, 120};
  std::vector<int> resolutions = {512, 576, 640, 768, 832, 960, 1024};
  bool independent_fov = true;  // draw F_h and F_v separately
};

ViewportSpec pick_view_for_patch(const PatchSpec& ps, int erp_height, int erp_width,
                                 const ViewChoices& choices, Rng& rng);

}  // namespace omnivr
