#include "omnivr/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "omnivr/error.hpp"
#include "omnivr/resample.hpp"

namespace omnivr {

void PatchSpec::validate() const {
  if (p <= 0 || s <= 0 || p % s != 0) {
    throw Error(ErrorCode::kInvalidArgument, "patch size must be positive and divisible by s");
  }
}

namespace {

int wrap_int(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

// Column relative to a, unwrapped into [0, W).
double column_offset(double x1, int a, int erp_width) {
  double rel = x1 - wrap_int(a, erp_width);
  if (rel < 0.0) rel += erp_width;
  return rel;
}

}  // namespace

std::vector<std::size_t> filter_indices(const std::vector<ErpCoord>& points, const PatchSpec& ps,
                                        int erp_width) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const ErpCoord& x = points[i];
    if (!(x.x2 >= ps.b && x.x2 < ps.b + ps.p)) continue;
    if (column_offset(x.x1, ps.a, erp_width) < ps.p) keep.push_back(i);
  }
  return keep;
}

std::vector<ErpCoord> filter_with_bounds(const std::vector<ErpCoord>& points, const PatchSpec& ps,
                                         int erp_width) {
  std::vector<ErpCoord> out;
  for (std::size_t i : filter_indices(points, ps, erp_width)) {
    out.push_back({ps.a + column_offset(points[i].x1, ps.a, erp_width), points[i].x2});
  }
  return out;
}

NormCoord to_patch_normalized(const ErpCoord& x, const PatchSpec& ps) {
  if (!(x.x1 >= ps.a && x.x1 < ps.a + ps.p && x.x2 >= ps.b && x.x2 < ps.b + ps.p)) {
    throw Error(ErrorCode::kOutOfPatch, "coordinate lies outside the patch");
  }
  return {2.0 * ((x.x1 - ps.a) / ps.p) - 1.0, 2.0 * ((x.x2 - ps.b) / ps.p) - 1.0};
}

std::vector<NormCoord> coord_space_transform(const std::vector<ErpCoord>& points,
                                             const PatchSpec& ps) {
  std::vector<NormCoord> out;
  out.reserve(points.size());
  for (const ErpCoord& x : points) out.push_back(to_patch_normalized(x, ps));
  return out;
}

ErpCoord from_patch_normalized(const NormCoord& t, int p) {
  return {(t[0] + 1.0) * p / 2.0, (t[1] + 1.0) * p / 2.0};
}

std::vector<std::size_t> random_subsample(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  k = std::min(k, n);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

DisSampResult dis_samp(const Image& erp, const PatchSpec& ps, const ViewportSpec& spec,
                       std::size_t n_samples, Rng& rng) {
  ps.validate();
  if (n_samples == 0) throw Error(ErrorCode::kInvalidArgument, "N must be positive");
  DisSampResult r;
  r.hr_patch = crop_patch(erp, ps.a, ps.b, ps.p);

  const auto grid = viewport_grid(spec, erp.height(), erp.width());
  std::vector<ErpCoord> x_view;
  x_view.reserve(grid.size());
  for (const auto& g : grid) x_view.push_back(g.erp);

  std::vector<std::size_t> kept = filter_indices(x_view, ps, erp.width());
  if (kept.empty()) throw Error(ErrorCode::kEmptyOverlap, "viewport does not overlap the patch");
  if (kept.size() > n_samples) {
    std::vector<std::size_t> chosen = random_subsample(kept.size(), n_samples, rng);
    for (std::size_t i = 0; i < chosen.size(); ++i) chosen[i] = kept[chosen[i]];
    kept = std::move(chosen);
  }

  auto& s = r.samples;
  s.coords.reserve(kept.size());
  for (std::size_t i : kept) {
    const ErpCoord& x = x_view[i];
    const ErpCoord unwrapped{ps.a + column_offset(x.x1, ps.a, erp.width()), x.x2};
    s.coords.push_back(to_patch_normalized(unwrapped, ps));
    s.view_coords.push_back(grid[i].view);
  }
  s.pixels.reserve(kept.size());
  for (const NormCoord& t : s.coords) {
    s.pixels.push_back(
        sample_at(r.hr_patch, from_patch_normalized(t, ps.p), Kernel::bicubic(), false));
  }
  r.lr_patch = bicubic_downscale(r.hr_patch, ps.s);
  return r;
}

ViewportSpec pick_view_for_patch(const PatchSpec& ps, int erp_height, int erp_width,
                                 const ViewChoices& choices, Rng& rng) {
  if (choices.fovs_deg.empty() || choices.resolutions.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "FoV and resolution choice sets must be non-empty");
  }
  ErpCoord c = ps.center();
  c.x1 = std::fmod(c.x1, static_cast<double>(erp_width));
  if (c.x1 < 0.0) c.x1 += erp_width;
  const SphericalCoord dir = erp_to_sphere(c, erp_height, erp_width);
  ViewportSpec spec;
  spec.theta_c = dir.theta;
  spec.phi_c = dir.phi;
  auto pick_fov = [&] {
    return deg_to_rad(choices.fovs_deg[rng.below(choices.fovs_deg.size())]);
  };
  spec.fov_h = pick_fov();
  spec.fov_v = choices.independent_fov ? pick_fov() : spec.fov_h;
  spec.height = choices.resolutions[rng.below(choices.resolutions.size())];
  spec.width = choices.resolutions[rng.below(choices.resolutions.size())];
  return spec;
}

}  // namespace omnivr
