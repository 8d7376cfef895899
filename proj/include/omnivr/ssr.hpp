#pragma once

#include <array>
#include <vector>

#include "omnivr/geometry.hpp"

namespace omnivr {

// Where the cosine of the mean latitude enters the spherical difference.
//  kLongitude: scales the longitude component (arc length along a parallel).
//  kLatitude: scales the latitude component instead; does not match the metric.
enum class CosPlacement { kLongitude, kLatitude };

// kSecondDifference: p4 - 2 p5 + p6 style second differences (true curvature).
// kSummedFirstDifferences: sums D(p6,p5)+D(p5,p4) etc., which telescope to
// first differences over two steps; kept for comparison experiments.
enum class HessianStencil { kSecondDifference, kSummedFirstDifferences };

struct SsrOptions {
  CosPlacement cos = CosPlacement::kLongitude;
  HessianStencil hessian = HessianStencil::kSecondDifference;
  // Divide by the stencil spans so entries are derivatives with respect to
  // normalized viewport coordinates (u / w_v, v / h_v).
  bool normalize_steps = true;

  // Unnormalized steps, cos on latitude, summed first differences.
  static SsrOptions raw_stencil() {
    return {CosPlacement::kLatitude, HessianStencil::kSummedFirstDifferences, false};
  }
};

inline constexpr int kShapeDim = 10;

// jac rows are the differences along u and along v; each row holds the
// (longitude, latitude) components. hess holds, per component, the
// (uu, uv, vv) entries: [lon_uu, lon_uv, lon_vv, lat_uu, lat_uv, lat_vv].
struct ShapeDescriptor {
  std::array<double, 4> jac{};
  std::array<double, 6> hess{};

  std::array<double, kShapeDim> flat() const;
};

// D(p_i, p_j): signed minor-arc (longitude, latitude) difference from p_i to p_j.
std::array<double, 2> sphere_diff(const SphericalCoord& pi, const SphericalCoord& pj,
                                  CosPlacement cos = CosPlacement::kLongitude);

// p[0..8] = p1..p9, row-major over viewport offsets (m, n) in {-1,0,1}^2, p5 = y.
struct SphereStencil {
  std::array<SphericalCoord, 9> p{};
};

SphereStencil build_stencil(const ViewportProjection& proj, const ViewportCoord& y,
                            int erp_height, int erp_width);
SphereStencil build_stencil(const ViewportSpec& spec, const ViewportCoord& y, int erp_height,
                            int erp_width);

ShapeDescriptor shape_from_stencil(const SphereStencil& st, int view_width, int view_height,
                                   const SsrOptions& opts = {});

ShapeDescriptor shape_at(const ViewportProjection& proj, const ViewportCoord& y, int erp_height,
                         int erp_width, const SsrOptions& opts = {});
ShapeDescriptor shape_at(const ViewportSpec& spec, const ViewportCoord& y, int erp_height,
                         int erp_width, const SsrOptions& opts = {});

// One descriptor per viewport pixel center, row-major.
std::vector<ShapeDescriptor> shape_grid(const ViewportSpec& spec, int erp_height, int erp_width,
                                        const SsrOptions& opts = {});

// Planar variant: the same stencil arithmetic on raw ERP coordinates (converted
// to radians by the affine ERP scale), with no wraparound and no cosine factor.
ShapeDescriptor shape_2d_baseline(const ViewportProjection& proj, const ViewportCoord& y,
                                  int erp_height, int erp_width, bool normalize_steps = true);
ShapeDescriptor shape_2d_baseline(const ViewportSpec& spec, const ViewportCoord& y,
                                  int erp_height, int erp_width, bool normalize_steps = true);

enum class ShapeKind { kSpherical, kPlanar };

ShapeDescriptor shape_descriptor(ShapeKind kind, const ViewportProjection& proj,
                                 const ViewportCoord& y, int erp_height, int erp_width);

}  // namespace omnivr
