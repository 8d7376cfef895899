#include "omnivr/ssr.hpp"

#include <cmath>

namespace omnivr {

std::array<double, kShapeDim> ShapeDescriptor::flat() const {
  std::array<double, kShapeDim> f{};
  for (int i = 0; i < 4; ++i) f[i] = jac[i];
  for (int i = 0; i < 6; ++i) f[4 + i] = hess[i];
  return f;
}

std::array<double, 2> sphere_diff(const SphericalCoord& pi, const SphericalCoord& pj,
                                  CosPlacement cos) {
  const double c = std::cos((pi.theta + pj.theta) / 2.0);
  double lon = wrap_angle(pj.phi - pi.phi);
  double lat = wrap_angle(pj.theta - pi.theta);
  if (cos == CosPlacement::kLongitude) {
    lon *= c;
  } else {
    lat *= c;
  }
  return {lon, lat};
}

SphereStencil build_stencil(const ViewportProjection& proj, const ViewportCoord& y,
                            int erp_height, int erp_width) {
  SphereStencil st;
  int k = 0;
  for (int n = -1; n <= 1; ++n) {
    for (int m = -1; m <= 1; ++m) {
      const ErpCoord x = proj.inverse_map({y.u + m, y.v + n}, erp_height, erp_width);
      st.p[k++] = erp_to_sphere(x, erp_height, erp_width);
    }
  }
  return st;
}

SphereStencil build_stencil(const ViewportSpec& spec, const ViewportCoord& y, int erp_height,
                            int erp_width) {
  return build_stencil(ViewportProjection(spec), y, erp_height, erp_width);
}

namespace {

using Diff = std::array<double, 2>;

Diff operator+(const Diff& a, const Diff& b) { return {a[0] + b[0], a[1] + b[1]}; }
Diff operator-(const Diff& a, const Diff& b) { return {a[0] - b[0], a[1] - b[1]}; }

// Shared assembly for both descriptor variants; `d(i, j)` is the difference
// from stencil point i to stencil point j (1-based, as p1..p9).
template <typename DiffFn>
ShapeDescriptor assemble(DiffFn d, int view_width, int view_height, HessianStencil hessian,
                         bool normalize) {
  // Spans in normalized viewport units: p6 -> p4 moves by -2/w, p2 -> p8 by +2/h.
  const double du = 1.0 / view_width, dv = 1.0 / view_height;
  const Diff ju = d(6, 4), jv = d(2, 8);
  ShapeDescriptor s;
  const double su = normalize ? -2.0 * du : 1.0;
  const double sv = normalize ? 2.0 * dv : 1.0;
  s.jac = {ju[0] / su, ju[1] / su, jv[0] / sv, jv[1] / sv};

  Diff huu, huv, hvv;
  if (hessian == HessianStencil::kSecondDifference) {
    huu = d(5, 6) - d(4, 5);
    huv = d(7, 9) - d(1, 3);
    hvv = d(5, 8) - d(2, 5);
    if (normalize) {
      for (int c = 0; c < 2; ++c) {
        huu[c] /= du * du;
        huv[c] /= 4.0 * du * dv;
        hvv[c] /= dv * dv;
      }
    }
  } else {
    huu = d(6, 5) + d(5, 4);
    huv = d(3, 1) + d(9, 7);
    hvv = d(2, 5) + d(5, 8);
  }
  s.hess = {huu[0], huv[0], hvv[0], huu[1], huv[1], hvv[1]};
  return s;
}

}  // namespace

ShapeDescriptor shape_from_stencil(const SphereStencil& st, int view_width, int view_height,
                                   const SsrOptions& opts) {
  auto d = [&](int i, int j) { return sphere_diff(st.p[i - 1], st.p[j - 1], opts.cos); };
  return assemble(d, view_width, view_height, opts.hessian, opts.normalize_steps);
}

ShapeDescriptor shape_at(const ViewportProjection& proj, const ViewportCoord& y, int erp_height,
                         int erp_width, const SsrOptions& opts) {
  const SphereStencil st = build_stencil(proj, y, erp_height, erp_width);
  return shape_from_stencil(st, proj.spec().width, proj.spec().height, opts);
}

ShapeDescriptor shape_at(const ViewportSpec& spec, const ViewportCoord& y, int erp_height,
                         int erp_width, const SsrOptions& opts) {
  return shape_at(ViewportProjection(spec), y, erp_height, erp_width, opts);
}

std::vector<ShapeDescriptor> shape_grid(const ViewportSpec& spec, int erp_height, int erp_width,
                                        const SsrOptions& opts) {
  const ViewportProjection proj(spec);
  std::vector<ShapeDescriptor> out;
  out.reserve(static_cast<std::size_t>(spec.width) * spec.height);
  for (int v = 0; v < spec.height; ++v) {
    for (int u = 0; u < spec.width; ++u) {
      out.push_back(shape_at(proj, {static_cast<double>(u), static_cast<double>(v)}, erp_height,
                             erp_width, opts));
    }
  }
  return out;
}

ShapeDescriptor shape_2d_baseline(const ViewportProjection& proj, const ViewportCoord& y,
                                  int erp_height, int erp_width, bool normalize_steps) {
  std::array<ErpCoord, 9> x;
  int k = 0;
  for (int n = -1; n <= 1; ++n) {
    for (int m = -1; m <= 1; ++m) {
      x[k++] = proj.inverse_map({y.u + m, y.v + n}, erp_height, erp_width);
    }
  }
  const double sx = kTwoPi / erp_width, sy = -kPi / erp_height;
  auto d = [&](int i, int j) -> Diff {
    return {(x[j - 1].x1 - x[i - 1].x1) * sx, (x[j - 1].x2 - x[i - 1].x2) * sy};
  };
  return assemble(d, proj.spec().width, proj.spec().height, HessianStencil::kSecondDifference,
                  normalize_steps);
}

ShapeDescriptor shape_2d_baseline(const ViewportSpec& spec, const ViewportCoord& y,
                                  int erp_height, int erp_width, bool normalize_steps) {
  return shape_2d_baseline(ViewportProjection(spec), y, erp_height, erp_width, normalize_steps);
}

ShapeDescriptor shape_descriptor(ShapeKind kind, const ViewportProjection& proj,
                                 const ViewportCoord& y, int erp_height, int erp_width) {
  return kind == ShapeKind::kSpherical ? shape_at(proj, y, erp_height, erp_width)
                                       : shape_2d_baseline(proj, y, erp_height, erp_width);
}

}  // namespace omnivr
