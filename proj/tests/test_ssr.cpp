#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "omnivr/oracles/oracles.hpp"
#include "omnivr/ssr.hpp"

using namespace omnivr;

namespace {

constexpr int kH = 1024, kW = 2048;

ViewportSpec spec_deg(double theta, double phi, double fh, double fv, int w, int h) {
  return {deg_to_rad(theta), deg_to_rad(phi), deg_to_rad(fh), deg_to_rad(fv), h, w};
}

}  // namespace

TEST(Ssr, SphereDiffTakesMinorArc) {
  const auto d = sphere_diff({0.0, kPi - 0.01}, {0.0, -kPi + 0.01});
  EXPECT_NEAR(d[0], 0.02, 1e-12);
  EXPECT_NEAR(d[1], 0.0, 1e-15);
}

TEST(Ssr, SphereDiffScalesLongitudeByCosine) {
  const auto d = sphere_diff({deg_to_rad(60), 0.0}, {deg_to_rad(60), 0.1});
  EXPECT_NEAR(d[0], 0.05, 1e-12);
  const auto lat = sphere_diff({deg_to_rad(60), 0.0}, {deg_to_rad(60), 0.1}, CosPlacement::kLatitude);
  EXPECT_NEAR(lat[0], 0.1, 1e-12);
}

TEST(Ssr, CenterStencilIsSymmetric) {
  const ViewportSpec s = spec_deg(0, 0, 90, 90, 65, 65);
  const SphereStencil st = build_stencil(s, {32.0, 32.0}, kH, kW);
  EXPECT_NEAR(sphere_diff(st.p[5], st.p[3])[1], 0.0, 1e-15);
  EXPECT_NEAR(st.p[4].theta, 0.0, 1e-15);
  EXPECT_NEAR(st.p[4].phi, 0.0, 1e-15);
}

TEST(Ssr, PoleFacingStencilHasDistinctLongitudes) {
  const ViewportSpec s = spec_deg(90, 0, 90, 90, 64, 64);
  // Stencil beside the pole pixel (31.5, 31.5), whose longitude is undefined.
  const SphereStencil st = build_stencil(s, {30.0, 28.0}, kH, kW);
  std::set<double> lons;
  for (const auto& p : st.p) lons.insert(p.phi);
  EXPECT_EQ(lons.size(), 9u);
}

TEST(Ssr, MatchesFiniteDifferenceOracle) {
  for (const ViewportSpec& s : {spec_deg(0, 0, 90, 90, 512, 512), spec_deg(40, 170, 100, 80, 640, 512),
                                spec_deg(-55, -30, 120, 110, 768, 1024)}) {
    for (const ViewportCoord y : {ViewportCoord{100, 200}, ViewportCoord{300, 50}, ViewportCoord{17, 400}}) {
      if (std::abs(oracle::sphere(s, y.u, y.v)[0]) > deg_to_rad(75)) continue;
      const ShapeDescriptor d = shape_at(s, y, kH, kW);
      const oracle::ShapeReference r = oracle::shape_reference(s, y.u, y.v);
      EXPECT_LT(oracle::normwise_relative_error(d.jac.data(), r.jac.data(), 4), 1e-3);
      EXPECT_LT(oracle::normwise_relative_error(d.hess.data(), r.hess.data(), 6), 1e-2);
    }
  }
}

TEST(Ssr, PlanarAgreesNearEquatorAndDivergesNearPole) {
  const ViewportSpec eq = spec_deg(0, 0, 90, 90, 512, 512);
  const ViewportCoord c{255.5 + 3, 255.5 - 2};
  const auto r_eq = oracle::shape_reference(eq, c.u, c.v);
  EXPECT_LT(oracle::normwise_relative_error(shape_2d_baseline(eq, c, kH, kW).jac.data(), r_eq.jac.data(), 4), 1e-3);

  const ViewportSpec pole = spec_deg(82, 10, 90, 90, 512, 512);
  const ViewportCoord y{300, 250};
  const auto r = oracle::shape_reference(pole, y.u, y.v);
  const double sph = oracle::normwise_relative_error(shape_at(pole, y, kH, kW).jac.data(), r.jac.data(), 4);
  const double pl = oracle::normwise_relative_error(shape_2d_baseline(pole, y, kH, kW).jac.data(), r.jac.data(), 4);
  EXPECT_GT(pl, 10 * sph);
}

TEST(Ssr, SeamRollInvariance) {
  const ViewportSpec s = spec_deg(20, 178, 90, 90, 96, 96);
  ViewportSpec r = s;
  r.phi_c = wrap_angle(s.phi_c - kPi);
  double sph = 0, pl = 0;
  for (int v = 0; v < 96; v += 5) {
    for (int u = 0; u < 96; ++u) {
      const ViewportCoord y{double(u), double(v)};
      const auto a = shape_at(s, y, kH, kW).flat(), b = shape_at(r, y, kH, kW).flat();
      const auto pa = shape_2d_baseline(s, y, kH, kW).flat(), pb = shape_2d_baseline(r, y, kH, kW).flat();
      for (int k = 0; k < kShapeDim; ++k) {
        sph = std::max(sph, std::abs(a[k] - b[k]));
        pl = std::max(pl, std::abs(pa[k] - pb[k]));
      }
    }
  }
  EXPECT_LT(sph, 1e-9);
  EXPECT_GT(pl, 1.0);
}

TEST(Ssr, GridMatchesPerPixelLoop) {
  const ViewportSpec s = spec_deg(-30, 60, 100, 70, 13, 9);
  const auto grid = shape_grid(s, kH, kW);
  ASSERT_EQ(grid.size(), 13u * 9u);
  for (int v = 0; v < 9; ++v) {
    for (int u = 0; u < 13; ++u) {
      const auto a = grid[v * 13 + u].flat();
      const auto b = shape_at(s, {double(u), double(v)}, kH, kW).flat();
      for (int k = 0; k < kShapeDim; ++k) {
        EXPECT_EQ(a[k], b[k]);
        EXPECT_TRUE(std::isfinite(a[k]));
      }
    }
  }
}

TEST(Ssr, RawStencilVariantIsUnnormalized) {
  const ViewportSpec s = spec_deg(10, 0, 90, 90, 256, 256);
  const ViewportCoord y{100, 120};
  const ShapeDescriptor n = shape_at(s, y, kH, kW);
  SsrOptions o;
  o.normalize_steps = false;
  const ShapeDescriptor raw = shape_at(s, y, kH, kW, o);
  // Jacobian rows are scaled by the stencil span (-2/w along u, 2/h along v).
  EXPECT_NEAR(raw.jac[0], n.jac[0] * (-2.0 / 256), 1e-12);
  EXPECT_NEAR(raw.jac[3], n.jac[3] * (2.0 / 256), 1e-12);
  const ShapeDescriptor summed = shape_at(s, y, kH, kW, SsrOptions::raw_stencil());
  for (double x : summed.flat()) EXPECT_TRUE(std::isfinite(x));
}
