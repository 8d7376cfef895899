#pragma once

#include <numbers>
#include <vector>

namespace omnivr {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Signed minor-arc representative of an angle difference, in [-pi, pi].
double wrap_angle(double delta);

// Latitude theta in [-pi/2, pi/2], longitude phi in [-pi, pi).
struct SphericalCoord {
  double theta = 0.0;
  double phi = 0.0;
};

// Continuous ERP pixel coordinate; integer values are pixel centers.
struct ErpCoord {
  double x1 = 0.0;  // column, [0, W)
  double x2 = 0.0;  // row, [0, H)
};

// Continuous viewport pixel coordinate; integer values are pixel centers and the
// view direction sits at (w_v/2 - 0.5, h_v/2 - 0.5).
struct ViewportCoord {
  double u = 0.0;
  double v = 0.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct ViewportSpec {
  double theta_c = 0.0;
  double phi_c = 0.0;
  double fov_h = kPi / 2;
  double fov_v = kPi / 2;
  int height = 64;
  int width = 64;

  // Throws kInvalidArgument when the fields violate the documented ranges.
  void validate() const;
};

SphericalCoord erp_to_sphere(const ErpCoord& c, int height, int width);
ErpCoord sphere_to_erp(const SphericalCoord& p, int height, int width);

// World frame: +z towards (theta=0, phi=0), +y up, +x towards phi=+pi/2.
Vec3 sphere_to_unit(const SphericalCoord& p);
SphericalCoord unit_to_sphere(const Vec3& d);

// Gnomonic viewport <-> ERP mapping. The camera is rotated by
// R = R_yaw(phi_c) * R_pitch(theta_c) with zero roll.
class ViewportProjection {
 public:
  explicit ViewportProjection(const ViewportSpec& spec);

  const ViewportSpec& spec() const noexcept { return spec_; }

  // Ray (unit, world frame) through a viewport coordinate. Defined everywhere.
  Vec3 ray(const ViewportCoord& y) const;
  SphericalCoord to_sphere(const ViewportCoord& y) const;

  // f^-1. Total: every viewport coordinate, including ones outside the raster, has a ray.
  ErpCoord inverse_map(const ViewportCoord& y, int erp_height, int erp_width) const;

  // f. Throws kBehindViewport when the ray points away from the view direction.
  ViewportCoord forward_map(const ErpCoord& c, int erp_height, int erp_width) const;
  ViewportCoord forward_map(const SphericalCoord& p) const;

 private:
  ViewportSpec spec_;
  double rot_[3][3];  // camera -> world
  double tan_h_;
  double tan_v_;
};

ErpCoord inverse_map(const ViewportSpec& spec, const ViewportCoord& y, int erp_height,
                     int erp_width);
ViewportCoord forward_map(const ViewportSpec& spec, const ErpCoord& c, int erp_height,
                          int erp_width);

struct GridPoint {
  ViewportCoord view;
  ErpCoord erp;
};

// One entry per viewport pixel center, row-major (v outer, u inner).
std::vector<GridPoint> viewport_grid(const ViewportSpec& spec, int erp_height, int erp_width);

}  // namespace omnivr
