#include "omnivr/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "omnivr/error.hpp"

namespace omnivr {

double wrap_angle(double delta) {
  return delta - kTwoPi * std::round(delta / kTwoPi);
}

namespace {

double wrap_longitude(double phi) {
  double w = std::fmod(phi + kPi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  w -= kPi;
  // fmod can land exactly on +pi after the shift for inputs just below -pi.
  if (w >= kPi) w -= kTwoPi;
  return w;
}

double wrap_column(double x1, int width) {
  double w = std::fmod(x1, static_cast<double>(width));
  if (w < 0.0) w += width;
  if (w >= width) w -= width;
  return w;
}

}  // namespace

void ViewportSpec::validate() const {
  if (!(fov_h > 0.0 && fov_h < kPi) || !(fov_v > 0.0 && fov_v < kPi)) {
    throw Error(ErrorCode::kInvalidArgument, "fields of view must lie strictly inside (0, pi)");
  }
  if (height < 2 || width < 2) {
    throw Error(ErrorCode::kInvalidArgument, "viewport must be at least 2x2 pixels");
  }
  if (!std::isfinite(theta_c) || !std::isfinite(phi_c)) {
    throw Error(ErrorCode::kInvalidArgument, "view direction must be finite");
  }
  if (std::abs(theta_c) > kPi / 2 + 1e-12) {
    throw Error(ErrorCode::kInvalidArgument, "theta_c must lie in [-pi/2, pi/2]");
  }
}

SphericalCoord erp_to_sphere(const ErpCoord& c, int height, int width) {
  SphericalCoord p;
  p.phi = wrap_longitude(kTwoPi * (c.x1 + 0.5) / width - kPi);
  p.theta = kPi / 2 - kPi * (c.x2 + 0.5) / height;
  return p;
}

ErpCoord sphere_to_erp(const SphericalCoord& p, int height, int width) {
  ErpCoord c;
  c.x1 = wrap_column((p.phi + kPi) * width / kTwoPi - 0.5, width);
  c.x2 = (kPi / 2 - p.theta) * height / kPi - 0.5;
  return c;
}

Vec3 sphere_to_unit(const SphericalCoord& p) {
  const double ct = std::cos(p.theta);
  return {ct * std::sin(p.phi), std::sin(p.theta), ct * std::cos(p.phi)};
}

SphericalCoord unit_to_sphere(const Vec3& d) {
  const double n = std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
  SphericalCoord p;
  p.theta = std::asin(std::clamp(d.y / n, -1.0, 1.0));
  if (std::abs(p.theta) == kPi / 2) {
    p.phi = 0.0;
  } else {
    p.phi = wrap_longitude(std::atan2(d.x, d.z));
  }
  return p;
}

ViewportProjection::ViewportProjection(const ViewportSpec& spec) : spec_(spec) {
  spec_.validate();
  const double ct = std::cos(spec.theta_c), st = std::sin(spec.theta_c);
  const double cp = std::cos(spec.phi_c), sp = std::sin(spec.phi_c);
  // R_yaw(phi_c) * R_pitch(theta_c)
  const double yaw[3][3] = {{cp, 0, sp}, {0, 1, 0}, {-sp, 0, cp}};
  const double pitch[3][3] = {{1, 0, 0}, {0, ct, st}, {0, -st, ct}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += yaw[i][k] * pitch[k][j];
      rot_[i][j] = s;
    }
  }
  tan_h_ = std::tan(spec.fov_h / 2);
  tan_v_ = std::tan(spec.fov_v / 2);
}

Vec3 ViewportProjection::ray(const ViewportCoord& y) const {
  const double xp = (2.0 * (y.u + 0.5) / spec_.width - 1.0) * tan_h_;
  const double yp = (1.0 - 2.0 * (y.v + 0.5) / spec_.height) * tan_v_;
  const double n = std::sqrt(xp * xp + yp * yp + 1.0);
  const double cx = xp / n, cy = yp / n, cz = 1.0 / n;
  return {rot_[0][0] * cx + rot_[0][1] * cy + rot_[0][2] * cz,
          rot_[1][0] * cx + rot_[1][1] * cy + rot_[1][2] * cz,
          rot_[2][0] * cx + rot_[2][1] * cy + rot_[2][2] * cz};
}

SphericalCoord ViewportProjection::to_sphere(const ViewportCoord& y) const {
  return unit_to_sphere(ray(y));
}

ErpCoord ViewportProjection::inverse_map(const ViewportCoord& y, int erp_height,
                                         int erp_width) const {
  return sphere_to_erp(to_sphere(y), erp_height, erp_width);
}

ViewportCoord ViewportProjection::forward_map(const SphericalCoord& p) const {
  const Vec3 d = sphere_to_unit(p);
  // camera = R^T * world
  const double cx = rot_[0][0] * d.x + rot_[1][0] * d.y + rot_[2][0] * d.z;
  const double cy = rot_[0][1] * d.x + rot_[1][1] * d.y + rot_[2][1] * d.z;
  const double cz = rot_[0][2] * d.x + rot_[1][2] * d.y + rot_[2][2] * d.z;
  if (cz <= 0.0) {
    throw Error(ErrorCode::kBehindViewport, "point lies behind the viewport plane");
  }
  const double xp = cx / cz, yp = cy / cz;
  ViewportCoord y;
  y.u = (xp / tan_h_ + 1.0) * spec_.width / 2.0 - 0.5;
  y.v = (1.0 - yp / tan_v_) * spec_.height / 2.0 - 0.5;
  return y;
}

ViewportCoord ViewportProjection::forward_map(const ErpCoord& c, int erp_height,
                                              int erp_width) const {
  return forward_map(erp_to_sphere(c, erp_height, erp_width));
}

ErpCoord inverse_map(const ViewportSpec& spec, const ViewportCoord& y, int erp_height,
                     int erp_width) {
  return ViewportProjection(spec).inverse_map(y, erp_height, erp_width);
}

ViewportCoord forward_map(const ViewportSpec& spec, const ErpCoord& c, int erp_height,
                          int erp_width) {
  return ViewportProjection(spec).forward_map(c, erp_height, erp_width);
}

std::vector<GridPoint> viewport_grid(const ViewportSpec& spec, int erp_height, int erp_width) {
  const ViewportProjection proj(spec);
  std::vector<GridPoint> grid;
  grid.reserve(static_cast<std::size_t>(spec.width) * spec.height);
  for (int v = 0; v < spec.height; ++v) {
    for (int u = 0; u < spec.width; ++u) {
      const ViewportCoord y{static_cast<double>(u), static_cast<double>(v)};
      grid.push_back({y, proj.inverse_map(y, erp_height, erp_width)});
    }
  }
  return grid;
}

}  // namespace omnivr
