#include <cmath>
#include <numbers>

#include "omnivr/oracles/oracles.hpp"

namespace omnivr::oracle {

std::array<double, 3> ray(const ViewportSpec& spec, double u, double v) {
  const double t = spec.theta_c, p = spec.phi_c;
  const std::array<double, 3> fwd = {std::cos(t) * std::sin(p), std::sin(t), std::cos(t) * std::cos(p)};
  const std::array<double, 3> right = {std::cos(p), 0.0, -std::sin(p)};
  const std::array<double, 3> up = {fwd[1] * right[2] - fwd[2] * right[1],
                                    fwd[2] * right[0] - fwd[0] * right[2],
                                    fwd[0] * right[1] - fwd[1] * right[0]};
  // Plane point at unit distance; u grows to the right, v grows downwards.
  const double a = std::tan(spec.fov_h / 2) * ((u + 0.5) / spec.width * 2.0 - 1.0);
  const double b = std::tan(spec.fov_v / 2) * (1.0 - (v + 0.5) / spec.height * 2.0);
  std::array<double, 3> d{};
  for (int i = 0; i < 3; ++i) d[i] = fwd[i] + a * right[i] + b * up[i];
  const double n = std::hypot(d[0], d[1], d[2]);
  for (double& x : d) x /= n;
  return d;
}

std::array<double, 2> sphere(const ViewportSpec& spec, double u, double v) {
  const auto d = ray(spec, u, v);
  return {std::atan2(d[1], std::hypot(d[0], d[2])), std::atan2(d[0], d[2])};
}

std::array<double, 2> erp(const ViewportSpec& spec, double u, double v, int erp_height, int erp_width) {
  const auto s = sphere(spec, u, v);
  const double pi = std::numbers::pi;
  double x1 = (s[1] / (2 * pi) + 0.5) * erp_width - 0.5;
  if (x1 < 0) x1 += erp_width;
  if (x1 >= erp_width) x1 -= erp_width;
  return {x1, (0.5 - s[0] / pi) * erp_height - 0.5};
}

namespace {

// Angles with the longitude unwrapped relative to a reference.
std::array<double, 2> sphere_near(const ViewportSpec& spec, double un, double vn, double phi_ref) {
  auto s = sphere(spec, un * spec.width, vn * spec.height);
  const double pi = std::numbers::pi;
  while (s[1] - phi_ref > pi) s[1] -= 2 * pi;
  while (s[1] - phi_ref < -pi) s[1] += 2 * pi;
  return s;
}

// Rows of the reference Jacobian at normalized coordinates (un, vn):
// {cos(t) dphi/du, dtheta/du, cos(t) dphi/dv, dtheta/dv}.
std::array<double, 4> jac_at(const ViewportSpec& spec, double un, double vn, double h) {
  const double phi0 = sphere(spec, un * spec.width, vn * spec.height)[1];
  const auto c = sphere_near(spec, un, vn, phi0);
  const auto up = sphere_near(spec, un + h, vn, phi0), um = sphere_near(spec, un - h, vn, phi0);
  const auto vp = sphere_near(spec, un, vn + h, phi0), vm = sphere_near(spec, un, vn - h, phi0);
  const double ct = std::cos(c[0]);
  return {ct * (up[1] - um[1]) / (2 * h), (up[0] - um[0]) / (2 * h), ct * (vp[1] - vm[1]) / (2 * h),
          (vp[0] - vm[0]) / (2 * h)};
}

}  // namespace

ShapeReference shape_reference(const ViewportSpec& spec, double u, double v, double step) {
  // The map is evaluated at pixel coordinates; normalized coordinates are
  // (u / w, v / h) so one normalized unit spans the whole viewport.
  const double un = u / spec.width, vn = v / spec.height;
  ShapeReference r;
  r.jac = jac_at(spec, un, vn, step);
  // Outer differences use a larger step so the nested quotient stays well conditioned.
  const double hh = std::sqrt(step) * 1e-1;
  const auto ju_p = jac_at(spec, un + hh, vn, step), ju_m = jac_at(spec, un - hh, vn, step);
  const auto jv_p = jac_at(spec, un, vn + hh, step), jv_m = jac_at(spec, un, vn - hh, step);
  r.hess = {(ju_p[0] - ju_m[0]) / (2 * hh), (jv_p[0] - jv_m[0]) / (2 * hh), (jv_p[2] - jv_m[2]) / (2 * hh),
            (ju_p[1] - ju_m[1]) / (2 * hh), (jv_p[1] - jv_m[1]) / (2 * hh), (jv_p[3] - jv_m[3]) / (2 * hh)};
  return r;
}

double normwise_relative_error(const double* a, const double* b, int n) {
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return den > 0 ? num / den : num;
}

}  // namespace omnivr::oracle
