#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "omnivr/oracles/oracles.hpp"
#include "omnivr/random.hpp"
#include "omnivr/resample.hpp"
#include "omnivr/ssr.hpp"

namespace omnivr::oracle {

namespace {

bool report(std::ostream& out, const std::string& name, bool ok, const std::string& detail) {
  out << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
  return ok;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << std::scientific << v;
  return s.str();
}

ViewportSpec random_spec(Rng& rng, int min_res, int max_res) {
  ViewportSpec s;
  s.theta_c = deg_to_rad(rng.uniform(-90.0, 90.0));
  s.phi_c = deg_to_rad(rng.uniform(-180.0, 180.0));
  s.fov_h = deg_to_rad(rng.uniform(30.0, 120.0));
  s.fov_v = deg_to_rad(rng.uniform(30.0, 120.0));
  s.width = rng.range(min_res, max_res);
  s.height = rng.range(min_res, max_res);
  return s;
}

double max_abs_diff(const Image& a, const Image& b) {
  double m = 0.0;
  for (int c = 0; c < Image::kChannels; ++c)
    for (int y = 0; y < a.height(); ++y)
      for (int x = 0; x < a.width(); ++x) m = std::max(m, std::abs(a.at(c, y, x) - b.at(c, y, x)));
  return m;
}

}  // namespace

bool check_roundtrip(std::ostream& out) {
  constexpr int kH = 1024, kW = 2048;
  Rng rng(101);
  const auto t0 = std::chrono::steady_clock::now();
  double max_err = 0.0, max_oracle = 0.0;
  std::size_t points = 0;
  for (int i = 0; i < 100; ++i) {
    const ViewportSpec spec = random_spec(rng, 16, 160);
    const ViewportProjection proj(spec);
    for (int v = 0; v < spec.height; ++v) {
      for (int u = 0; u < spec.width; ++u) {
        const ViewportCoord y{static_cast<double>(u), static_cast<double>(v)};
        const ErpCoord e = proj.inverse_map(y, kH, kW);
        const ViewportCoord back = proj.forward_map(e, kH, kW);
        max_err = std::max({max_err, std::abs(back.u - y.u), std::abs(back.v - y.v)});
        const auto ref = erp(spec, y.u, y.v, kH, kW);
        double dx = std::abs(e.x1 - ref[0]);
        dx = std::min(dx, kW - dx);
        max_oracle = std::max({max_oracle, dx, std::abs(e.x2 - ref[1])});
        ++points;
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = report(out, "roundtrip f(f^-1(y)) == y", max_err < 1e-9,
                   "max error " + fmt(max_err) + " px over " + std::to_string(points) + " points, " +
                       fmt(secs) + " s");
  ok &= report(out, "roundtrip inverse_map vs basis-vector oracle", max_oracle < 1e-9,
               "max error " + fmt(max_oracle) + " ERP px");
  ok &= report(out, "roundtrip runtime", secs < 10.0, fmt(secs) + " s");
  return ok;
}

bool check_ssr_fd(std::ostream& out) {
  constexpr int kH = 1024, kW = 2048;
  Rng rng(202);
  double jac_err = 0.0, hess_err = 0.0;
  int tested = 0;
  while (tested < 2000) {
    const ViewportSpec spec = random_spec(rng, 512, 1024);
    for (int k = 0; k < 20; ++k) {
      const ViewportCoord y{static_cast<double>(rng.range(1, spec.width - 2)),
                            static_cast<double>(rng.range(1, spec.height - 2))};
      const double lat = sphere(spec, y.u, y.v)[0];
      // Keep the whole stencil inside the band.
      if (std::abs(lat) > deg_to_rad(75.0)) continue;
      const ShapeDescriptor d = shape_at(spec, y, kH, kW);
      const ShapeReference r = shape_reference(spec, y.u, y.v);
      jac_err = std::max(jac_err, normwise_relative_error(d.jac.data(), r.jac.data(), 4));
      hess_err = std::max(hess_err, normwise_relative_error(d.hess.data(), r.hess.data(), 6));
      ++tested;
    }
  }
  bool ok = report(out, "ssr-fd jacobian |theta|<=75", jac_err < 1e-3,
                   "max normwise relative error " + fmt(jac_err) + " over " + std::to_string(tested) + " pixels");
  ok &= report(out, "ssr-fd hessian |theta|<=75", hess_err < 1e-2, "max normwise relative error " + fmt(hess_err));

  // Near the poles: the planar descriptor, which ignores the sphere metric and
  // the longitude wrap, is far less accurate than the spherical one.
  double sph = 0.0, planar = 0.0;
  int pole_tested = 0;
  while (pole_tested < 400) {
    ViewportSpec spec = random_spec(rng, 512, 1024);
    spec.theta_c = (rng.uniform() < 0.5 ? -1 : 1) * deg_to_rad(rng.uniform(70.0, 90.0));
    const ViewportCoord y{static_cast<double>(rng.range(1, spec.width - 2)),
                          static_cast<double>(rng.range(1, spec.height - 2))};
    const double lat = std::abs(sphere(spec, y.u, y.v)[0]);
    if (lat < deg_to_rad(80.0) || lat > deg_to_rad(85.0)) continue;
    const ShapeReference r = shape_reference(spec, y.u, y.v);
    const ShapeDescriptor ds = shape_at(spec, y, kH, kW);
    const ShapeDescriptor dp = shape_2d_baseline(spec, y, kH, kW);
    sph = std::max(sph, normwise_relative_error(ds.jac.data(), r.jac.data(), 4));
    planar = std::max(planar, normwise_relative_error(dp.jac.data(), r.jac.data(), 4));
    ++pole_tested;
  }
  ok &= report(out, "ssr-fd planar error > 10x spherical at 80..85 deg", planar > 10 * sph,
               "planar " + fmt(planar) + " vs spherical " + fmt(sph));

  // Seam: a viewport straddling phi = +-pi against the frame rolled by pi.
  double sph_roll = 0.0, planar_roll = 0.0;
  for (int i = 0; i < 20; ++i) {
    ViewportSpec spec = random_spec(rng, 64, 256);
    spec.phi_c = kPi - deg_to_rad(rng.uniform(0.0, 10.0));
    ViewportSpec rolled = spec;
    rolled.phi_c = wrap_angle(spec.phi_c - kPi);
    const double pole_margin = 3.0 * std::max(spec.fov_h / spec.width, spec.fov_v / spec.height);
    for (int v = 0; v < spec.height; v += 7) {
      for (int u = 0; u < spec.width; ++u) {
        const ViewportCoord y{static_cast<double>(u), static_cast<double>(v)};
        // A stencil that encloses a pole has longitude steps near +-pi whose
        // minor-arc sign is decided by rounding; such pixels are excluded.
        if (std::abs(sphere(spec, y.u, y.v)[0]) > kPi / 2 - pole_margin) continue;
        const auto a = shape_at(spec, y, kH, kW).flat();
        const auto b = shape_at(rolled, y, kH, kW).flat();
        const auto pa = shape_2d_baseline(spec, y, kH, kW).flat();
        const auto pb = shape_2d_baseline(rolled, y, kH, kW).flat();
        for (int k = 0; k < kShapeDim; ++k) {
          sph_roll = std::max(sph_roll, std::abs(a[k] - b[k]));
          planar_roll = std::max(planar_roll, std::abs(pa[k] - pb[k]));
        }
      }
    }
  }
  ok &= report(out, "ssr-fd spherical roll invariance", sph_roll < 1e-9, "max difference " + fmt(sph_roll));
  ok &= report(out, "ssr-fd planar seam discontinuity", planar_roll > 1.0,
               "max difference " + fmt(planar_roll));
  return ok;
}

bool check_downscale(std::ostream& out) {
  Rng rng(303);
  double err = 0.0;
  {
    Image ramp(8, 8);
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) ramp.at(c, y, x) = (x + 8 * y + c) / 70.0;
    err = std::max(err, max_abs_diff(bicubic_downscale(ramp, 2), dense_downscale(ramp, 2)));
  }
  double wrap_err = 0.0;
  for (int scale : {2, 3, 4}) {
    Image img(scale * rng.range(3, 9), scale * rng.range(3, 9));
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) img.at(c, y, x) = rng.uniform();
    err = std::max(err, max_abs_diff(bicubic_downscale(img, scale), dense_downscale(img, scale)));
    wrap_err = std::max(wrap_err, max_abs_diff(bicubic_downscale(img, scale, EdgeMode::kWrapX),
                                               dense_downscale(img, scale, true)));
  }
  bool ok = report(out, "downscale vs dense 2D oracle (clamped)", err < 1e-6, "max error " + fmt(err));
  ok &= report(out, "downscale vs dense 2D oracle (wrapped)", wrap_err < 1e-6, "max error " + fmt(wrap_err));
  return ok;
}

bool check_gradcheck(std::ostream& out) {
  bool ok = true;
  for (const auto& [name, r] : primitive_gradchecks()) {
    ok &= report(out, "gradcheck " + name, r.max_rel_error < 1e-4,
                 "max relative error " + fmt(r.max_rel_error) + " at " + r.worst + " (" +
                     std::to_string(r.checked) + " entries)");
  }
  const EndToEndGradCheck e = end_to_end_gradcheck();
  ok &= report(out, "gradcheck end-to-end L_total", e.result.max_rel_error < 1e-3,
               "max relative error " + fmt(e.result.max_rel_error) + " at " + e.result.worst + " (" +
                   std::to_string(e.result.checked) + " entries)");
  ok &= report(out, "gradcheck downsampler receives gradient", e.downsampler_grad_norm > 0.0,
               "sum |grad| " + fmt(e.downsampler_grad_norm));
  return ok;
}

}  // namespace omnivr::oracle
