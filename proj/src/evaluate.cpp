#include "omnivr/evaluate.hpp"

#include <sstream>

#include "omnivr/resample.hpp"

namespace omnivr {

const std::vector<ViewDirection>& default_view_directions() {
  static const std::vector<ViewDirection> dirs = {
      {0, 0}, {0, 90}, {0, 180}, {0, -90}, {45, 0}, {45, 135}, {-45, -45}, {-45, 180}, {90, 0}, {-90, 0},
  };
  return dirs;
}

ViewportSpec eval_viewport(const ViewDirection& dir, const EvalSettings& settings) {
  ViewportSpec spec;
  spec.theta_c = deg_to_rad(dir.theta_deg);
  spec.phi_c = wrap_angle(deg_to_rad(dir.phi_deg));
  spec.fov_h = spec.fov_v = deg_to_rad(settings.fov_deg);
  spec.width = settings.width;
  spec.height = settings.height;
  return spec;
}

EvalReport evaluate(const VrModel& model, const std::vector<Image>& hr_images,
                    const std::vector<ViewDirection>& dirs, const EvalSettings& settings) {
  EvalReport report;
  const int s = model.config().scale;
  const auto tables = codec::standard_tables(settings.quality);
  int count = 0;
  for (std::size_t i = 0; i < hr_images.size(); ++i) {
    const Image& hr = hr_images[i];
    const auto ours = codec::encode(downsample_erp(model, hr), tables);
    const auto base = codec::encode(bicubic_downscale(hr, s, EdgeMode::kWrapX), tables);
    report.model_bpp += codec::bpp_real(ours.bytes.size(), hr.height(), hr.width());
    report.baseline_bpp += codec::bpp_real(base.bytes.size(), hr.height(), hr.width());
    const Image lr_ours = codec::decode(ours.bytes);
    const Image lr_base = codec::decode(base.bytes);
    for (const auto& dir : dirs) {
      const ViewportSpec spec = eval_viewport(dir, settings);
      const Image gt = render_viewport_baseline(hr, spec, Kernel::bicubic());
      EvalRow row;
      row.image = static_cast<int>(i);
      row.dir = dir;
      row.model = metric_suite(render_viewport(model, lr_ours, spec), gt, ImageKind::kViewport);
      row.baseline = metric_suite(render_viewport_baseline(lr_base, spec, Kernel::bilinear()), gt,
                                  ImageKind::kViewport);
      report.model_mean.psnr += row.model.psnr;
      report.model_mean.ssim += row.model.ssim;
      report.baseline_mean.psnr += row.baseline.psnr;
      report.baseline_mean.ssim += row.baseline.ssim;
      report.rows.push_back(row);
      ++count;
    }
  }
  if (count > 0) {
    report.model_mean.psnr /= count;
    report.model_mean.ssim /= count;
    report.baseline_mean.psnr /= count;
    report.baseline_mean.ssim /= count;
  }
  if (!hr_images.empty()) {
    report.model_bpp /= static_cast<double>(hr_images.size());
    report.baseline_bpp /= static_cast<double>(hr_images.size());
  }
  report.model_mean.ws_psnr = report.baseline_mean.ws_psnr = 0.0;
  return report;
}

std::string eval_csv(const EvalReport& report) {
  std::ostringstream os;
  os.precision(8);
  os << "image,theta_deg,phi_deg,psnr,ssim,baseline_psnr,baseline_ssim\n";
  for (const auto& r : report.rows) {
    os << r.image << "," << r.dir.theta_deg << "," << r.dir.phi_deg << "," << r.model.psnr << ","
       << r.model.ssim << "," << r.baseline.psnr << "," << r.baseline.ssim << "\n";
  }
  os << "mean,,," << report.model_mean.psnr << "," << report.model_mean.ssim << ","
     << report.baseline_mean.psnr << "," << report.baseline_mean.ssim << "\n";
  return os.str();
}

}  // namespace omnivr
