#pragma once

#include <string>
#include <vector>

#include "omnivr/codec/jpeg.hpp"
#include "omnivr/metrics.hpp"
#include "omnivr/vr.hpp"

namespace omnivr {

struct ViewDirection {
  double theta_deg = 0.0;
  double phi_deg = 0.0;
};

// Equator at four longitudes (including the seam), +-45 degrees, and both poles.
const std::vector<ViewDirection>& default_view_directions();

struct EvalSettings {
  double fov_deg = 90.0;
  int width = 128;
  int height = 128;
  double quality = 75.0;  // JPEG quality used for both the model and the baseline
};

struct EvalRow {
  int image = 0;
  ViewDirection dir;
  MetricReport model;
  MetricReport baseline;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  MetricReport model_mean;
  MetricReport baseline_mean;
  double model_bpp = 0.0;
  double baseline_bpp = 0.0;
};

// Model path: learned downsampler -> JPEG -> render_viewport.
// Baseline: bicubic downscale -> the same JPEG tables -> bilinear rendering from LR.
// Ground truth: bicubic sampling of the HR panorama.
EvalReport evaluate(const VrModel& model, const std::vector<Image>& hr_images,
                    const std::vector<ViewDirection>& dirs, const EvalSettings& settings);

ViewportSpec eval_viewport(const ViewDirection& dir, const EvalSettings& settings);

std::string eval_csv(const EvalReport& report);

}  // namespace omnivr
