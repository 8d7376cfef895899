#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "omnivr/geometry.hpp"
#include "omnivr/image.hpp"
#include "omnivr/nn/autograd.hpp"
#include "omnivr/nn/ops.hpp"
#include "omnivr/ssr.hpp"

namespace omnivr {

struct ModelConfig {
  int scale = 2;          // s
  int patch = 64;         // training patch size p; fixes the unit of local offsets
  int channels = 16;      // C, encoder width
  int freqs = 32;         // F
  int hidden = 64;        // decoder hidden width
  int down_hidden = 16;   // downsampler residual width
  ShapeKind shape_kind = ShapeKind::kSpherical;

  void validate() const;
};

// Four LR cells surrounding a query, their ensemble weights (bilinear, i.e. the
// normalized area of the opposite rectangle) and local offsets x - x_j in
// normalized patch units. Cell order matches bilinear_taps.
struct LocalEnsemble {
  std::array<int, 4> index{};  // row-major index into the LR grid
  std::array<double, 4> weight{};
  std::array<std::array<double, 2>, 4> delta{};
};

// x, y: continuous HR pixel coordinates in the frame of an LR grid of lr_w x lr_h
// cells, each covering `scale` HR pixels. With wrap_x, columns are periodic and
// offsets take the short way around.
LocalEnsemble local_ensemble(double x, double y, int lr_w, int lr_h, int scale, int patch,
                             bool wrap_x);

struct Query {
  double x = 0.0;  // HR pixel coordinate (column)
  double y = 0.0;  // HR pixel coordinate (row)
  std::array<double, kShapeDim> shape{};
};

// Downsampler, encoder E, estimators h_a, h_f, h_p and decoder D. Parameters
// live in one store with deterministic names.
class VrModel {
 public:
  VrModel(const ModelConfig& cfg, std::uint64_t seed);

  const ModelConfig& config() const noexcept { return cfg_; }
  nn::ParamStore& params() noexcept { return params_; }
  const nn::ParamStore& params() const noexcept { return params_; }

  // Bicubic reduction plus a learned residual; [3, H/s, W/s], not clamped.
  nn::Var downsample(const Image& hr, nn::PadMode pad) const;
  // z = E(lr): [C, h, w].
  nn::Var encode(const nn::Var& lr, nn::PadMode pad) const;
  // Bilinear skip of the LR image plus the weighted decoded residuals of the
  // four neighbouring latents. Returns [M, 3].
  nn::Var predict(const nn::Var& lr, const nn::Var& z, const std::vector<Query>& queries,
                  bool wrap_x) const;

  // Sets the decoder output layer to zero, so predictions reduce to the skip.
  void zero_decoder();

 private:
  nn::Var p(const char* name) const { return params_.get(name); }

  ModelConfig cfg_;
  nn::ParamStore params_;
};

struct RenderOptions {
  bool clamp = true;
  int chunk = 4096;  // queries per forward pass
};

// Encodes the LR panorama once and evaluates every viewport pixel. The HR
// frame is (s * lr height) x (s * lr width).
Image render_viewport(const VrModel& model, const Image& lr_erp, const ViewportSpec& spec,
                      const RenderOptions& opts = {});

// Runs the downsampler on a full panorama (longitude-periodic padding).
Image downsample_erp(const VrModel& model, const Image& hr_erp);

nn::Tensor image_to_tensor(const Image& img);
Image tensor_to_image(const nn::Tensor& t, bool clamp);

}  // namespace omnivr
