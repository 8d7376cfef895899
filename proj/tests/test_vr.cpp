#include <gtest/gtest.h>

#include <cmath>

#include "omnivr/error.hpp"
#include "omnivr/oracles/oracles.hpp"
#include "omnivr/resample.hpp"
#include "omnivr/synthetic.hpp"
#include "omnivr/vr.hpp"

using namespace omnivr;

namespace {

ModelConfig tiny() {
  ModelConfig c;
  c.channels = 4;
  c.freqs = 4;
  c.hidden = 8;
  c.down_hidden = 4;
  c.patch = 16;
  return c;
}

double max_diff(const Image& a, const Image& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace

TEST(LocalEnsemble, WeightsSumToOneAndCellCenterIsExact) {
  const LocalEnsemble e = local_ensemble(4.5, 6.5, 8, 8, 2, 16, false);
  double total = 0;
  for (double w : e.weight) total += w;
  EXPECT_NEAR(total, 1.0, 1e-15);
  // HR (4.5, 6.5) is the center of LR cell (2, 3).
  for (int k = 0; k < 4; ++k) {
    if (e.index[k] == 3 * 8 + 2) {
      EXPECT_NEAR(e.weight[k], 1.0, 1e-15);
      EXPECT_NEAR(e.delta[k][0], 0.0, 1e-15);
    }
  }
}

TEST(LocalEnsemble, OffsetsWrapAcrossTheSeam) {
  const LocalEnsemble e = local_ensemble(15.8, 3.0, 8, 4, 2, 16, true);
  for (int k = 0; k < 4; ++k) EXPECT_LT(std::abs(e.delta[k][0]), 2.0 * 2 / 16 + 1e-12);
}

TEST(VrModel, ZeroDecoderReproducesBilinearSkip) {
  VrModel model(tiny(), 5);
  model.zero_decoder();
  for (int f = 0; f < 3; ++f) {
    const Image lr = synthetic_panorama(16, 32, 10 + f);
    const ViewportSpec s{0.3 * f - 0.3, 2.5 * f - 2.0, 1.4, 1.2, 20, 24};
    const Image a = render_viewport(model, lr, s, {false, 4096});
    // Bilinear sampling of LR at the HR coordinate mapped to the LR grid.
    for (int v = 0; v < s.height; ++v) {
      for (int u = 0; u < s.width; ++u) {
        const auto e = oracle::erp(s, u, v, 32, 64);
        const Rgb ref = sample_at(lr, {(e[0] + 0.5) / 2 - 0.5, (e[1] + 0.5) / 2 - 0.5}, Kernel::bilinear(), true);
        for (int c = 0; c < 3; ++c) EXPECT_NEAR(a.at(c, v, u), ref[c], 1e-9);
      }
    }
  }
}

TEST(VrModel, OutputShapeAndChunkingInvariance) {
  VrModel model(tiny(), 6);
  const Image lr = synthetic_panorama(16, 32, 3);
  const ViewportSpec s{0.1, 0.4, 1.5, 1.0, 11, 17};
  const Image a = render_viewport(model, lr, s, {true, 4096});
  const Image b = render_viewport(model, lr, s, {true, 7});
  EXPECT_EQ(a.width(), 17);
  EXPECT_EQ(a.height(), 11);
  EXPECT_LT(max_diff(a, b), 1e-12);
}

TEST(VrModel, LearnedRendererIsSeamContinuous) {
  VrModel model(tiny(), 7);
  const Image lr = synthetic_panorama(16, 32, 4);
  const ViewportSpec s{0.2, kPi - 0.05, 1.4, 1.4, 24, 24};
  ViewportSpec r = s;
  r.phi_c = wrap_angle(s.phi_c - kPi);
  const Image a = render_viewport(model, lr, s);
  const Image b = render_viewport(model, roll_columns(lr, 16), r);
  EXPECT_LT(max_diff(a, b), 1e-6);
}

TEST(VrModel, DownsamplerStartsAtBicubic) {
  VrModel model(tiny(), 8);
  const Image hr = synthetic_panorama(32, 64, 5);
  EXPECT_LT(max_diff(downsample_erp(model, hr), bicubic_downscale(hr, 2, EdgeMode::kWrapX)), 1e-12);
}

TEST(VrModel, GradientsReachEncoderAndDownsampler) {
  VrModel model(tiny(), 9);
  for (const char* n : {"down.conv3.w", "down.conv3.b"}) {
    for (double& x : model.params().get(n).mutable_value().values()) x = 0.05;
  }
  const Image hr = synthetic_panorama(16, 32, 6);
  const nn::Var lr = model.downsample(hr, nn::PadMode::kZero);
  const nn::Var z = model.encode(lr, nn::PadMode::kZero);
  std::vector<Query> q;
  for (int i = 0; i < 10; ++i) q.push_back({1.0 + i, 2.0 + 0.5 * i, {}});
  nn::backward(nn::sum_sq(model.predict(lr, z, q, false)));
  for (const char* n : {"down.conv1.w", "enc.conv_in.w", "h_a.w", "h_p.b", "dec.fc2.w"}) {
    double g = 0;
    for (double x : model.params().get(n).grad().values()) g += std::abs(x);
    EXPECT_GT(g, 0.0) << n;
  }
}

TEST(VrModel, RejectsBadConfig) {
  ModelConfig c = tiny();
  c.patch = 15;
  EXPECT_THROW(VrModel(c, 1), Error);
}
