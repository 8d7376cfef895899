#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>

#include "omnivr/error.hpp"
#include "omnivr/evaluate.hpp"
#include "omnivr/oracles/oracles.hpp"
#include "omnivr/training.hpp"

using namespace omnivr;

namespace {

TrainConfig toy_config() {
  TrainConfig cfg;
  cfg.patch = 16;
  cfg.samples = 64;
  cfg.resolutions = {32, 48};
  cfg.channels = 4;
  cfg.freqs = 4;
  cfg.hidden = 8;
  cfg.down_hidden = 4;
  cfg.erp_height = 32;
  cfg.erp_width = 64;
  cfg.batch = 2;
  cfg.iterations = 3;
  return cfg;
}

}  // namespace

TEST(Losses, PixelLossIsMeanAbsoluteError) {
  const nn::Var a = nn::constant(nn::Tensor({1, 3}, {0.3, 0.0, 0.0}));
  const nn::Var b = nn::constant(nn::Tensor({1, 3}));
  EXPECT_NEAR(loss_pix(a, b).value().item(), 0.3, 1e-15);
  EXPECT_THROW(loss_pix(a, nn::constant(nn::Tensor({2, 3}))), Error);
}

TEST(Losses, GuideLossSharesSpatialDenominator) {
  const nn::Var a = nn::constant(nn::Tensor({3, 4, 4}, 0.1));
  const nn::Var b = nn::constant(nn::Tensor({3, 4, 4}));
  EXPECT_NEAR(loss_guide(a, b, 8, 2).value().item(), 3 * 0.01, 1e-15);
}

TEST(Losses, TotalIsLinearInParts) {
  const auto s = [](double v) { return nn::constant(nn::Tensor::scalar(v)); };
  EXPECT_NEAR(loss_total(s(1), s(2), s(3), {0, 0}).value().item(), 1.0, 1e-15);
  EXPECT_NEAR(loss_total(s(1), s(2), s(3), {0.5, 0.1}).value().item(), 1 + 1 + 0.3, 1e-15);
  EXPECT_NEAR(loss_bpp(s(64), 8).value().item(), 1.0, 1e-15);
}

TEST(Training, EndToEndGradcheckPasses) {
  const oracle::EndToEndGradCheck r = oracle::end_to_end_gradcheck(21, 16);
  EXPECT_LT(r.result.max_rel_error, 1e-3) << r.result.worst;
  EXPECT_GT(r.downsampler_grad_norm, 0.0);
}

TEST(Training, PixelLossAloneReachesDownsampler) {
  TrainConfig cfg = toy_config();
  const std::vector<Image> data = load_training_data(cfg);
  VrModel model(model_config(cfg), 3);
  for (double& x : model.params().get("down.conv3.w").mutable_value().values()) x = 0.01;
  Rng rng(4);
  const TrainItem item = prepare_item(data, cfg, rng);
  const LossParts parts =
      item_loss(model, item, codec::standard_tables(75), {0.0, 0.0}, codec::QuantMode::kSte, 1);
  nn::backward(parts.total);
  double g = 0;
  for (double x : model.params().get("down.conv1.w").grad().values()) g += std::abs(x);
  EXPECT_GT(g, 0.0);
}

TEST(Training, StepsAreDeterministic) {
  const TrainConfig cfg = toy_config();
  Trainer a(cfg, load_training_data(cfg)), b(cfg, load_training_data(cfg));
  a.run(3);
  b.run(3);
  ASSERT_EQ(a.log().size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(a.log()[i].loss, b.log()[i].loss);
}

TEST(Training, ResumeMatchesUninterruptedRun) {
  const TrainConfig cfg = toy_config();
  Trainer full(cfg, load_training_data(cfg));
  full.run(4);
  Trainer first(cfg, load_training_data(cfg));
  first.run(2);
  const std::string path = ::testing::TempDir() + "/resume.ckpt";
  nn::write_checkpoint(path, first.checkpoint());
  Trainer second(cfg, load_training_data(cfg));
  second.restore(nn::read_checkpoint(path));
  EXPECT_EQ(second.iteration(), 2);
  second.run(4);
  EXPECT_EQ(second.log().back().loss, full.log().back().loss);
  // The training checkpoint doubles as a model file.
  const VrModel m = load_model(path);
  EXPECT_EQ(m.config().channels, cfg.channels);
  std::remove(path.c_str());
}

TEST(Evaluate, OneRowPerImageAndDirection) {
  TrainConfig cfg = toy_config();
  VrModel model(model_config(cfg), 1);
  const auto data = load_training_data(cfg);
  const EvalReport r = evaluate(model, data, default_view_directions(), {90, 16, 16, 75});
  EXPECT_EQ(r.rows.size(), data.size() * default_view_directions().size());
  EXPECT_EQ(default_view_directions().size(), 10u);
  EXPECT_GT(r.model_bpp, 0.0);
  const std::string csv = eval_csv(r);
  EXPECT_NE(csv.find("mean"), std::string::npos);
}
