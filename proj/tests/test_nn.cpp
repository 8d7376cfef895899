#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>

#include "omnivr/error.hpp"
#include "omnivr/nn/checkpoint.hpp"
#include "omnivr/nn/ops.hpp"
#include "omnivr/nn/optim.hpp"
#include "omnivr/oracles/oracles.hpp"

using namespace omnivr;
using namespace omnivr::nn;

TEST(Tensor, ShapeAndReshape) {
  Tensor t({2, 3}, 1.5);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.reshaped({3, 2}).dim(0), 3);
  EXPECT_THROW(t.reshaped({4, 2}), Error);
  EXPECT_THROW(t.item(), Error);
  EXPECT_EQ(Tensor::scalar(2.0).item(), 2.0);
}

TEST(Autograd, GradientsAccumulateOverSharedNodes) {
  Var x = leaf(Tensor({1}, {3.0}), true);
  Var y = mul(x, x);            // x^2
  Var z = add(y, scale(x, 2));  // x^2 + 2x
  backward(sum(z));
  EXPECT_DOUBLE_EQ(x.grad()[0], 8.0);
}

TEST(Autograd, DisconnectedGraphIsReported) {
  Var c = constant(Tensor({2}, {1.0, 2.0}));
  try {
    backward(sum(c));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDisconnectedGraph);
  }
}

TEST(Autograd, ShapeMismatchIsReported) {
  Var a = leaf(Tensor({2, 3}), true), b = leaf(Tensor({3, 2}), true);
  try {
    add(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(Autograd, EveryPrimitivePassesGradcheck) {
  for (const auto& r : oracle::primitive_gradchecks(123)) {
    EXPECT_LT(r.result.max_rel_error, 1e-4) << r.name << " worst at " << r.result.worst;
    EXPECT_GT(r.result.checked, 0u) << r.name;
  }
}

TEST(Autograd, RoundSteHasIdentityGradient) {
  Var x = leaf(Tensor({3}, {0.4, 1.6, -2.5}), true);
  Var r = round_ste(x);
  EXPECT_EQ(r.value()[0], 0.0);
  EXPECT_EQ(r.value()[1], 2.0);
  backward(sum(scale(r, 3.0)));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(x.grad()[i], 3.0);
}

TEST(Ops, Conv2dMatchesDirectLoop) {
  Tensor x({1, 3, 4}, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  Tensor w({1, 1, 3, 3}, {0, 0, 0, 1, 0, 0, 0, 0, 0});  // picks the left neighbour
  Var out = conv2d(constant(x), constant(w), constant(Tensor({1})), {1, 1, PadMode::kWrapX});
  EXPECT_EQ(out.value()[0], 4.0);  // wraps to the last column
  EXPECT_EQ(out.value()[1], 1.0);
  Var zero = conv2d(constant(x), constant(w), constant(Tensor({1})), {1, 1, PadMode::kZero});
  EXPECT_EQ(zero.value()[0], 0.0);
}

TEST(Ops, BlockDctRoundTrips) {
  Tensor x({3, 8, 16});
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.37 * i);
  const Var y = block_dct(block_dct(constant(x), false), true);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(y.value()[i], x[i], 1e-12);
}

TEST(Ops, GroupWeightedSumOrder) {
  Tensor x({4, 1}, {1, 2, 3, 4});
  const Var y = group_weighted_sum(constant(x), {0.5, 0.5, 1, -1}, 2);
  EXPECT_DOUBLE_EQ(y.value()[0], 1.5);
  EXPECT_DOUBLE_EQ(y.value()[1], -1.0);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  ParamStore ps;
  Var& p = ps.add("w", Tensor({2}, {1.0, -1.0}));
  backward(sum(mul(p, constant(Tensor({2}, {3.0, -0.5})))));
  Adam adam({0.1, 0.9, 0.999, 1e-8});
  adam.step(ps);
  // Bias-corrected first step is lr * g / (|g| + eps).
  EXPECT_NEAR(ps.get("w").value()[0], 0.9, 1e-7);
  EXPECT_NEAR(ps.get("w").value()[1], -0.9, 1e-7);
  EXPECT_EQ(adam.steps(), 1);
}

TEST(Adam, MinimizesQuadratic) {
  ParamStore ps;
  ps.add("x", Tensor({3}, {2.0, -3.0, 0.5}));
  Adam adam({0.05, 0.9, 0.999, 1e-8});
  for (int i = 0; i < 2000; ++i) {
    ps.zero_grad();
    backward(sum_sq(ps.get("x")));
    adam.step(ps);
  }
  for (double v : ps.get("x").value().values()) EXPECT_NEAR(v, 0.0, 1e-2);
}

TEST(Checkpoint, RoundTripsParametersAndMoments) {
  ParamStore ps;
  ps.add("a", Tensor({2, 2}, {1, 2, 3, 4}));
  ps.add("b", Tensor({3}, {-1, 0.5, 1e-300}));
  backward(sum_sq(add(ps.get("a"), ps.get("a"))));
  Adam adam;
  adam.step(ps);
  const std::string path = ::testing::TempDir() + "/nn_roundtrip.ckpt";
  write_checkpoint(path, make_checkpoint(ps, &adam, {{"note", "x y"}}));
  const Checkpoint c = read_checkpoint(path);
  EXPECT_EQ(c.meta.at("note"), "x y");

  ParamStore fresh;
  fresh.add("a", Tensor({2, 2}));
  fresh.add("b", Tensor({3}));
  Adam fresh_adam;
  restore_checkpoint(c, fresh, &fresh_adam);
  EXPECT_EQ(fresh.get("a").value(), ps.get("a").value());
  EXPECT_EQ(fresh.get("b").value(), ps.get("b").value());
  EXPECT_EQ(fresh_adam.steps(), 1);
  EXPECT_EQ(fresh_adam.first_moments().at("a"), adam.first_moments().at("a"));

  ParamStore wrong;
  wrong.add("a", Tensor({4}));
  wrong.add("b", Tensor({3}));
  EXPECT_THROW(restore_checkpoint(c, wrong, nullptr), Error);
  std::remove(path.c_str());
}

TEST(Checkpoint, RejectsCorruptFiles) {
  const std::string path = ::testing::TempDir() + "/nn_corrupt.ckpt";
  FILE* f = std::fopen(path.c_str(), "wb");
  std::fputs("OVRCKPT", f);
  std::fclose(f);
  EXPECT_THROW(read_checkpoint(path), Error);
  std::remove(path.c_str());
}
