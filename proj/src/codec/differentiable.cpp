#include "omnivr/codec/differentiable.hpp"

#include <cmath>

#include "omnivr/codec/rate.hpp"
#include "omnivr/error.hpp"
#include "omnivr/nn/ops.hpp"

namespace omnivr::codec {

using nn::Node;
using nn::Tensor;
using nn::Var;

Var quantize(const Var& x, QuantMode mode, Rng* rng) {
  if (mode == QuantMode::kSte) return nn::round_ste(x);
  if (!rng) throw Error(ErrorCode::kInvalidArgument, "noise quantization needs an rng");
  Tensor noise(x.value().shape());
  for (double& v : noise.values()) v = rng->uniform() - 0.5;
  return nn::add(x, nn::constant(std::move(noise)));
}

Var laplace_rate(const Var& coeffs, const Var& log_scale) {
  const Tensor& c = coeffs.value();
  if (c.ndim() != 3 || c.dim(0) != 3 || c.dim(1) % 8 != 0 || c.dim(2) % 8 != 0) {
    throw Error(ErrorCode::kShapeMismatch, "laplace_rate: coefficients must be [3, 8m, 8n]");
  }
  if (log_scale.value().size() != 128) {
    throw Error(ErrorCode::kShapeMismatch, "laplace_rate: log_scale must be [2, 64]");
  }
  const int h = c.dim(1), w = c.dim(2);
  auto position = [w](std::size_t i) {
    const int y = static_cast<int>(i / w) % 8;
    const int x = static_cast<int>(i % w) % 8;
    return y * 8 + x;
  };
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  double bits = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const int cls = i < plane ? 0 : 1;
    bits += laplace_bits(c[i], log_scale.value()[cls * 64 + position(i % plane)]);
  }
  return nn::make_node(Tensor::scalar(bits), {coeffs, log_scale}, [plane, position](Node& n) {
    Node& pc = *n.parents[0];
    Node& pl = *n.parents[1];
    const double go = n.grad[0];
    double* gc = pc.requires_grad ? pc.grad_buffer().data() : nullptr;
    double* gl = pl.requires_grad ? pl.grad_buffer().data() : nullptr;
    for (std::size_t i = 0; i < pc.value.size(); ++i) {
      const int cls = i < plane ? 0 : 1;
      const int idx = cls * 64 + position(i % plane);
      double dc = 0.0, dl = 0.0;
      laplace_bits(pc.value[i], pl.value[idx], &dc, &dl);
      if (gc) gc[i] += go * dc;
      if (gl) gl[idx] += go * dl;
    }
  });
}

JpegSimulation simulate_jpeg(const Var& rgb, const QuantTables& tables, const Var& log_scale,
                             QuantMode mode, Rng* rng) {
  // RGB in [0, 1] -> level-shifted YCbCr on the [0, 255] scale.
  const std::array<std::array<double, 3>, 3> fwd = {{
      {0.299 * 255, 0.587 * 255, 0.114 * 255},
      {-0.168735892 * 255, -0.331264108 * 255, 0.5 * 255},
      {0.5 * 255, -0.418687589 * 255, -0.081312411 * 255},
  }};
  const std::array<double, 3> fwd_off = {-128.0, 0.0, 0.0};
  const std::array<std::array<double, 3>, 3> inv = {{
      {1.0 / 255, 0.0, 1.402 / 255},
      {1.0 / 255, -0.344136286 / 255, -0.714136286 / 255},
      {1.0 / 255, 1.772 / 255, 0.0},
  }};
  const std::array<double, 3> inv_off = {128.0 / 255, 128.0 / 255, 128.0 / 255};

  std::vector<std::array<double, 64>> div(3), mul(3);
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 64; ++i) {
      mul[c][i] = tables.table(c)[i];
      div[c][i] = 1.0 / tables.table(c)[i];
    }
  }
  Var ycc = nn::channel_affine(rgb, fwd, fwd_off);
  Var coef = nn::block_dct(ycc, false);
  Var q = quantize(nn::block_scale(coef, div), mode, rng);
  JpegSimulation out;
  out.bits = laplace_rate(q, log_scale);
  Var rec = nn::block_dct(nn::block_scale(q, mul), true);
  out.recon = nn::channel_affine(rec, inv, inv_off);
  return out;
}

}  // namespace omnivr::codec
