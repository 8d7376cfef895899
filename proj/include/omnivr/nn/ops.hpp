#pragma once

#include <array>
#include <vector>

#include "omnivr/nn/autograd.hpp"

namespace omnivr::nn {

// Elementwise arithmetic on equal shapes.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, double k);

Var relu(const Var& x);
Var gelu(const Var& x);  // exact (erf) form

// x: [N, in], w: [out, in], b: [out] -> [N, out]
Var linear(const Var& x, const Var& w, const Var& b);

enum class PadMode {
  kZero,   // zero padding on all sides
  kWrapX,  // circular in width (ERP longitude), zero in height
};

struct ConvOptions {
  int stride = 1;
  int padding = 0;
  PadMode pad_mode = PadMode::kZero;
};

// x: [C, H, W], w: [O, C, k, k], b: [O] -> [O, H', W']
Var conv2d(const Var& x, const Var& w, const Var& b, const ConvOptions& opt = {});

// [C, H, W] -> [H*W, C]
Var chw_to_rows(const Var& x);
// Row gather: out[i] = x[idx[i]]. Backward scatter-adds.
Var gather_rows(const Var& x, const std::vector<int>& idx);
// x: [M, C] with M = groups * g; out[r] = sum_k weights[r*g+k] * x[r*g+k], in k order.
Var group_weighted_sum(const Var& x, const std::vector<double>& weights, int g);

// Local texture features: amp [M, 2F], freq [M, 2F] laid out (fx_1..fx_F, fy_1..fy_F),
// phase [M, F], delta [M, 2] (constant). Output [M, 2F]:
//   out[:, k]     = amp[:, k]     * cos(pi * (fx_k dx + fy_k dy + phase_k))
//   out[:, F + k] = amp[:, F + k] * sin(pi * (fx_k dx + fy_k dy + phase_k))
Var fourier_features(const Var& amp, const Var& freq, const Var& phase, const Tensor& delta);

// Reductions to a scalar [1]; accumulation in double.
Var sum(const Var& x);
Var sum_abs(const Var& x);
Var sum_sq(const Var& x);

// Per-pixel affine colour map: out[o] = sum_c m[o][c] x[c] + offset[o].
Var channel_affine(const Var& x, const std::array<std::array<double, 3>, 3>& m,
                   const std::array<double, 3>& offset);
// Orthonormal 8x8 block DCT-II (or its inverse) of every channel. H, W multiples of 8.
Var block_dct(const Var& x, bool inverse);
// out[c, y, x] = x[c, y, x] * table[c][(y % 8) * 8 + x % 8]
Var block_scale(const Var& x, const std::vector<std::array<double, 64>>& table);
// Rounds in the forward pass, passes the gradient through unchanged.
Var round_ste(const Var& x);

}  // namespace omnivr::nn
