#pragma once

#include "omnivr/codec/jpeg.hpp"
#include "omnivr/nn/autograd.hpp"
#include "omnivr/random.hpp"

namespace omnivr::codec {

enum class QuantMode {
  kSte,    // round forward, identity backward
  kNoise,  // add uniform noise in [-1/2, 1/2); smooth, used for gradient checks
};

// Rounds with an identity gradient in kSte mode; in eval use plain rounding.
// kNoise needs an rng.
nn::Var quantize(const nn::Var& x, QuantMode mode, Rng* rng = nullptr);

// Total Laplace code length in bits of coefficients laid out as [3, H, W] in
// 8x8 block layout (position = (y % 8) * 8 + x % 8). log_scale: [2, 64].
nn::Var laplace_rate(const nn::Var& coeffs, const nn::Var& log_scale);

struct JpegSimulation {
  nn::Var recon;  // [3, H, W] decoded image, [0, 1] scale, not clamped
  nn::Var bits;   // scalar estimated rate
};

// Differentiable stand-in for encode -> decode: colour transform, DCT, division
// by the tables, quantization, rate estimate, dequantization, inverse DCT and
// inverse colour transform. H and W must be multiples of 8.
JpegSimulation simulate_jpeg(const nn::Var& rgb, const QuantTables& tables, const nn::Var& log_scale,
                             QuantMode mode, Rng* rng = nullptr);

}  // namespace omnivr::codec
