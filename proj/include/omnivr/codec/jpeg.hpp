#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "omnivr/image.hpp"

namespace omnivr::codec {

// Natural (row-major) index of the k-th coefficient in zigzag order.
const std::array<int, 64>& zigzag_to_natural();

// Quantization tables in natural order, entries in [1, 255].
struct QuantTables {
  std::array<int, 64> luma{};
  std::array<int, 64> chroma{};
  double quality = 0.0;  // the quality the tables were derived from; 0 when custom

  const std::array<int, 64>& table(int channel) const { return channel == 0 ? luma : chroma; }
  int max_entry() const;
};

// Reference luminance/chrominance tables scaled by the conventional quality
// formula (scale = 5000/q below 50, 200 - 2q above). Quality is continuous in [1, 100].
QuantTables standard_tables(double quality);
// All-ones tables: the finest quantizer the baseline format can express.
QuantTables unit_tables();

// JFIF colour transform on the [0, 255] scale.
std::array<double, 3> rgb_to_ycbcr(double r, double g, double b);
std::array<double, 3> ycbcr_to_rgb(double y, double cb, double cr);

// Orthonormal 8x8 DCT-II of one block (natural order in and out).
void fdct8x8(const double* in, double* out);
void idct8x8(const double* in, double* out);

// Quantized coefficients, one block per 8x8 tile, zigzag order, for Y, Cb, Cr.
struct CoeffBlocks {
  int blocks_w = 0;
  int blocks_h = 0;
  std::array<std::vector<std::array<int, 64>>, 3> channels;

  std::size_t block_count() const { return static_cast<std::size_t>(blocks_w) * blocks_h; }
};

// Colour transform, level shift, DCT and rounding division by the tables.
// Dimensions that are not multiples of 8 are padded by edge replication.
CoeffBlocks forward_quantize(const Image& img, const QuantTables& q);
// Dequantize, inverse DCT and inverse colour transform; cropped to width x height
// and clamped to [0, 1]. Samples are not rounded to 8 bits.
Image reconstruct(const CoeffBlocks& blocks, const QuantTables& q, int width, int height);

enum class HuffmanMode {
  kStandard,   // the reference tables of the baseline standard
  kOptimized,  // per-image code lengths from symbol statistics
};

struct EncodeResult {
  CoeffBlocks blocks;
  std::vector<std::uint8_t> bytes;
};

// Baseline sequential JFIF, 4:4:4, 8-bit tables:
// SOI, APP0, DQT (luma + chroma), SOF0, DHT, SOS, entropy-coded data, EOI.
EncodeResult encode(const Image& img, const QuantTables& q,
                    HuffmanMode mode = HuffmanMode::kOptimized);
std::vector<std::uint8_t> write_stream(const CoeffBlocks& blocks, const QuantTables& q, int width,
                                       int height, HuffmanMode mode = HuffmanMode::kOptimized);

struct DecodeResult {
  Image image;
  QuantTables tables;
  CoeffBlocks blocks;
};

// Decodes baseline streams (1 or 3 components, no subsampling). Throws
// kMalformedStream on anything else or on corrupt input.
DecodeResult decode_full(const std::vector<std::uint8_t>& bytes);
Image decode(const std::vector<std::uint8_t>& bytes);

// Bits per pixel of a stream relative to the pixel count of the original
// (high-resolution) image.
double bpp_real(std::size_t n_bytes, int hr_height, int hr_width);

struct RateFit {
  QuantTables tables;
  EncodeResult encoded;
  double bpp = 0.0;
  int evaluations = 0;
};

// Bisection on the continuous quality until |bpp - target| <= tol * target.
// `hr_height` x `hr_width` is the bpp denominator (the original resolution).
// Throws kTargetUnreachable if the target is outside the achievable range or
// the search does not converge.
RateFit fit_quant_tables(const Image& img, double target_bpp, int hr_height, int hr_width,
                         double tol = 0.05, HuffmanMode mode = HuffmanMode::kOptimized);

}  // namespace omnivr::codec
