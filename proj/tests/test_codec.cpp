#include <gtest/gtest.h>

#include <csetjmp>
#include <cmath>
#include <cstdio>

#include <jpeglib.h>

#include "omnivr/codec/differentiable.hpp"
#include "omnivr/codec/jpeg.hpp"
#include "omnivr/codec/rate.hpp"
#include "omnivr/error.hpp"
#include "omnivr/image_io.hpp"
#include "omnivr/metrics.hpp"
#include "omnivr/synthetic.hpp"

using namespace omnivr;
using namespace omnivr::codec;

namespace {

Image random_image(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  Image img(w, h);
  for (double& v : img.data()) v = rng.uniform();
  return quantize_8bit(img);
}

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
};

// Decodes with libjpeg (independent third-party decoder). Empty image on error.
Image libjpeg_decode(const std::vector<std::uint8_t>& bytes) {
  jpeg_decompress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = [](j_common_ptr c) { std::longjmp(reinterpret_cast<JpegErrorMgr*>(c->err)->jump, 1); };
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    return {};
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  cinfo.dct_method = JDCT_FLOAT;
  jpeg_start_decompress(&cinfo);
  Image img(static_cast<int>(cinfo.output_width), static_cast<int>(cinfo.output_height));
  std::vector<unsigned char> row(cinfo.output_width * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    const int y = static_cast<int>(cinfo.output_scanline);
    unsigned char* rp = row.data();
    jpeg_read_scanlines(&cinfo, &rp, 1);
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c) img.at(c, y, x) = row[x * 3 + c] / 255.0;
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return img;
}

}  // namespace

TEST(Codec, QualityScalingFollowsConvention) {
  const QuantTables q50 = standard_tables(50);
  EXPECT_EQ(q50.luma[0], 16);
  EXPECT_EQ(q50.chroma[0], 17);
  EXPECT_EQ(standard_tables(100).max_entry(), 1);
  EXPECT_EQ(standard_tables(1).max_entry(), 255);
  EXPECT_GT(standard_tables(30).luma[0], standard_tables(70).luma[0]);
}

TEST(Codec, DctIsOrthonormal) {
  std::array<double, 64> x{}, y{}, z{};
  for (int i = 0; i < 64; ++i) x[i] = std::cos(0.3 * i) * 100;
  fdct8x8(x.data(), y.data());
  idct8x8(y.data(), z.data());
  double ex = 0, ey = 0;
  for (int i = 0; i < 64; ++i) {
    EXPECT_NEAR(z[i], x[i], 1e-10);
    ex += x[i] * x[i];
    ey += y[i] * y[i];
  }
  EXPECT_NEAR(ex, ey, 1e-8 * ex);
}

TEST(Codec, StreamsDecodeInLibjpeg) {
  for (const auto mode : {HuffmanMode::kStandard, HuffmanMode::kOptimized}) {
    for (const double q : {10.0, 50.0, 90.0}) {
      const Image img = random_image(37, 21, static_cast<std::uint64_t>(q));
      const std::vector<std::uint8_t> bytes = encode(img, standard_tables(q), mode).bytes;
      const Image ours = decode(bytes);
      const Image ref = libjpeg_decode(bytes);
      ASSERT_FALSE(ref.empty()) << "libjpeg rejected the stream";
      ASSERT_TRUE(ref.same_shape(ours));
      // libjpeg rounds to 8 bits and uses its own IDCT; allow that much.
      EXPECT_GT(psnr(ours, ref), 40.0);
    }
  }
}

TEST(Codec, UnitTablesAreNearLossless) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const Image img = random_image(64, 48, seed);
    const auto bytes = encode(img, unit_tables()).bytes;
    EXPECT_GE(psnr(decode(bytes), img), 50.0);
    EXPECT_GE(psnr(libjpeg_decode(bytes), img), 40.0);
  }
}

TEST(Codec, DecoderRecoversTablesAndCoefficients) {
  const Image img = random_image(16, 16, 4);
  const QuantTables q = standard_tables(60);
  const EncodeResult e = encode(img, q);
  const DecodeResult d = decode_full(e.bytes);
  EXPECT_EQ(d.tables.luma, q.luma);
  EXPECT_EQ(d.tables.chroma, q.chroma);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(d.blocks.channels[c], e.blocks.channels[c]);
}

TEST(Codec, DecoderRejectsMalformedStreams) {
  const auto bytes = encode(random_image(16, 16, 5), standard_tables(50)).bytes;
  for (std::size_t cut : {std::size_t{0}, std::size_t{2}, std::size_t{20}, bytes.size() / 2}) {
    std::vector<std::uint8_t> t(bytes.begin(), bytes.begin() + static_cast<long>(cut));
    try {
      decode(t);
      FAIL() << "truncated at " << cut;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kMalformedStream);
    }
  }
}

TEST(Codec, OptimizedHuffmanIsNotLarger) {
  const Image img = synthetic_panorama(64, 128, 2);
  const QuantTables q = standard_tables(75);
  EXPECT_LE(encode(img, q, HuffmanMode::kOptimized).bytes.size(),
            encode(img, q, HuffmanMode::kStandard).bytes.size());
}

TEST(Codec, BppUsesHighResolutionDenominator) {
  EXPECT_DOUBLE_EQ(bpp_real(1000, 100, 80), 1.0);
}

TEST(Codec, FitQuantTablesHitsTarget) {
  const Image img = quantize_8bit(synthetic_panorama(128, 256, 3));
  const RateFit fit = fit_quant_tables(img, 0.3, 256, 512);
  EXPECT_NEAR(fit.bpp, 0.3, 0.015);
  EXPECT_NEAR(bpp_real(fit.encoded.bytes.size(), 256, 512), fit.bpp, 1e-12);
  try {
    fit_quant_tables(img, 1e-4, 256, 512);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTargetUnreachable);
  }
}

TEST(Rate, UniformModelGivesLogK) {
  CoeffBlocks b;
  b.blocks_w = 1;
  b.blocks_h = 1;
  for (auto& ch : b.channels) ch.assign(1, std::array<int, 64>{});
  const double bits = estimate_rate(b, CategoricalRateModel::uniform({-2, -1, 0, 1, 2, 3, 4, 5}));
  EXPECT_NEAR(bits, 3 * 64 * 3.0, 1e-9);
}

TEST(Rate, HistogramModelMatchesEmpiricalEntropy) {
  const EncodeResult e = encode(random_image(32, 32, 6), standard_tables(50));
  const CategoricalRateModel m = CategoricalRateModel::from_histogram(e.blocks);
  // Empirical entropy recomputed from counts.
  std::array<std::map<int, int>, 2> counts;
  std::array<int, 2> total{};
  for (int c = 0; c < 3; ++c)
    for (const auto& blk : e.blocks.channels[c])
      for (int v : blk) {
        ++counts[c == 0 ? 0 : 1][v];
        ++total[c == 0 ? 0 : 1];
      }
  double h = 0;
  for (int k = 0; k < 2; ++k)
    for (const auto& [v, n] : counts[k]) h -= n * std::log2(static_cast<double>(n) / total[k]);
  EXPECT_NEAR(estimate_rate(e.blocks, m), h, 1e-6 * h);
}

TEST(Rate, LaplaceBitsNormalizeAndDifferentiate) {
  for (double ls : {-1.0, 0.5, 3.0}) {
    double p = 0;
    for (int c = -kEscapeLimit; c <= kEscapeLimit; ++c) p += std::exp2(-laplace_bits(c, ls));
    p += std::exp2(-laplace_bits(kEscapeLimit + 10, ls)) * 2;
    EXPECT_NEAR(p, 1.0, 1e-6);
    for (double c : {0.2, 0.49, 0.51, 3.7, -12.0}) {
      double dc = 0, dls = 0;
      laplace_bits(c, ls, &dc, &dls);
      const double h = 1e-6;
      EXPECT_NEAR(dc, (laplace_bits(c + h, ls) - laplace_bits(c - h, ls)) / (2 * h), 1e-5 * (1 + std::abs(dc)));
      EXPECT_NEAR(dls, (laplace_bits(c, ls + h) - laplace_bits(c, ls - h)) / (2 * h), 1e-5 * (1 + std::abs(dls)));
    }
  }
}

TEST(Rate, FittedLaplaceTracksHuffmanBytes) {
  const Image img = quantize_8bit(synthetic_panorama(128, 256, 9));
  const EncodeResult e = encode(img, standard_tables(75));
  const LaplaceRateModel m = fit_laplace_model({&e.blocks});
  const double est = estimate_rate(e.blocks, m);
  EXPECT_NEAR(est / (8.0 * e.bytes.size()), 1.0, 0.15);
}

TEST(Differentiable, SimulationMatchesRealCodec) {
  const Image img = random_image(32, 16, 8);
  const QuantTables q = standard_tables(80);
  nn::Tensor t({3, 16, 32});
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 32; ++x) t[(c * 16 + y) * 32 + x] = img.at(c, y, x);
  const nn::Var ls = nn::constant(nn::Tensor({2, 64}, 1.0));
  const JpegSimulation sim = simulate_jpeg(nn::constant(t), q, ls, QuantMode::kSte);
  const Image real = reconstruct(forward_quantize(img, q), q, 32, 16);
  double m = 0;
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 32; ++x) {
        const double v = std::clamp(sim.recon.value()[(c * 16 + y) * 32 + x], 0.0, 1.0);
        m = std::max(m, std::abs(v - real.at(c, y, x)));
      }
  EXPECT_LT(m, 1e-9);
  EXPECT_GT(sim.bits.value().item(), 0.0);
}
