#include <gtest/gtest.h>

#include <cmath>

#include "omnivr/error.hpp"
#include "omnivr/metrics.hpp"
#include "omnivr/random.hpp"

using namespace omnivr;

namespace {

Image random_image(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  Image img(w, h);
  for (double& v : img.data()) v = rng.uniform(0.1, 0.9);
  return img;
}

Image offset(const Image& a, double d) {
  Image b = a;
  for (double& v : b.data()) v += d;
  return b;
}

}  // namespace

TEST(Metrics, PsnrOfOneLevelError) {
  const Image a = random_image(32, 16, 1);
  EXPECT_NEAR(psnr(a, offset(a, 1.0 / 255)), 20 * std::log10(255.0), 1e-9);
  EXPECT_NEAR(20 * std::log10(255.0), 48.13, 0.01);
  EXPECT_EQ(psnr(a, a), kPsnrCap);
}

TEST(Metrics, PsnrMatchesLoop) {
  const Image a = random_image(9, 7, 2), b = random_image(9, 7, 3);
  double se = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i) se += std::pow(a.data()[i] - b.data()[i], 2);
  EXPECT_NEAR(psnr(a, b), 10 * std::log10(1.0 / (se / a.data().size())), 1e-9);
  EXPECT_NEAR(psnr(a, b), psnr(b, a), 1e-12);
}

TEST(Metrics, SsimIdentityAndAnticorrelation) {
  const Image a = random_image(40, 30, 4);
  EXPECT_NEAR(ssim(a, a), 1.0, 1e-12);
  Image bin(16, 16), inv(16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      for (int c = 0; c < 3; ++c) {
        bin.at(c, y, x) = (x + y) % 2;
        inv.at(c, y, x) = 1 - bin.at(c, y, x);
      }
  EXPECT_LE(ssim(bin, inv), 0.0);
  EXPECT_LT(ssim(a, offset(a, 0.1)), 1.0);
}

TEST(Metrics, WsPsnrEqualsPsnrUnderUniformError) {
  const Image a = random_image(64, 32, 5);
  const Image b = offset(a, 0.013);
  EXPECT_NEAR(ws_psnr(a, b), psnr(a, b), 1e-9);
}

TEST(Metrics, WsPsnrDownweightsPoles) {
  const Image a = random_image(64, 32, 6);
  Image polar = a, equator = a;
  for (int x = 0; x < 64; ++x)
    for (int c = 0; c < 3; ++c) {
      polar.at(c, 0, x) += 0.2;
      equator.at(c, 16, x) += 0.2;
    }
  EXPECT_GT(ws_psnr(a, polar), ws_psnr(a, equator));
  EXPECT_NEAR(psnr(a, polar), psnr(a, equator), 1e-9);
}

TEST(Metrics, SuiteAndShapeChecks) {
  const Image a = random_image(16, 8, 7);
  const MetricReport v = metric_suite(a, offset(a, 0.01), ImageKind::kViewport);
  EXPECT_TRUE(std::isnan(v.ws_psnr));
  const MetricReport e = metric_suite(a, offset(a, 0.01), ImageKind::kErp);
  EXPECT_NEAR(e.ws_psnr, e.psnr, 1e-9);
  EXPECT_THROW(psnr(a, Image(8, 8)), Error);
}
