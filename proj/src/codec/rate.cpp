#include "omnivr/codec/rate.hpp"

#include <cmath>
#include <numbers>

#include "omnivr/error.hpp"

namespace omnivr::codec {

double laplace_bits(double c, double log_scale, double* d_c, double* d_log_scale) {
  const double g = std::exp(-log_scale);  // 1 / scale
  const double a = std::abs(c);
  double ln_p, dln_dc, dln_dls;
  if (a > kEscapeLimit + 0.5) {
    // Both tails beyond the escape limit, as one symbol.
    ln_p = -(kEscapeLimit + 0.5) * g;
    dln_dc = 0.0;
    dln_dls = (kEscapeLimit + 0.5) * g;
  } else if (a >= 0.5) {
    ln_p = -std::numbers::ln2 - (a - 0.5) * g + std::log(-std::expm1(-g));
    dln_dc = (c > 0 ? -g : g);
    dln_dls = (a - 0.5) * g - g / std::expm1(g);
  } else {
    const double e1 = std::exp(-(0.5 - c) * g);
    const double e2 = std::exp(-(0.5 + c) * g);
    const double p = -0.5 * (std::expm1(-(0.5 - c) * g) + std::expm1(-(0.5 + c) * g));
    ln_p = std::log(p);
    const double dp_dc = -0.5 * g * (e1 - e2);
    const double dp_dg = 0.5 * ((0.5 - c) * e1 + (0.5 + c) * e2);
    dln_dc = dp_dc / p;
    dln_dls = -g * dp_dg / p;
  }
  if (d_c) *d_c = -dln_dc / std::numbers::ln2;
  if (d_log_scale) *d_log_scale = -dln_dls / std::numbers::ln2;
  return -ln_p / std::numbers::ln2;
}

LaplaceRateModel LaplaceRateModel::constant(double scale) {
  LaplaceRateModel m;
  for (auto& cls : m.log_scale) cls.fill(std::log(scale));
  return m;
}

namespace {

template <typename Fn>
void for_each_coeff(const CoeffBlocks& blocks, Fn&& fn) {
  const auto& zz = zigzag_to_natural();
  for (int ch = 0; ch < 3; ++ch) {
    const int cls = ch == 0 ? 0 : 1;
    for (const auto& blk : blocks.channels[ch]) {
      for (int k = 0; k < 64; ++k) fn(cls, zz[k], blk[k]);
    }
  }
}

}  // namespace

double estimate_rate(const CoeffBlocks& blocks, const LaplaceRateModel& model) {
  double bits = 0.0;
  for_each_coeff(blocks, [&](int cls, int pos, int v) {
    bits += laplace_bits(v, model.log_scale[cls][pos]);
  });
  return bits;
}

LaplaceRateModel fit_laplace_model(const std::vector<const CoeffBlocks*>& data) {
  std::array<std::array<std::map<int, long long>, 64>, 2> hist;
  for (const auto* blocks : data) {
    for_each_coeff(*blocks, [&](int cls, int pos, int v) { ++hist[cls][pos][v]; });
  }
  LaplaceRateModel model;
  for (int cls = 0; cls < 2; ++cls) {
    for (int pos = 0; pos < 64; ++pos) {
      const auto& h = hist[cls][pos];
      auto cost = [&](double ls) {
        double s = 0.0;
        for (const auto& [v, n] : h) s += static_cast<double>(n) * laplace_bits(v, ls);
        return s;
      };
      // Negative log-likelihood is unimodal in the log scale.
      double lo = std::log(0.01), hi = std::log(4096.0);
      const double r = (std::sqrt(5.0) - 1.0) / 2.0;
      double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
      double f1 = cost(x1), f2 = cost(x2);
      for (int it = 0; it < 80; ++it) {
        if (f1 <= f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - r * (hi - lo);
          f1 = cost(x1);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + r * (hi - lo);
          f2 = cost(x2);
        }
      }
      model.log_scale[cls][pos] = h.empty() ? 0.0 : 0.5 * (lo + hi);
    }
  }
  return model;
}

CategoricalRateModel CategoricalRateModel::uniform(const std::vector<int>& values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "uniform model needs symbols");
  CategoricalRateModel m;
  for (auto& cls : m.prob) {
    for (int v : values) cls[v] = 1.0 / static_cast<double>(values.size());
  }
  return m;
}

CategoricalRateModel CategoricalRateModel::from_histogram(const CoeffBlocks& blocks) {
  std::array<std::map<int, long long>, 2> counts;
  std::array<long long, 2> total{};
  for_each_coeff(blocks, [&](int cls, int, int v) {
    ++counts[cls][v];
    ++total[cls];
  });
  CategoricalRateModel m;
  for (int cls = 0; cls < 2; ++cls) {
    for (const auto& [v, n] : counts[cls]) {
      m.prob[cls][v] = static_cast<double>(n) / static_cast<double>(total[cls]);
    }
  }
  return m;
}

double estimate_rate(const CoeffBlocks& blocks, const CategoricalRateModel& model) {
  double bits = 0.0;
  for_each_coeff(blocks, [&](int cls, int, int v) {
    auto it = model.prob[cls].find(v);
    const double p = it == model.prob[cls].end() ? model.escape[cls] : it->second;
    if (!(p > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "coefficient " + std::to_string(v) + " has zero probability");
    }
    bits -= std::log2(p);
  });
  return bits;
}

}  // namespace omnivr::codec
