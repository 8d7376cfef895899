#pragma once

#include <array>
#include <map>
#include <vector>

#include "omnivr/codec/jpeg.hpp"

namespace omnivr::codec {

// Coefficients beyond this magnitude fall into a single escape bucket.
inline constexpr int kEscapeLimit = 1023;

// Negative log2-probability of a discretized zero-mean Laplace with scale
// exp(log_scale), P(c) = F(c + 1/2) - F(c - 1/2). Defined for real c so it can
// be differentiated; optional outputs are d(bits)/dc and d(bits)/d(log_scale).
double laplace_bits(double c, double log_scale, double* d_c = nullptr,
                    double* d_log_scale = nullptr);

// Factorized model: one Laplace per (class, coefficient position), class 0 for
// luma and 1 for both chroma channels; positions in natural order.
struct LaplaceRateModel {
  std::array<std::array<double, 64>, 2> log_scale{};

  static LaplaceRateModel constant(double scale);
};

double estimate_rate(const CoeffBlocks& blocks, const LaplaceRateModel& model);

// Maximum-likelihood scales per position (golden-section search on log scale)
// over the coefficients of all given images.
LaplaceRateModel fit_laplace_model(const std::vector<const CoeffBlocks*>& data);

// Explicit probability table per class over integer values, with an escape
// probability for values absent from the table.
struct CategoricalRateModel {
  std::array<std::map<int, double>, 2> prob;
  std::array<double, 2> escape{};

  // Uniform over the given values for both classes, no escape mass.
  static CategoricalRateModel uniform(const std::vector<int>& values);
  // Empirical frequencies of the given coefficients.
  static CategoricalRateModel from_histogram(const CoeffBlocks& blocks);
};

// Throws kInvalidArgument if a coefficient has zero probability.
double estimate_rate(const CoeffBlocks& blocks, const CategoricalRateModel& model);

}  // namespace omnivr::codec
