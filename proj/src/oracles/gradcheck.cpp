#include <algorithm>
#include <cmath>

#include "omnivr/codec/differentiable.hpp"
#include "omnivr/codec/jpeg.hpp"
#include "omnivr/config.hpp"
#include "omnivr/nn/ops.hpp"
#include "omnivr/oracles/oracles.hpp"
#include "omnivr/random.hpp"
#include "omnivr/synthetic.hpp"
#include "omnivr/training.hpp"

namespace omnivr::oracle {

using nn::Tensor;
using nn::Var;

GradCheckResult gradcheck(const std::function<Var()>& loss_fn,
                          const std::vector<std::pair<std::string, Var>>& inputs, double eps,
                          double floor_fraction, std::size_t max_entries_per_input) {
  for (const auto& [name, v] : inputs) {
    Var h = v;
    h.grad_buffer().fill(0.0);
  }
  nn::backward(loss_fn());
  GradCheckResult res;
  for (const auto& [name, v] : inputs) {
    Var h = v;
    const Tensor analytic = h.grad();
    Tensor& val = h.mutable_value();
    const std::size_t n = val.size();
    const std::size_t stride =
        max_entries_per_input == 0 || n <= max_entries_per_input ? 1 : n / max_entries_per_input;
    std::vector<std::pair<std::size_t, double>> numeric;
    double max_f = 0.0;
    for (std::size_t i = 0; i < n; i += stride) {
      const double orig = val[i];
      val[i] = orig + eps;
      const double fp = loss_fn().value().item();
      val[i] = orig - eps;
      const double fm = loss_fn().value().item();
      val[i] = orig;
      const double f = (fp - fm) / (2 * eps);
      numeric.emplace_back(i, f);
      max_f = std::max(max_f, std::abs(f));
    }
    const double floor = floor_fraction * max_f + 1e-12;
    for (const auto& [i, f] : numeric) {
      const double a = analytic.empty() ? 0.0 : analytic[i];
      const double err = std::abs(a - f) / std::max({std::abs(a), std::abs(f), floor});
      ++res.checked;
      if (res.worst.empty() || err > res.max_rel_error) {
        res.max_rel_error = err;
        res.worst = name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return res;
}

namespace {

Tensor random_tensor(std::vector<int> shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (double& x : t.values()) x = rng.uniform(lo, hi);
  return t;
}

// Entries bounded away from zero so kinked primitives are probed on smooth pieces.
Tensor away_from_zero(std::vector<int> shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (double& x : t.values()) x = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.1, 1.0);
  return t;
}

}  // namespace

std::vector<NamedGradCheck> primitive_gradchecks(std::uint64_t seed) {
  std::vector<NamedGradCheck> out;
  Rng rng(seed);
  auto run = [&](const std::string& name, std::vector<std::pair<std::string, Var>> in,
                 const std::function<Var(const std::vector<Var>&)>& op) {
    std::vector<Var> vars;
    for (auto& p : in) vars.push_back(p.second);
    // Scalar probe <op(inputs), r> with a fixed random r, so every output entry
    // contributes a distinct weight.
    const Tensor r = random_tensor(op(vars).shape(), rng);
    auto fn = [&]() { return nn::sum(nn::mul(op(vars), nn::constant(r))); };
    out.push_back({name, gradcheck(fn, in)});
  };
  auto leaf = [](Tensor t) { return nn::leaf(std::move(t), true); };

  run("add", {{"a", leaf(random_tensor({3, 4}, rng))}, {"b", leaf(random_tensor({3, 4}, rng))}},
      [](const std::vector<Var>& v) { return nn::add(v[0], v[1]); });
  run("sub", {{"a", leaf(random_tensor({3, 4}, rng))}, {"b", leaf(random_tensor({3, 4}, rng))}},
      [](const std::vector<Var>& v) { return nn::sub(v[0], v[1]); });
  run("mul", {{"a", leaf(random_tensor({3, 4}, rng))}, {"b", leaf(random_tensor({3, 4}, rng))}},
      [](const std::vector<Var>& v) { return nn::mul(v[0], v[1]); });
  run("scale", {{"a", leaf(random_tensor({5}, rng))}},
      [](const std::vector<Var>& v) { return nn::scale(v[0], -1.7); });
  run("relu", {{"x", leaf(away_from_zero({4, 5}, rng))}},
      [](const std::vector<Var>& v) { return nn::relu(v[0]); });
  run("gelu", {{"x", leaf(random_tensor({4, 5}, rng, -3, 3))}},
      [](const std::vector<Var>& v) { return nn::gelu(v[0]); });
  run("linear",
      {{"x", leaf(random_tensor({5, 4}, rng))}, {"w", leaf(random_tensor({3, 4}, rng))},
       {"b", leaf(random_tensor({3}, rng))}},
      [](const std::vector<Var>& v) { return nn::linear(v[0], v[1], v[2]); });
  for (const auto pad : {nn::PadMode::kZero, nn::PadMode::kWrapX}) {
    for (const int stride : {1, 2}) {
      const nn::ConvOptions opt{stride, stride == 1 ? 1 : 0, pad};
      run(std::string("conv2d/") + (pad == nn::PadMode::kZero ? "zero" : "wrap") + "/stride" +
              std::to_string(stride),
          {{"x", leaf(random_tensor({2, 6, 6}, rng))},
           {"w", leaf(random_tensor({3, 2, stride == 1 ? 3 : 2, stride == 1 ? 3 : 2}, rng))},
           {"b", leaf(random_tensor({3}, rng))}},
          [opt](const std::vector<Var>& v) { return nn::conv2d(v[0], v[1], v[2], opt); });
    }
  }
  run("chw_to_rows", {{"x", leaf(random_tensor({3, 2, 4}, rng))}},
      [](const std::vector<Var>& v) { return nn::chw_to_rows(v[0]); });
  run("gather_rows", {{"x", leaf(random_tensor({5, 3}, rng))}},
      [](const std::vector<Var>& v) { return nn::gather_rows(v[0], {4, 0, 0, 2, 4, 1}); });
  run("group_weighted_sum", {{"x", leaf(random_tensor({8, 3}, rng))}},
      [](const std::vector<Var>& v) {
        return nn::group_weighted_sum(v[0], {0.1, 0.2, 0.3, 0.4, 0.7, 0.1, 0.15, 0.05}, 4);
      });
  {
    const Tensor delta = random_tensor({4, 2}, rng);
    run("fourier_features",
        {{"amp", leaf(random_tensor({4, 6}, rng))}, {"freq", leaf(random_tensor({4, 6}, rng, -2, 2))},
         {"phase", leaf(random_tensor({4, 3}, rng))}},
        [delta](const std::vector<Var>& v) { return nn::fourier_features(v[0], v[1], v[2], delta); });
  }
  run("sum", {{"x", leaf(random_tensor({3, 3}, rng))}},
      [](const std::vector<Var>& v) { return nn::sum(v[0]); });
  run("sum_abs", {{"x", leaf(away_from_zero({3, 3}, rng))}},
      [](const std::vector<Var>& v) { return nn::sum_abs(v[0]); });
  run("sum_sq", {{"x", leaf(random_tensor({3, 3}, rng))}},
      [](const std::vector<Var>& v) { return nn::sum_sq(v[0]); });
  run("channel_affine", {{"x", leaf(random_tensor({3, 2, 3}, rng))}}, [](const std::vector<Var>& v) {
    return nn::channel_affine(v[0], {{{0.3, 0.5, 0.1}, {-0.2, 0.4, 0.9}, {1.1, -0.3, 0.2}}}, {0.1, 0.0, -2.0});
  });
  for (const bool inverse : {false, true}) {
    run(inverse ? "block_dct/inverse" : "block_dct/forward", {{"x", leaf(random_tensor({3, 8, 16}, rng))}},
        [inverse](const std::vector<Var>& v) { return nn::block_dct(v[0], inverse); });
  }
  {
    std::vector<std::array<double, 64>> table(3);
    for (auto& t : table)
      for (double& e : t) e = rng.uniform(0.1, 3.0);
    run("block_scale", {{"x", leaf(random_tensor({3, 8, 8}, rng))}},
        [table](const std::vector<Var>& v) { return nn::block_scale(v[0], table); });
  }
  {
    // Coefficients spread over the small-|c| branch, the main branch and the escape bucket.
    Tensor c({3, 8, 8});
    for (double& x : c.values()) {
      const double u = rng.uniform();
      x = u < 0.3 ? rng.uniform(-0.45, 0.45) : u < 0.95 ? rng.uniform(-40, 40) : rng.uniform(1030, 1200);
    }
    run("laplace_rate",
        {{"coeffs", leaf(c)}, {"log_scale", leaf(random_tensor({2, 64}, rng, -1.0, 3.0))}},
        [](const std::vector<Var>& v) { return codec::laplace_rate(v[0], v[1]); });
  }
  run("quantize/noise", {{"x", leaf(random_tensor({3, 4}, rng, -5, 5))}}, [](const std::vector<Var>& v) {
    Rng noise(99);
    return codec::quantize(v[0], codec::QuantMode::kNoise, &noise);
  });
  return out;
}

EndToEndGradCheck end_to_end_gradcheck(std::uint64_t seed, std::size_t max_entries_per_input) {
  TrainConfig cfg;
  cfg.scale = 2;
  cfg.patch = 16;
  cfg.samples = 64;
  cfg.resolutions = {32, 48};
  cfg.channels = 4;
  cfg.freqs = 4;
  cfg.hidden = 8;
  cfg.down_hidden = 4;
  cfg.erp_height = 32;
  cfg.erp_width = 64;
  cfg.quant = "noise";
  cfg.seed = seed;
  cfg.validate();
  const std::vector<Image> data = {synthetic_panorama(cfg.erp_height, cfg.erp_width, seed)};
  VrModel model(model_config(cfg), derive_seed(seed, 1));
  // The residual head starts at zero; give it a value so gradients reach the earlier layers.
  Rng init(derive_seed(seed, 2));
  for (const char* name : {"down.conv3.w", "down.conv3.b"}) {
    for (double& x : model.params().get(name).mutable_value().values()) x = init.uniform(-0.2, 0.2);
  }
  Rng rng(derive_seed(seed, 3));
  const TrainItem item = prepare_item(data, cfg, rng);
  const std::uint64_t noise_seed = rng.next();
  const auto tables = codec::standard_tables(cfg.train_quality);
  const LossWeights w{cfg.lambda1, cfg.lambda2};
  auto fn = [&]() { return item_loss(model, item, tables, w, codec::QuantMode::kNoise, noise_seed).total; };

  EndToEndGradCheck res;
  res.result = gradcheck(fn, model.params().items(), 1e-5, 1e-6, max_entries_per_input);
  for (const auto& [name, v] : model.params().items()) {
    if (name.rfind("down.", 0) != 0) continue;
    for (const double g : v.grad().values()) res.downsampler_grad_norm += std::abs(g);
  }
  return res;
}

}  // namespace omnivr::oracle
