#include "omnivr/vr.hpp"

#include <algorithm>
#include <cmath>

#include "omnivr/error.hpp"
#include "omnivr/random.hpp"
#include "omnivr/resample.hpp"

namespace omnivr {

using nn::Tensor;
using nn::Var;

void ModelConfig::validate() const {
  if (scale < 1 || patch < 1 || patch % scale != 0 || channels < 1 || freqs < 1 || hidden < 1 ||
      down_hidden < 1) {
    throw Error(ErrorCode::kInvalidArgument, "invalid model configuration");
  }
}

namespace {

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
Tensor init_uniform(std::vector<int> shape, int fan_in, Rng& rng) {
  Tensor t(std::move(shape));
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (double& v : t.values()) v = rng.uniform(-bound, bound);
  return t;
}

void add_conv(nn::ParamStore& ps, const std::string& name, int out, int in, int k, Rng& rng,
              bool zero = false) {
  const int fan_in = in * k * k;
  ps.add(name + ".w", zero ? Tensor({out, in, k, k}) : init_uniform({out, in, k, k}, fan_in, rng));
  ps.add(name + ".b", zero ? Tensor({out}) : init_uniform({out}, fan_in, rng));
}

void add_linear(nn::ParamStore& ps, const std::string& name, int out, int in, Rng& rng) {
  ps.add(name + ".w", init_uniform({out, in}, in, rng));
  ps.add(name + ".b", init_uniform({out}, in, rng));
}

double wrap_offset(double d, double period) { return d - period * std::round(d / period); }

}  // namespace

LocalEnsemble local_ensemble(double x, double y, int lr_w, int lr_h, int scale, int patch,
                             bool wrap_x) {
  const double xl = (x + 0.5) / scale - 0.5;
  const double yl = (y + 0.5) / scale - 0.5;
  const BilinearTaps t = bilinear_taps(xl, yl, lr_w, lr_h, wrap_x);
  LocalEnsemble e;
  const double unit = 2.0 / patch;
  const double hr_w = static_cast<double>(lr_w) * scale;
  for (int k = 0; k < 4; ++k) {
    e.index[k] = t.index[k];
    e.weight[k] = t.weight[k];
    const double cx = scale * t.col[k] + (scale - 1) / 2.0;
    const double cy = scale * t.row[k] + (scale - 1) / 2.0;
    const double dx = wrap_x ? wrap_offset(x - cx, hr_w) : x - cx;
    e.delta[k] = {dx * unit, (y - cy) * unit};
  }
  return e;
}

VrModel::VrModel(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(seed);
  const int c = cfg.channels, f = cfg.freqs, d = cfg.down_hidden, s = cfg.scale;
  add_conv(params_, "down.conv1", d, 3, 3, rng);
  add_conv(params_, "down.conv2", d, d, s, rng);
  add_conv(params_, "down.conv3", 3, d, 3, rng, /*zero=*/true);
  add_conv(params_, "enc.conv_in", c, 3, 3, rng);
  add_conv(params_, "enc.res1", c, c, 3, rng);
  add_conv(params_, "enc.res2", c, c, 3, rng);
  add_conv(params_, "enc.conv_out", c, c, 3, rng);
  add_linear(params_, "h_a", 2 * f, c, rng);
  add_linear(params_, "h_f", 2 * f, c, rng);
  add_linear(params_, "h_p", f, kShapeDim, rng);
  add_linear(params_, "dec.fc1", cfg.hidden, 2 * f, rng);
  add_linear(params_, "dec.fc2", 3, cfg.hidden, rng);
  // Entropy model of the quantized coefficients: log Laplace scale per
  // (luma/chroma, DCT position).
  params_.add("rate.log_scale", Tensor({2, 64}, std::log(2.0)));
}

void VrModel::zero_decoder() {
  params_.get("dec.fc2.w").mutable_value().fill(0.0);
  params_.get("dec.fc2.b").mutable_value().fill(0.0);
}

Var VrModel::downsample(const Image& hr, nn::PadMode pad) const {
  const int s = cfg_.scale;
  const Image skip = bicubic_downscale(hr, s, pad == nn::PadMode::kWrapX ? EdgeMode::kWrapX
                                                                          : EdgeMode::kClamp);
  const Var x = nn::constant(image_to_tensor(hr));
  const nn::ConvOptions same{1, 1, pad};
  const nn::ConvOptions strided{s, 0, pad};
  Var h = nn::gelu(nn::conv2d(x, p("down.conv1.w"), p("down.conv1.b"), same));
  h = nn::gelu(nn::conv2d(h, p("down.conv2.w"), p("down.conv2.b"), strided));
  h = nn::conv2d(h, p("down.conv3.w"), p("down.conv3.b"), same);
  return nn::add(nn::constant(image_to_tensor(skip)), h);
}

Var VrModel::encode(const Var& lr, nn::PadMode pad) const {
  const nn::ConvOptions same{1, 1, pad};
  Var h = nn::relu(nn::conv2d(lr, p("enc.conv_in.w"), p("enc.conv_in.b"), same));
  Var r = nn::relu(nn::conv2d(h, p("enc.res1.w"), p("enc.res1.b"), same));
  r = nn::conv2d(r, p("enc.res2.w"), p("enc.res2.b"), same);
  h = nn::add(h, r);
  return nn::conv2d(h, p("enc.conv_out.w"), p("enc.conv_out.b"), same);
}

Var VrModel::predict(const Var& lr, const Var& z, const std::vector<Query>& queries,
                     bool wrap_x) const {
  if (queries.empty()) throw Error(ErrorCode::kInvalidArgument, "predict needs queries");
  const int h = lr.value().dim(1), w = lr.value().dim(2);
  if (z.value().dim(1) != h || z.value().dim(2) != w) {
    throw Error(ErrorCode::kShapeMismatch, "latent grid must match the LR image");
  }
  const int m = static_cast<int>(queries.size());
  std::vector<int> cells(4 * static_cast<std::size_t>(m));
  std::vector<int> owner(4 * static_cast<std::size_t>(m));
  std::vector<double> weights(4 * static_cast<std::size_t>(m));
  Tensor delta({4 * m, 2});
  Tensor shapes({m, kShapeDim});
  for (int i = 0; i < m; ++i) {
    const Query& q = queries[i];
    const LocalEnsemble e =
        local_ensemble(q.x, q.y, w, h, cfg_.scale, cfg_.patch, wrap_x);
    for (int k = 0; k < 4; ++k) {
      const std::size_t r = 4 * static_cast<std::size_t>(i) + k;
      cells[r] = e.index[k];
      owner[r] = i;
      weights[r] = e.weight[k];
      delta[2 * r] = e.delta[k][0];
      delta[2 * r + 1] = e.delta[k][1];
    }
    std::copy(q.shape.begin(), q.shape.end(), shapes.data() + static_cast<std::size_t>(i) * kShapeDim);
  }
  // F_B: bilinear interpolation of the LR image.
  const Var skip = nn::group_weighted_sum(nn::gather_rows(nn::chw_to_rows(lr), cells), weights, 4);

  const Var zj = nn::gather_rows(nn::chw_to_rows(z), cells);
  const Var amp = nn::linear(zj, p("h_a.w"), p("h_a.b"));
  const Var freq = nn::linear(zj, p("h_f.w"), p("h_f.b"));
  const Var phase = nn::gather_rows(nn::linear(nn::constant(std::move(shapes)), p("h_p.w"), p("h_p.b")), owner);
  const Var feat = nn::fourier_features(amp, freq, phase, delta);
  const Var hid = nn::relu(nn::linear(feat, p("dec.fc1.w"), p("dec.fc1.b")));
  const Var rgb = nn::linear(hid, p("dec.fc2.w"), p("dec.fc2.b"));
  return nn::add(skip, nn::group_weighted_sum(rgb, weights, 4));
}

Image render_viewport(const VrModel& model, const Image& lr_erp, const ViewportSpec& spec,
                      const RenderOptions& opts) {
  spec.validate();
  const int s = model.config().scale;
  const int hr_h = lr_erp.height() * s, hr_w = lr_erp.width() * s;
  const Var lr = nn::constant(image_to_tensor(lr_erp));
  const Var z = model.encode(lr, nn::PadMode::kWrapX);
  const ViewportProjection proj(spec);
  Image out(spec.width, spec.height);
  const int total = spec.width * spec.height;
  const int chunk = std::max(1, opts.chunk);
  std::vector<Query> queries;
  for (int start = 0; start < total; start += chunk) {
    const int end = std::min(total, start + chunk);
    queries.clear();
    for (int i = start; i < end; ++i) {
      const ViewportCoord y{static_cast<double>(i % spec.width), static_cast<double>(i / spec.width)};
      const ErpCoord x = proj.inverse_map(y, hr_h, hr_w);
      Query q{x.x1, x.x2, shape_descriptor(model.config().shape_kind, proj, y, hr_h, hr_w).flat()};
      queries.push_back(q);
    }
    const Var pred = model.predict(lr, z, queries, /*wrap_x=*/true);
    for (int i = start; i < end; ++i) {
      for (int c = 0; c < 3; ++c) {
        double v = pred.value()[static_cast<std::size_t>(i - start) * 3 + c];
        if (opts.clamp) v = std::clamp(v, 0.0, 1.0);
        out.at(c, i / spec.width, i % spec.width) = v;
      }
    }
  }
  return out;
}

Image downsample_erp(const VrModel& model, const Image& hr_erp) {
  return tensor_to_image(model.downsample(hr_erp, nn::PadMode::kWrapX).value(), true);
}

Tensor image_to_tensor(const Image& img) {
  return Tensor({3, img.height(), img.width()}, img.data());
}

Image tensor_to_image(const Tensor& t, bool clamp) {
  if (t.ndim() != 3 || t.dim(0) != 3) throw Error(ErrorCode::kShapeMismatch, "expected [3, H, W]");
  Image img(t.dim(2), t.dim(1));
  for (std::size_t i = 0; i < t.size(); ++i) {
    img.data()[i] = clamp ? std::clamp(t[i], 0.0, 1.0) : t[i];
  }
  return img;
}

}  // namespace omnivr
