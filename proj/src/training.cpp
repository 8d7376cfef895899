#include "omnivr/training.hpp"

#include <cmath>
#include <sstream>

#include "omnivr/error.hpp"
#include "omnivr/image_io.hpp"
#include "omnivr/nn/ops.hpp"
#include "omnivr/synthetic.hpp"

namespace omnivr {

using nn::Tensor;
using nn::Var;

Var loss_pix(const Var& pred, const Var& target) {
  if (pred.value().size() != target.value().size() || pred.value().ndim() != 2 ||
      pred.value().dim(1) != 3) {
    throw Error(ErrorCode::kLengthMismatch, "prediction and target sample counts differ");
  }
  const int n = pred.value().dim(0);
  return nn::scale(nn::sum_abs(nn::sub(pred, target)), 1.0 / n);
}

Var loss_guide(const Var& pred_lr, const Var& bicubic_lr, int p, int s) {
  const int q = p / s;
  const std::vector<int> want = {3, q, q};
  if (pred_lr.value().shape() != want || bicubic_lr.value().shape() != want) {
    throw Error(ErrorCode::kShapeMismatch, "guide loss expects [3, p/s, p/s] inputs");
  }
  return nn::scale(nn::sum_sq(nn::sub(pred_lr, bicubic_lr)), 1.0 / (static_cast<double>(q) * q));
}

Var loss_bpp(const Var& bits, int p) { return nn::scale(bits, 1.0 / (static_cast<double>(p) * p)); }

Var loss_total(const Var& pix, const Var& guide, const Var& bpp, const LossWeights& w) {
  return nn::add(nn::add(pix, nn::scale(guide, w.lambda1)), nn::scale(bpp, w.lambda2));
}

std::vector<Query> make_queries(const DisSampResult& dps, const ViewportSpec& view, int p,
                                int erp_height, int erp_width, ShapeKind kind) {
  const ViewportProjection proj(view);
  std::vector<Query> out;
  out.reserve(dps.samples.size());
  for (std::size_t i = 0; i < dps.samples.size(); ++i) {
    const ErpCoord local = from_patch_normalized(dps.samples.coords[i], p);
    out.push_back({local.x1, local.x2,
                   shape_descriptor(kind, proj, dps.samples.view_coords[i], erp_height, erp_width).flat()});
  }
  return out;
}

TrainItem prepare_item(const std::vector<Image>& data, const TrainConfig& cfg, Rng& rng) {
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "no training images");
  const ViewChoices choices = cfg.view_choices();
  for (int crop = 0;; ++crop) {
    const Image& erp = data[rng.below(data.size())];
    if (erp.height() < cfg.patch) throw Error(ErrorCode::kInvalidArgument, "image smaller than the patch");
    TrainItem item;
    item.patch = {static_cast<int>(rng.below(static_cast<std::uint64_t>(erp.width()))),
                  static_cast<int>(rng.below(static_cast<std::uint64_t>(erp.height() - cfg.patch + 1))),
                  cfg.patch, cfg.scale};
    for (int attempt = 0; attempt < 8; ++attempt) {
      item.view = pick_view_for_patch(item.patch, erp.height(), erp.width(), choices, rng);
      try {
        item.dps = dis_samp(erp, item.patch, item.view, static_cast<std::size_t>(cfg.samples), rng);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kEmptyOverlap) throw;
        continue;
      }
      item.queries = make_queries(item.dps, item.view, cfg.patch, erp.height(), erp.width(),
                                  cfg.shape_kind());
      return item;
    }
    if (crop > 100) throw Error(ErrorCode::kEmptyOverlap, "no overlapping view found");
  }
}

LossParts item_loss(const VrModel& model, const TrainItem& item, const codec::QuantTables& tables,
                    const LossWeights& w, codec::QuantMode mode, std::uint64_t noise_seed) {
  const int p = item.patch.p, s = item.patch.s;
  const Var lr_pre = model.downsample(item.dps.hr_patch, nn::PadMode::kZero);
  Rng noise(noise_seed);
  const auto sim = codec::simulate_jpeg(lr_pre, tables, model.params().get("rate.log_scale"), mode,
                                        mode == codec::QuantMode::kNoise ? &noise : nullptr);
  const Var z = model.encode(sim.recon, nn::PadMode::kZero);
  const Var pred = model.predict(sim.recon, z, item.queries, /*wrap_x=*/false);

  const auto& px = item.dps.samples.pixels;
  Tensor target({static_cast<int>(px.size()), 3});
  for (std::size_t i = 0; i < px.size(); ++i) {
    for (int c = 0; c < 3; ++c) target[i * 3 + c] = px[i][c];
  }
  LossParts out;
  out.pix = loss_pix(pred, nn::constant(std::move(target)));
  out.guide = loss_guide(lr_pre, nn::constant(image_to_tensor(item.dps.lr_patch)), p, s);
  out.bpp = loss_bpp(sim.bits, p);
  out.total = loss_total(out.pix, out.guide, out.bpp, w);
  return out;
}

ModelConfig model_config(const TrainConfig& cfg) {
  ModelConfig m;
  m.scale = cfg.scale;
  m.patch = cfg.patch;
  m.channels = cfg.channels;
  m.freqs = cfg.freqs;
  m.hidden = cfg.hidden;
  m.down_hidden = cfg.down_hidden;
  m.shape_kind = cfg.shape_kind();
  return m;
}

std::vector<Image> load_training_data(const TrainConfig& cfg) {
  std::vector<Image> data;
  if (cfg.data == "synthetic") {
    for (int i = 0; i < cfg.synthetic_count; ++i) {
      data.push_back(synthetic_panorama(cfg.erp_height, cfg.erp_width, derive_seed(cfg.seed, 0x64617461, i)));
    }
    return data;
  }
  std::stringstream ss(cfg.data);
  std::string path;
  while (std::getline(ss, path, ',')) {
    if (path.empty()) continue;
    Image img = read_image(path);
    if (img.width() % cfg.scale != 0 || img.height() % cfg.scale != 0 || img.height() < cfg.patch) {
      throw Error(ErrorCode::kInvalidArgument, "training image " + path + " does not fit scale/patch");
    }
    data.push_back(std::move(img));
  }
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "config key 'data': no images listed");
  return data;
}

Trainer::Trainer(TrainConfig cfg, std::vector<Image> data)
    : cfg_(std::move(cfg)),
      data_(std::move(data)),
      model_(model_config(cfg_), derive_seed(cfg_.seed, 0x6d6f64656c)),
      adam_(nn::AdamOptions{cfg_.lr, 0.9, 0.999, 1e-8}),
      tables_(codec::standard_tables(cfg_.train_quality)) {
  cfg_.validate();
}

TrainLogRow Trainer::step() {
  const LossWeights w{cfg_.lambda1, cfg_.lambda2};
  const auto mode = cfg_.quant == "noise" ? codec::QuantMode::kNoise : codec::QuantMode::kSte;
  model_.params().zero_grad();
  TrainLogRow row;
  row.iteration = iteration_ + 1;
  for (int b = 0; b < cfg_.batch; ++b) {
    Rng rng(derive_seed(cfg_.seed, static_cast<std::uint64_t>(iteration_), static_cast<std::uint64_t>(b)));
    const TrainItem item = prepare_item(data_, cfg_, rng);
    const LossParts parts = item_loss(model_, item, tables_, w, mode, rng.next());
    nn::backward(nn::scale(parts.total, 1.0 / cfg_.batch));
    row.loss += parts.total.value().item() / cfg_.batch;
    row.l_pix += parts.pix.value().item() / cfg_.batch;
    row.l_guide += parts.guide.value().item() / cfg_.batch;
    row.bpp += parts.bpp.value().item() / cfg_.batch;
  }
  adam_.set_lr(cfg_.lr_at(iteration_));
  adam_.step(model_.params());
  ++iteration_;
  log_.push_back(row);
  return row;
}

void Trainer::run(int iterations, const std::function<void(const TrainLogRow&)>& on_row) {
  while (iteration_ < iterations) {
    const TrainLogRow row = step();
    if (on_row) on_row(row);
  }
}

nn::Checkpoint Trainer::checkpoint() const {
  auto meta = cfg_.to_map();
  meta["iteration"] = std::to_string(iteration_);
  std::map<std::string, std::string> prefixed;
  for (auto& [k, v] : meta) prefixed[k == "iteration" ? k : "config." + k] = v;
  return nn::make_checkpoint(model_.params(), &adam_, prefixed);
}

void Trainer::restore(const nn::Checkpoint& ckpt) {
  nn::restore_checkpoint(ckpt, model_.params(), &adam_);
  auto it = ckpt.meta.find("iteration");
  iteration_ = it == ckpt.meta.end() ? 0 : std::stoi(it->second);
}

namespace {

const char* kModelKeys[] = {"scale", "patch", "channels", "freqs", "hidden", "down_hidden", "shape"};

}  // namespace

void save_model(const std::string& path, const VrModel& model,
                const std::map<std::string, std::string>& extra_meta) {
  const ModelConfig& m = model.config();
  std::map<std::string, std::string> meta = extra_meta;
  meta["config.scale"] = std::to_string(m.scale);
  meta["config.patch"] = std::to_string(m.patch);
  meta["config.channels"] = std::to_string(m.channels);
  meta["config.freqs"] = std::to_string(m.freqs);
  meta["config.hidden"] = std::to_string(m.hidden);
  meta["config.down_hidden"] = std::to_string(m.down_hidden);
  meta["config.shape"] = m.shape_kind == ShapeKind::kPlanar ? "planar" : "spherical";
  nn::write_checkpoint(path, nn::make_checkpoint(model.params(), nullptr, meta));
}

VrModel load_model(const std::string& path) {
  const nn::Checkpoint ckpt = nn::read_checkpoint(path);
  TrainConfig cfg;
  for (const char* key : kModelKeys) {
    auto it = ckpt.meta.find(std::string("config.") + key);
    if (it == ckpt.meta.end()) throw Error(ErrorCode::kIo, path + " lacks model metadata '" + key + "'");
    cfg.set(key, it->second);
  }
  VrModel model(model_config(cfg), 0);
  nn::restore_checkpoint(ckpt, model.params(), nullptr);
  return model;
}

std::string log_csv_header() { return "iteration,loss,l_pix,l_guide,bpp_estimate"; }

std::string log_csv_row(const TrainLogRow& r) {
  std::ostringstream os;
  os.precision(10);
  os << r.iteration << "," << r.loss << "," << r.l_pix << "," << r.l_guide << "," << r.bpp;
  return os.str();
}

}  // namespace omnivr
