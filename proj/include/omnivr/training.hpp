#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "omnivr/codec/differentiable.hpp"
#include "omnivr/config.hpp"
#include "omnivr/nn/checkpoint.hpp"
#include "omnivr/nn/optim.hpp"
#include "omnivr/sampling.hpp"
#include "omnivr/vr.hpp"

namespace omnivr {

struct LossWeights {
  double lambda1 = 0.6;
  double lambda2 = 0.01;
};

// ||pred - target||_1 / N over [N, 3] rows. Throws kLengthMismatch.
nn::Var loss_pix(const nn::Var& pred, const nn::Var& target);
// Squared error sum over [3, p/s, p/s] divided by (p/s)^2. Throws kShapeMismatch.
nn::Var loss_guide(const nn::Var& pred_lr, const nn::Var& bicubic_lr, int p, int s);
// Estimated bits divided by the HR patch pixel count p^2.
nn::Var loss_bpp(const nn::Var& bits, int p);
nn::Var loss_total(const nn::Var& pix, const nn::Var& guide, const nn::Var& bpp, const LossWeights& w);

// Everything one training item needs, prepared outside the differentiable graph.
struct TrainItem {
  PatchSpec patch;
  ViewportSpec view;
  DisSampResult dps;
  std::vector<Query> queries;  // sample coordinates in patch pixels plus shape descriptors
};

// Crops a random patch, chooses a viewport for it and runs discrete pixel
// sampling. On an empty overlap the view is redrawn up to 8 times, then the
// patch is re-cropped.
TrainItem prepare_item(const std::vector<Image>& data, const TrainConfig& cfg, Rng& rng);
// Shape descriptors of the samples under the given kind (HR frame of `erp_*`).
std::vector<Query> make_queries(const DisSampResult& dps, const ViewportSpec& view, int p,
                                int erp_height, int erp_width, ShapeKind kind);

struct LossParts {
  nn::Var total, pix, guide, bpp;
};

// downsample -> simulated JPEG -> encode -> predict -> weighted loss.
LossParts item_loss(const VrModel& model, const TrainItem& item, const codec::QuantTables& tables,
                    const LossWeights& w, codec::QuantMode mode, std::uint64_t noise_seed);

ModelConfig model_config(const TrainConfig& cfg);
std::vector<Image> load_training_data(const TrainConfig& cfg);

struct TrainLogRow {
  int iteration = 0;
  double loss = 0, l_pix = 0, l_guide = 0, bpp = 0;
};

class Trainer {
 public:
  Trainer(TrainConfig cfg, std::vector<Image> data);

  // One optimizer step over a batch of items.
  TrainLogRow step();
  // Runs until `iterations` total steps; the callback sees every logged row.
  void run(int iterations, const std::function<void(const TrainLogRow&)>& on_row = {});

  int iteration() const noexcept { return iteration_; }
  VrModel& model() noexcept { return model_; }
  const VrModel& model() const noexcept { return model_; }
  const TrainConfig& config() const noexcept { return cfg_; }
  const std::vector<TrainLogRow>& log() const noexcept { return log_; }

  nn::Checkpoint checkpoint() const;
  // Restores parameters, optimizer moments and the iteration counter.
  void restore(const nn::Checkpoint& ckpt);

 private:
  TrainConfig cfg_;
  std::vector<Image> data_;
  VrModel model_;
  nn::Adam adam_;
  codec::QuantTables tables_;
  int iteration_ = 0;
  std::vector<TrainLogRow> log_;
};

// Model saved with its configuration in the checkpoint metadata.
void save_model(const std::string& path, const VrModel& model,
                const std::map<std::string, std::string>& extra_meta = {});
VrModel load_model(const std::string& path);

std::string log_csv_header();
std::string log_csv_row(const TrainLogRow& r);

}  // namespace omnivr
