#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "omnivr/sampling.hpp"
#include "omnivr/ssr.hpp"

namespace omnivr {

// Training and evaluation settings. Serialized as flat `key = value` lines;
// lists are comma separated. Keys are the field names below.
struct TrainConfig {
  // patch / sampling
  int scale = 2;
  int patch = 64;
  int samples = 1024;
  std::vector<double> fovs = {80, 90, 100, 110, 120};
  std::vector<int> resolutions = {128, 144, 160, 192, 208, 240, 256};
  bool independent_fov = true;

  // optimization
  int batch = 8;
  int iterations = 500;
  double lr = 3e-3;
  // constant | cosine (lr * (1 + cos(pi * t / iterations)) / 2, t the completed steps)
  std::string lr_schedule = "constant";
  double lambda1 = 0.6;
  double lambda2 = 0.01;
  std::uint64_t seed = 1;

  // model
  int channels = 16;
  int freqs = 32;
  int hidden = 64;
  int down_hidden = 16;
  std::string shape = "spherical";  // spherical | planar

  // codec during training
  double train_quality = 75.0;
  std::string quant = "ste";  // ste | noise

  // data: "synthetic" or a comma-separated list of image paths
  std::string data = "synthetic";
  int synthetic_count = 2;
  int erp_height = 256;
  int erp_width = 512;

  // outputs
  std::string log;
  std::string checkpoint;
  int checkpoint_every = 0;

  // evaluation
  double eval_fov = 90.0;
  int eval_width = 128;
  int eval_height = 128;
  double eval_quality = 75.0;

  static TrainConfig desk() { return {}; }
  static TrainConfig paper_scale();

  // Throws kInvalidArgument naming the offending key.
  void validate() const;
  // Throws kInvalidArgument for unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);
  std::map<std::string, std::string> to_map() const;
  std::string to_string() const;

  ViewChoices view_choices() const;
  // Learning rate for the step after `completed` steps.
  double lr_at(int completed) const;
  ShapeKind shape_kind() const;
};

// Reads `key = value` lines ('#' starts a comment) on top of `base`.
TrainConfig load_config(const std::string& path, TrainConfig base = {});
void apply_config_text(const std::string& text, TrainConfig& cfg);

}  // namespace omnivr
