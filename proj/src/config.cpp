#include "omnivr/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "omnivr/error.hpp"

namespace omnivr {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw Error(ErrorCode::kInvalidArgument, "config key '" + key + "': cannot parse '" + value + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream is(value);
  T v{};
  is >> v;
  if (is.fail() || !is.eof()) bad_value(key, value);
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value);
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

[[noreturn]] void invalid(const std::string& key, const std::string& why) {
  throw Error(ErrorCode::kInvalidArgument, "config key '" + key + "': " + why);
}

}  // namespace

TrainConfig TrainConfig::paper_scale() {
  TrainConfig c;
  c.scale = 4;
  c.patch = 256;
  c.samples = 25600;
  c.resolutions = {512, 576, 640, 768, 832, 960, 1024};
  c.batch = 16;
  c.iterations = 500000;
  c.lr = 2e-4;
  c.channels = 32;
  c.freqs = 128;
  c.hidden = 256;
  c.down_hidden = 32;
  c.erp_height = 2048;
  c.erp_width = 4096;
  return c;
}

void TrainConfig::set(const std::string& key, const std::string& value) {
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"scale", [&](const std::string& v) { scale = parse_number<int>(key, v); }},
      {"patch", [&](const std::string& v) { patch = parse_number<int>(key, v); }},
      {"samples", [&](const std::string& v) { samples = parse_number<int>(key, v); }},
      {"fovs", [&](const std::string& v) {
         fovs.clear();
         for (const auto& s : split(v, ',')) fovs.push_back(parse_number<double>(key, s));
       }},
      {"resolutions", [&](const std::string& v) {
         resolutions.clear();
         for (const auto& s : split(v, ',')) resolutions.push_back(parse_number<int>(key, s));
       }},
      {"independent_fov", [&](const std::string& v) { independent_fov = parse_bool(key, v); }},
      {"batch", [&](const std::string& v) { batch = parse_number<int>(key, v); }},
      {"iterations", [&](const std::string& v) { iterations = parse_number<int>(key, v); }},
      {"lr", [&](const std::string& v) { lr = parse_number<double>(key, v); }},
      {"lr_schedule", [&](const std::string& v) { lr_schedule = v; }},
      {"lambda1", [&](const std::string& v) { lambda1 = parse_number<double>(key, v); }},
      {"lambda2", [&](const std::string& v) { lambda2 = parse_number<double>(key, v); }},
      {"seed", [&](const std::string& v) { seed = parse_number<std::uint64_t>(key, v); }},
      {"channels", [&](const std::string& v) { channels = parse_number<int>(key, v); }},
      {"freqs", [&](const std::string& v) { freqs = parse_number<int>(key, v); }},
      {"hidden", [&](const std::string& v) { hidden = parse_number<int>(key, v); }},
      {"down_hidden", [&](const std::string& v) { down_hidden = parse_number<int>(key, v); }},
      {"shape", [&](const std::string& v) { shape = v; }},
      {"train_quality", [&](const std::string& v) { train_quality = parse_number<double>(key, v); }},
      {"quant", [&](const std::string& v) { quant = v; }},
      {"data", [&](const std::string& v) { data = v; }},
      {"synthetic_count", [&](const std::string& v) { synthetic_count = parse_number<int>(key, v); }},
      {"erp_height", [&](const std::string& v) { erp_height = parse_number<int>(key, v); }},
      {"erp_width", [&](const std::string& v) { erp_width = parse_number<int>(key, v); }},
      {"log", [&](const std::string& v) { log = v; }},
      {"checkpoint", [&](const std::string& v) { checkpoint = v; }},
      {"checkpoint_every", [&](const std::string& v) { checkpoint_every = parse_number<int>(key, v); }},
      {"eval_fov", [&](const std::string& v) { eval_fov = parse_number<double>(key, v); }},
      {"eval_width", [&](const std::string& v) { eval_width = parse_number<int>(key, v); }},
      {"eval_height", [&](const std::string& v) { eval_height = parse_number<int>(key, v); }},
      {"eval_quality", [&](const std::string& v) { eval_quality = parse_number<double>(key, v); }},
  };
  auto it = setters.find(key);
  if (it == setters.end()) throw Error(ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
  it->second(value);
}

std::map<std::string, std::string> TrainConfig::to_map() const {
  return {
      {"scale", std::to_string(scale)},
      {"patch", std::to_string(patch)},
      {"samples", std::to_string(samples)},
      {"fovs", join(fovs)},
      {"resolutions", join(resolutions)},
      {"independent_fov", independent_fov ? "true" : "false"},
      {"batch", std::to_string(batch)},
      {"iterations", std::to_string(iterations)},
      {"lr", num(lr)},
      {"lr_schedule", lr_schedule},
      {"lambda1", num(lambda1)},
      {"lambda2", num(lambda2)},
      {"seed", std::to_string(seed)},
      {"channels", std::to_string(channels)},
      {"freqs", std::to_string(freqs)},
      {"hidden", std::to_string(hidden)},
      {"down_hidden", std::to_string(down_hidden)},
      {"shape", shape},
      {"train_quality", num(train_quality)},
      {"quant", quant},
      {"data", data},
      {"synthetic_count", std::to_string(synthetic_count)},
      {"erp_height", std::to_string(erp_height)},
      {"erp_width", std::to_string(erp_width)},
      {"log", log},
      {"checkpoint", checkpoint},
      {"checkpoint_every", std::to_string(checkpoint_every)},
      {"eval_fov", num(eval_fov)},
      {"eval_width", std::to_string(eval_width)},
      {"eval_height", std::to_string(eval_height)},
      {"eval_quality", num(eval_quality)},
  };
}

double TrainConfig::lr_at(int completed) const {
  if (lr_schedule == "constant" || iterations == 0) return lr;
  const double t = std::min(1.0, static_cast<double>(completed) / iterations);
  return lr * 0.5 * (1.0 + std::cos(std::numbers::pi * t));
}

std::string TrainConfig::to_string() const {
  std::ostringstream os;
  for (const auto& [k, v] : to_map()) os << k << " = " << v << "\n";
  return os.str();
}

void TrainConfig::validate() const {
  if (scale < 1) invalid("scale", "must be >= 1");
  if (patch < 8 || patch % scale != 0) invalid("patch", "must be >= 8 and divisible by scale");
  if ((patch / scale) % 8 != 0) invalid("patch", "patch / scale must be a multiple of 8 (JPEG blocks)");
  if (samples < 1) invalid("samples", "must be positive");
  if (fovs.empty()) invalid("fovs", "must not be empty");
  for (double f : fovs) {
    if (!(f > 0 && f < 180)) invalid("fovs", "each FoV must be in (0, 180) degrees");
  }
  if (resolutions.empty()) invalid("resolutions", "must not be empty");
  for (int r : resolutions) {
    if (r < 2) invalid("resolutions", "each resolution must be >= 2");
  }
  if (batch < 1) invalid("batch", "must be positive");
  if (iterations < 0) invalid("iterations", "must be >= 0");
  if (!(lr >= 0)) invalid("lr", "must be >= 0");
  if (lr_schedule != "constant" && lr_schedule != "cosine") invalid("lr_schedule", "must be constant or cosine");
  if (!(lambda1 >= 0)) invalid("lambda1", "must be >= 0");
  if (!(lambda2 >= 0)) invalid("lambda2", "must be >= 0");
  if (channels < 1) invalid("channels", "must be positive");
  if (freqs < 1) invalid("freqs", "must be positive");
  if (hidden < 1) invalid("hidden", "must be positive");
  if (down_hidden < 1) invalid("down_hidden", "must be positive");
  if (shape != "spherical" && shape != "planar") invalid("shape", "must be spherical or planar");
  if (!(train_quality >= 1 && train_quality <= 100)) invalid("train_quality", "must be in [1, 100]");
  if (quant != "ste" && quant != "noise") invalid("quant", "must be ste or noise");
  if (data.empty()) invalid("data", "must name images or 'synthetic'");
  if (data == "synthetic") {
    if (synthetic_count < 1) invalid("synthetic_count", "must be positive");
    if (erp_width != 2 * erp_height) invalid("erp_width", "must be twice erp_height");
    if (erp_height < patch || erp_height % scale != 0) {
      invalid("erp_height", "must be >= patch and divisible by scale");
    }
  }
  if (checkpoint_every < 0) invalid("checkpoint_every", "must be >= 0");
  if (!(eval_fov > 0 && eval_fov < 180)) invalid("eval_fov", "must be in (0, 180)");
  if (eval_width < 2 || eval_height < 2) invalid("eval_width", "viewport must be at least 2x2");
  if (!(eval_quality >= 1 && eval_quality <= 100)) invalid("eval_quality", "must be in [1, 100]");
}

ViewChoices TrainConfig::view_choices() const {
  ViewChoices v;
  v.fovs_deg = fovs;
  v.resolutions = resolutions;
  v.independent_fov = independent_fov;
  return v;
}

ShapeKind TrainConfig::shape_kind() const {
  return shape == "planar" ? ShapeKind::kPlanar : ShapeKind::kSpherical;
}

void apply_config_text(const std::string& text, TrainConfig& cfg) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "config line " + std::to_string(lineno) + ": expected key = value");
    }
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

TrainConfig load_config(const std::string& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_text(ss.str(), base);
  return base;
}

}  // namespace omnivr
