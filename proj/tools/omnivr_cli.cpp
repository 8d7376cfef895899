// omnivr: downscale, render, train, eval, probe-ssr and oracle commands.
// Exit codes: 0 ok, 1 runtime failure, 2 usage, configuration or missing input.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "omnivr/codec/jpeg.hpp"
#include "omnivr/config.hpp"
#include "omnivr/error.hpp"
#include "omnivr/evaluate.hpp"
#include "omnivr/image_io.hpp"
#include "omnivr/oracles/oracles.hpp"
#include "omnivr/resample.hpp"
#include "omnivr/ssr.hpp"
#include "omnivr/synthetic.hpp"
#include "omnivr/training.hpp"
#include "omnivr/vr.hpp"

namespace {

using namespace omnivr;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Every command prints the values it will run with before doing any work. The
// block goes to stderr when stdout carries the command's CSV output.
void print_resolved(const std::string& command, const std::vector<std::pair<std::string, std::string>>& kv,
                    std::ostream& os = std::cout) {
  os << "# omnivr " << command << " resolved config\n";
  for (const auto& [k, v] : kv) os << k << " = " << v << "\n";
  os.flush();
}

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

std::uint64_t default_seed() {
  const char* env = std::getenv("OMNIVR_SEED");
  if (env == nullptr || *env == '\0') return 1;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "OMNIVR_SEED must be a non-negative integer");
  }
}

codec::HuffmanMode huffman_mode(const std::string& s) {
  return s == "standard" ? codec::HuffmanMode::kStandard : codec::HuffmanMode::kOptimized;
}

struct DownscaleArgs {
  std::string in, out, model, huffman = "optimized";
  int scale = 2;
  double target_bpp = 0.0;
  double quality = 75.0;
  bool baseline = false;
};

int run_downscale(const DownscaleArgs& a) {
  const Image hr = read_image(a.in);
  int scale = a.scale;
  Image lr;
  std::optional<VrModel> model;
  if (!a.baseline) {
    if (a.model.empty()) throw Error(ErrorCode::kInvalidArgument, "--model is required unless --baseline is given");
    model.emplace(load_model(a.model));
    scale = model->config().scale;
  }
  print_resolved("downscale", {{"in", a.in},
                               {"out", a.out},
                               {"mode", a.baseline ? "baseline-bicubic" : "learned"},
                               {"model", a.model},
                               {"scale", std::to_string(scale)},
                               {"target_bpp", a.target_bpp > 0 ? num(a.target_bpp) : "none"},
                               {"quality", a.target_bpp > 0 ? "fitted" : num(a.quality)},
                               {"huffman", a.huffman}});
  lr = a.baseline ? bicubic_downscale(hr, scale, EdgeMode::kWrapX) : downsample_erp(*model, hr);
  lr = quantize_8bit(lr);
  std::vector<std::uint8_t> bytes;
  double quality = a.quality;
  if (a.target_bpp > 0) {
    const codec::RateFit fit =
        codec::fit_quant_tables(lr, a.target_bpp, hr.height(), hr.width(), 0.05, huffman_mode(a.huffman));
    bytes = fit.encoded.bytes;
    quality = fit.tables.quality;
  } else {
    bytes = codec::encode(lr, codec::standard_tables(a.quality), huffman_mode(a.huffman)).bytes;
  }
  write_bytes(a.out, bytes);
  std::cout << "lr_size = " << lr.width() << "x" << lr.height() << "\n"
            << "quality = " << num(quality) << "\n"
            << "bytes = " << bytes.size() << "\n"
            << "bpp = " << num(codec::bpp_real(bytes.size(), hr.height(), hr.width())) << "\n";
  return kExitOk;
}

struct RenderArgs {
  std::string in, out, model, baseline;
  double theta = 0, phi = 0, fov_h = 90, fov_v = 90;
  int width = 256, height = 256;
};

int run_render(const RenderArgs& a) {
  ViewportSpec spec;
  spec.theta_c = deg_to_rad(a.theta);
  spec.phi_c = deg_to_rad(a.phi);
  spec.fov_h = deg_to_rad(a.fov_h);
  spec.fov_v = deg_to_rad(a.fov_v);
  spec.width = a.width;
  spec.height = a.height;
  spec.validate();
  if (a.baseline.empty() && a.model.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--model is required unless --baseline is given");
  }
  print_resolved("render", {{"in", a.in},
                            {"out", a.out},
                            {"model", a.model},
                            {"baseline", a.baseline.empty() ? "none" : a.baseline},
                            {"theta_deg", num(a.theta)},
                            {"phi_deg", num(a.phi)},
                            {"fov_h_deg", num(a.fov_h)},
                            {"fov_v_deg", num(a.fov_v)},
                            {"width", std::to_string(a.width)},
                            {"height", std::to_string(a.height)}});
  const Image lr = read_image(a.in);
  Image view;
  if (!a.baseline.empty()) {
    view = render_viewport_baseline(lr, spec, a.baseline == "bicubic" ? Kernel::bicubic() : Kernel::bilinear());
  } else {
    const VrModel model = load_model(a.model);
    view = render_viewport(model, lr, spec);
  }
  write_png(a.out, view);
  std::cout << "wrote " << a.out << " (" << view.width() << "x" << view.height() << ")\n";
  return kExitOk;
}

struct TrainArgs {
  std::string config, resume, log, checkpoint;
  std::vector<std::string> sets;
  bool dry_run = false, paper_scale = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> iterations;
};

TrainConfig resolve_config(const std::string& path, const std::vector<std::string>& sets, bool paper_scale,
                           const std::optional<std::uint64_t>& seed) {
  TrainConfig cfg = paper_scale ? TrainConfig::paper_scale() : TrainConfig::desk();
  cfg.seed = default_seed();
  if (!path.empty()) cfg = load_config(path, cfg);
  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (seed) cfg.seed = *seed;
  cfg.validate();
  return cfg;
}

void print_config(const std::string& command, const TrainConfig& cfg, std::ostream& os = std::cout) {
  const auto map = cfg.to_map();
  std::vector<std::pair<std::string, std::string>> kv(map.begin(), map.end());
  print_resolved(command, kv, os);
}

int run_train(const TrainArgs& a) {
  TrainConfig cfg = resolve_config(a.config, a.sets, a.paper_scale, a.seed);
  if (a.iterations) cfg.set("iterations", std::to_string(*a.iterations));
  if (!a.log.empty()) cfg.log = a.log;
  if (!a.checkpoint.empty()) cfg.checkpoint = a.checkpoint;
  cfg.validate();
  print_config("train", cfg);
  if (a.dry_run) {
    std::cout << "dry run: configuration is valid\n";
    return kExitOk;
  }
  Trainer trainer(cfg, load_training_data(cfg));
  if (!a.resume.empty()) {
    trainer.restore(nn::read_checkpoint(a.resume));
    std::cout << "resumed at iteration " << trainer.iteration() << "\n";
  }
  std::ofstream log;
  if (!cfg.log.empty()) {
    const bool append = !a.resume.empty();
    log.open(cfg.log, append ? std::ios::app : std::ios::trunc);
    if (!log) throw Error(ErrorCode::kIo, "cannot open log " + cfg.log);
    if (!append) log << log_csv_header() << "\n";
  }
  auto save = [&]() {
    if (cfg.checkpoint.empty()) return;
    nn::write_checkpoint(cfg.checkpoint, trainer.checkpoint());
  };
  trainer.run(cfg.iterations, [&](const TrainLogRow& row) {
    if (log) log << log_csv_row(row) << "\n";
    if (row.iteration % 10 == 0 || row.iteration == cfg.iterations) {
      std::cout << log_csv_row(row) << "\n";
      std::cout.flush();
    }
    if (cfg.checkpoint_every > 0 && row.iteration % cfg.checkpoint_every == 0) save();
  });
  save();
  std::cout << "finished " << trainer.iteration() << " iterations\n";
  return kExitOk;
}

struct EvalArgs {
  std::string config, model, out, data;
  std::vector<std::string> sets;
  bool paper_scale = false;
  std::optional<std::uint64_t> seed;
};

int run_eval(const EvalArgs& a) {
  TrainConfig cfg = resolve_config(a.config, a.sets, a.paper_scale, a.seed);
  if (!a.data.empty()) cfg.data = a.data;
  cfg.validate();
  std::ostream& info = a.out.empty() ? std::cerr : std::cout;
  print_config("eval", cfg, info);
  info << "model = " << a.model << "\nout = " << (a.out.empty() ? "stdout" : a.out) << "\n";
  const VrModel model = load_model(a.model);
  std::vector<Image> images;
  if (cfg.data == "synthetic") {
    // Held-out panoramas: a seed stream disjoint from the training data.
    for (int i = 0; i < cfg.synthetic_count; ++i) {
      images.push_back(synthetic_panorama(cfg.erp_height, cfg.erp_width, derive_seed(cfg.seed, 0x6576616c, i)));
    }
  } else {
    images = load_training_data(cfg);
  }
  EvalSettings settings{cfg.eval_fov, cfg.eval_width, cfg.eval_height, cfg.eval_quality};
  const EvalReport report = evaluate(model, images, default_view_directions(), settings);
  const std::string csv = eval_csv(report);
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream f(a.out);
    if (!f) throw Error(ErrorCode::kIo, "cannot write " + a.out);
    f << csv;
    std::cout << "wrote " << a.out << "\n";
  }
  std::cout << "model_mean_psnr = " << num(report.model_mean.psnr) << "\n"
            << "baseline_mean_psnr = " << num(report.baseline_mean.psnr) << "\n"
            << "model_bpp = " << num(report.model_bpp) << "\n"
            << "baseline_bpp = " << num(report.baseline_bpp) << "\n";
  return kExitOk;
}

struct ProbeArgs {
  std::string out, kind = "spherical";
  double theta = 0, phi = 0, fov_h = 90, fov_v = 90;
  int width = 16, height = 16, erp_height = 1024, erp_width = 2048;
  bool raw_stencil = false;
};

int run_probe(const ProbeArgs& a) {
  ViewportSpec spec{deg_to_rad(a.theta), deg_to_rad(a.phi), deg_to_rad(a.fov_h), deg_to_rad(a.fov_v), a.height,
                    a.width};
  spec.validate();
  if (a.erp_height <= 0 || a.erp_width != 2 * a.erp_height) {
    throw Error(ErrorCode::kInvalidArgument, "--erp-width must equal 2 * --erp-height");
  }
  print_resolved("probe-ssr", {{"kind", a.kind},
                               {"raw_stencil", a.raw_stencil ? "true" : "false"},
                               {"theta_deg", num(a.theta)},
                               {"phi_deg", num(a.phi)},
                               {"fov_h_deg", num(a.fov_h)},
                               {"fov_v_deg", num(a.fov_v)},
                               {"width", std::to_string(a.width)},
                               {"height", std::to_string(a.height)},
                               {"erp_height", std::to_string(a.erp_height)},
                               {"erp_width", std::to_string(a.erp_width)},
                               {"out", a.out.empty() ? "stdout" : a.out}},
                 a.out.empty() ? std::cerr : std::cout);
  std::ostringstream csv;
  csv << "u,v,jac_u_lon,jac_u_lat,jac_v_lon,jac_v_lat,hess_lon_uu,hess_lon_uv,hess_lon_vv,hess_lat_uu,"
         "hess_lat_uv,hess_lat_vv\n";
  csv << std::setprecision(12);
  const ViewportProjection proj(spec);
  const SsrOptions opts = a.raw_stencil ? SsrOptions::raw_stencil() : SsrOptions{};
  for (int v = 0; v < spec.height; ++v) {
    for (int u = 0; u < spec.width; ++u) {
      const ViewportCoord y{static_cast<double>(u), static_cast<double>(v)};
      const ShapeDescriptor d = a.kind == "planar" ? shape_2d_baseline(proj, y, a.erp_height, a.erp_width)
                                                   : shape_at(proj, y, a.erp_height, a.erp_width, opts);
      csv << u << "," << v;
      for (double x : d.flat()) csv << "," << x;
      csv << "\n";
    }
  }
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream f(a.out);
    if (!f) throw Error(ErrorCode::kIo, "cannot write " + a.out);
    f << csv.str();
  }
  return kExitOk;
}

int run_oracle(const std::string& check) {
  print_resolved("oracle", {{"check", check}});
  bool ok = false;
  if (check == "roundtrip") ok = oracle::check_roundtrip(std::cout);
  if (check == "ssr-fd") ok = oracle::check_ssr_fd(std::cout);
  if (check == "downscale") ok = oracle::check_downscale(std::cout);
  if (check == "gradcheck") ok = oracle::check_gradcheck(std::cout);
  std::cout << (ok ? "oracle " + check + ": all checks passed\n" : "oracle " + check + ": FAILED\n");
  return ok ? kExitOk : kExitRuntime;
}

void add_view_options(CLI::App* cmd, double& theta, double& phi, double& fov_h, double& fov_v, int& width,
                      int& height) {
  cmd->add_option("--theta", theta, "View latitude in degrees")->check(CLI::Range(-90.0, 90.0));
  cmd->add_option("--phi", phi, "View longitude in degrees")->check(CLI::Range(-180.0, 180.0));
  cmd->add_option("--fov-h", fov_h, "Horizontal field of view in degrees");
  cmd->add_option("--fov-v", fov_v, "Vertical field of view in degrees");
  cmd->add_option("--width", width, "Viewport width in pixels");
  cmd->add_option("--height", height, "Viewport height in pixels");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Omnidirectional image rescaling: downscale, render, train, eval, probe-ssr, oracle"};
  app.require_subcommand(1);

  DownscaleArgs ds;
  auto* downscale = app.add_subcommand("downscale", "Downscale and compress an ERP panorama");
  downscale->add_option("--in", ds.in, "HR panorama (PNG/PPM/JPEG)")->required()->check(CLI::ExistingFile);
  downscale->add_option("--out", ds.out, "Output JPEG")->required();
  downscale->add_option("--model", ds.model, "Model checkpoint")->check(CLI::ExistingFile);
  downscale->add_option("--scale", ds.scale, "Downscale factor for --baseline")->check(CLI::PositiveNumber);
  downscale->add_option("--target-bpp", ds.target_bpp, "Fit the quality to this HR bpp")
      ->check(CLI::PositiveNumber);
  downscale->add_option("--quality", ds.quality, "JPEG quality when no target is given")->check(CLI::Range(1.0, 100.0));
  downscale->add_option("--huffman", ds.huffman, "Huffman tables")
      ->check(CLI::IsMember({"standard", "optimized"}));
  downscale->add_flag("--baseline", ds.baseline, "Bicubic downscale instead of the learned downsampler");

  RenderArgs rd;
  auto* render = app.add_subcommand("render", "Render a viewport from an LR panorama");
  render->add_option("--in", rd.in, "LR panorama (JPEG/PNG/PPM)")->required()->check(CLI::ExistingFile);
  render->add_option("--out", rd.out, "Output PNG")->required();
  render->add_option("--model", rd.model, "Model checkpoint")->check(CLI::ExistingFile);
  render->add_option("--baseline", rd.baseline, "Interpolating renderer instead of the model")
      ->check(CLI::IsMember({"bilinear", "bicubic"}));
  add_view_options(render, rd.theta, rd.phi, rd.fov_h, rd.fov_v, rd.width, rd.height);

  TrainArgs tr;
  std::uint64_t train_seed = 0;
  int train_iterations = 0;
  auto* train = app.add_subcommand("train", "Train the rescaling model");
  train->add_option("--config", tr.config, "key = value config file")->check(CLI::ExistingFile);
  train->add_option("--set", tr.sets, "Override a config key (key=value)");
  train->add_option("--resume", tr.resume, "Checkpoint to resume from")->check(CLI::ExistingFile);
  train->add_option("--log", tr.log, "CSV log path");
  train->add_option("--checkpoint", tr.checkpoint, "Checkpoint output path");
  auto* train_seed_opt = train->add_option("--seed", train_seed, "Seed (default: OMNIVR_SEED or 1)");
  auto* train_iter_opt = train->add_option("--iterations", train_iterations, "Total iterations")
                             ->check(CLI::PositiveNumber);
  train->add_flag("--dry-run", tr.dry_run, "Validate and print the configuration only");
  train->add_flag("--paper-scale", tr.paper_scale, "Start from the full-scale settings instead of desk scale");

  EvalArgs ev;
  std::uint64_t eval_seed = 0;
  auto* eval = app.add_subcommand("eval", "Evaluate a model against the bicubic/bilinear baseline");
  eval->add_option("--config", ev.config, "key = value config file")->check(CLI::ExistingFile);
  eval->add_option("--set", ev.sets, "Override a config key (key=value)");
  eval->add_option("--model", ev.model, "Model checkpoint")->required()->check(CLI::ExistingFile);
  eval->add_option("--data", ev.data, "'synthetic' or comma-separated panorama paths");
  eval->add_option("--out", ev.out, "CSV output path (default stdout)");
  auto* eval_seed_opt = eval->add_option("--seed", eval_seed, "Seed (default: OMNIVR_SEED or 1)");
  eval->add_flag("--paper-scale", ev.paper_scale, "Start from the full-scale settings");

  ProbeArgs pr;
  auto* probe = app.add_subcommand("probe-ssr", "Dump shape descriptors of a viewport grid as CSV");
  add_view_options(probe, pr.theta, pr.phi, pr.fov_h, pr.fov_v, pr.width, pr.height);
  probe->add_option("--erp-height", pr.erp_height, "ERP height of the reference frame");
  probe->add_option("--erp-width", pr.erp_width, "ERP width of the reference frame");
  probe->add_option("--kind", pr.kind, "Descriptor kind")->check(CLI::IsMember({"spherical", "planar"}));
  probe->add_flag("--raw-stencil", pr.raw_stencil, "Unnormalized stencil with cos on latitude and summed first differences");
  probe->add_option("--out", pr.out, "CSV output path (default stdout)");

  std::string check;
  auto* oracle_cmd = app.add_subcommand("oracle", "Run an oracle suite; exit 0 iff all checks pass");
  oracle_cmd->add_option("--check", check, "Suite name")
      ->required()
      ->check(CLI::IsMember({"roundtrip", "ssr-fd", "downscale", "gradcheck"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*downscale) return run_downscale(ds);
    if (*render) return run_render(rd);
    if (*train) {
      if (*train_seed_opt) tr.seed = train_seed;
      if (*train_iter_opt) tr.iterations = train_iterations;
      return run_train(tr);
    }
    if (*eval) {
      if (*eval_seed_opt) ev.seed = eval_seed;
      return run_eval(ev);
    }
    if (*probe) return run_probe(pr);
    if (*oracle_cmd) return run_oracle(check);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kInvalidArgument ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
