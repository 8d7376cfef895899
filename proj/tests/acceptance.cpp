// Acceptance suite: one PASS/FAIL line per criterion C1..C9, details indented
// below it. Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <csetjmp>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <jpeglib.h>

#include "omnivr/codec/jpeg.hpp"
#include "omnivr/codec/rate.hpp"
#include "omnivr/evaluate.hpp"
#include "omnivr/image_io.hpp"
#include "omnivr/metrics.hpp"
#include "omnivr/oracles/oracles.hpp"
#include "omnivr/resample.hpp"
#include "omnivr/sampling.hpp"
#include "omnivr/synthetic.hpp"
#include "omnivr/training.hpp"

using namespace omnivr;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    pass &= ok;
    detail << "    [" << (ok ? "ok" : "FAILED") << "] " << what << "\n";
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s << std::setprecision(prec) << v;
  return s.str();
}

double max_diff(const Image& a, const Image& b) {
  if (!a.same_shape(b)) return INFINITY;
  double m = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

Image random_image(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  Image img(w, h);
  for (double& v : img.data()) v = rng.uniform();
  return quantize_8bit(img);
}

// Runs an oracle suite and folds its lines into the outcome.
void fold_suite(Outcome& o, const std::function<bool(std::ostream&)>& suite) {
  std::ostringstream lines;
  const bool ok = suite(lines);
  o.pass &= ok;
  std::istringstream in(lines.str());
  for (std::string line; std::getline(in, line);) o.detail << "    " << line << "\n";
}

// ---------------------------------------------------------------------------
Outcome c1_geometry_roundtrip() {
  Outcome o;
  fold_suite(o, oracle::check_roundtrip);
  return o;
}

// ---------------------------------------------------------------------------
Outcome c2_ssr_oracle() {
  Outcome o;
  fold_suite(o, oracle::check_ssr_fd);
  return o;
}

// ---------------------------------------------------------------------------
// Incomplete-gamma free chi-square tail via the Wilson-Hilferty cube-root
// normal approximation (accurate for the hundreds of degrees of freedom used here).
double chi2_upper_tail(double x, double dof) {
  const double z = (std::cbrt(x / dof) - (1 - 2 / (9 * dof))) / std::sqrt(2 / (9 * dof));
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

Outcome c3_dps() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  constexpr int kH = 64, kW = 128;
  const std::vector<Image> erps = {synthetic_panorama(kH, kW, 31), synthetic_panorama(kH, kW, 32)};
  Rng rng(33);
  const ViewChoices choices{{80, 90, 100, 110, 120}, {16, 24, 32, 48}, true};
  int draws = 0, bound_violations = 0, count_violations = 0, equality_violations = 0, empty = 0;
  double pix_err = 0.0;
  while (draws < 10000) {
    const Image& erp = erps[rng.below(2)];
    const int p = rng.uniform() < 0.5 ? 16 : 32;
    const PatchSpec ps{static_cast<int>(rng.below(kW)), static_cast<int>(rng.below(kH - p + 1)), p, 2};
    ViewportSpec view = pick_view_for_patch(ps, kH, kW, choices, rng);
    // Perturb the direction so overlaps range from empty to full.
    view.phi_c = wrap_angle(view.phi_c + rng.uniform(-1.5, 1.5));
    view.theta_c = std::clamp(view.theta_c + rng.uniform(-0.8, 0.8), -kPi / 2, kPi / 2);
    const std::size_t n = static_cast<std::size_t>(rng.range(1, 400));
    // Overlap size by a direct predicate scan over the viewport grid.
    std::size_t overlap = 0;
    for (const GridPoint& g : viewport_grid(view, kH, kW)) {
      double dx = g.erp.x1 - ps.a;
      dx -= kW * std::floor(dx / kW);
      if (dx < p && g.erp.x2 >= ps.b && g.erp.x2 < ps.b + p) ++overlap;
    }
    DisSampResult r;
    try {
      r = dis_samp(erp, ps, view, n, rng);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyOverlap || overlap != 0) ++count_violations;
      ++empty;
      ++draws;
      continue;
    }
    ++draws;
    const SampleSet& s = r.samples;
    if (s.size() > n) ++count_violations;
    if (s.size() != std::min(n, overlap)) ++equality_violations;
    const Image crop = crop_patch(erp, ps.a, ps.b, p);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const ErpCoord x = from_patch_normalized(s.coords[i], p);
      if (!(x.x1 >= 0 && x.x1 < p && x.x2 >= 0 && x.x2 < p)) ++bound_violations;
      const Rgb ref = sample_at(crop, x, Kernel::bicubic(), false);
      for (int c = 0; c < 3; ++c) pix_err = std::max(pix_err, std::abs(ref[c] - s.pixels[i][c]));
    }
  }
  o.require(bound_violations == 0, std::to_string(draws) + " draws (" + std::to_string(empty) +
                                       " empty overlaps), samples outside patch bounds: " +
                                       std::to_string(bound_violations));
  o.require(count_violations == 0, "|S| <= N violations: " + std::to_string(count_violations));
  o.require(equality_violations == 0, "|S| == min(N, overlap) violations: " + std::to_string(equality_violations));
  o.require(pix_err < 1e-12, "S_pix re-evaluation max error " + fmt(pix_err));

  // Uniform inclusion: fixed patch and view with overlap K > N, many draws.
  {
    const Image& erp = erps[0];
    const PatchSpec ps{40, 16, 32, 2};
    const ViewportSpec view{0.0, erp_to_sphere(ps.center(), kH, kW).phi, deg_to_rad(90), deg_to_rad(90), 32, 32};
    const std::size_t n = 50;
    const int reps = 4000;
    std::map<std::pair<double, double>, int> hits;
    std::size_t k = 0;
    Rng draw(34);
    for (int rep = 0; rep < reps; ++rep) {
      const DisSampResult r = dis_samp(erp, ps, view, n, draw);
      for (const auto& v : r.samples.view_coords) ++hits[{v.u, v.v}];
    }
    for (const GridPoint& g : viewport_grid(view, kH, kW)) {
      double dx = g.erp.x1 - ps.a;
      dx -= kW * std::floor(dx / kW);
      if (dx < ps.p && g.erp.x2 >= ps.b && g.erp.x2 < ps.b + ps.p) ++k;
    }
    const double pi = static_cast<double>(n) / k;
    const double e = reps * pi, var = reps * pi * (1 - pi);
    double chi2 = 0;
    for (const auto& [key, c] : hits) chi2 += (c - e) * (c - e) / var;
    chi2 += (k - hits.size()) * e * e / var;  // candidates never drawn
    const double pval = chi2_upper_tail(chi2, static_cast<double>(k - 1));
    o.require(k > n && pval > 1e-3, "uniform inclusion chi2 = " + fmt(chi2) + " on " + std::to_string(k - 1) +
                                        " dof, p = " + fmt(pval) + " (" + std::to_string(reps) + " draws, N = " +
                                        std::to_string(n) + ")");
  }
  // Determinism.
  {
    auto run = [&]() {
      Rng r(35);
      const PatchSpec ps{120, 10, 32, 2};
      const ViewportSpec v = pick_view_for_patch(ps, kH, kW, choices, r);
      return dis_samp(erps[1], ps, v, 100, r);
    };
    const DisSampResult a = run(), b = run();
    bool same = a.samples.coords == b.samples.coords && a.samples.size() == b.samples.size();
    for (std::size_t i = 0; same && i < a.samples.size(); ++i) same = a.samples.pixels[i] == b.samples.pixels[i];
    o.require(same, "bit-identical under a fixed seed");
  }
  o.detail << "    runtime " << fmt(seconds_since(t0), 3) << " s\n";
  return o;
}

// ---------------------------------------------------------------------------
// Bilinear interpolation written out directly: LR cell centers at integer
// coordinates, columns periodic, rows clamped.
Rgb bilinear_reference(const Image& img, double x, double y) {
  const int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0, fy = y - y0;
  Rgb out{0, 0, 0};
  for (int dy = 0; dy <= 1; ++dy) {
    for (int dx = 0; dx <= 1; ++dx) {
      const double w = (dx ? fx : 1 - fx) * (dy ? fy : 1 - fy);
      const int xi = ((x0 + dx) % img.width() + img.width()) % img.width();
      const int yi = std::clamp(y0 + dy, 0, img.height() - 1);
      for (int c = 0; c < 3; ++c) out[c] += w * img.at(c, yi, xi);
    }
  }
  return out;
}

Outcome c4_residual_identity() {
  Outcome o;
  ModelConfig cfg;
  cfg.channels = 8;
  cfg.freqs = 8;
  cfg.hidden = 16;
  cfg.down_hidden = 8;
  double worst = 0;
  Rng rng(41);
  for (int f = 0; f < 10; ++f) {
    VrModel model(cfg, 100 + f);
    model.zero_decoder();
    const Image lr = synthetic_panorama(32, 64, 200 + f);
    ViewportSpec s{deg_to_rad(rng.uniform(-90, 90)), deg_to_rad(rng.uniform(-180, 180)),
                   deg_to_rad(rng.uniform(40, 120)), deg_to_rad(rng.uniform(40, 120)), rng.range(8, 40),
                   rng.range(8, 40)};
    const Image out = render_viewport(model, lr, s, {false, 4096});
    const ViewportProjection proj(s);
    for (int v = 0; v < s.height; ++v) {
      for (int u = 0; u < s.width; ++u) {
        const ErpCoord e = proj.inverse_map({double(u), double(v)}, 64, 128);
        const Rgb ref = bilinear_reference(lr, (e.x1 + 0.5) / 2 - 0.5, (e.x2 + 0.5) / 2 - 0.5);
        for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(out.at(c, v, u) - ref[c]));
      }
    }
  }
  o.require(worst < 1e-12, "10 fixtures, zero-decoder output vs bilinear skip: max difference " + fmt(worst));
  return o;
}

// ---------------------------------------------------------------------------
Outcome c5_gradcheck() {
  Outcome o;
  fold_suite(o, oracle::check_gradcheck);
  return o;
}

// ---------------------------------------------------------------------------
struct JpegErrorMgr {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
};

Image libjpeg_decode(const std::vector<std::uint8_t>& bytes) {
  jpeg_decompress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = [](j_common_ptr c) { std::longjmp(reinterpret_cast<JpegErrorMgr*>(c->err)->jump, 1); };
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    return {};
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  Image img(static_cast<int>(cinfo.output_width), static_cast<int>(cinfo.output_height));
  std::vector<unsigned char> row(cinfo.output_width * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    const int y = static_cast<int>(cinfo.output_scanline);
    unsigned char* rp = row.data();
    jpeg_read_scanlines(&cinfo, &rp, 1);
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c) img.at(c, y, x) = row[x * 3 + c] / 255.0;
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return img;
}

Outcome c6_codec() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  // Third-party decode.
  int decoded = 0, streams = 0;
  double worst_agree = INFINITY;
  for (const auto mode : {codec::HuffmanMode::kStandard, codec::HuffmanMode::kOptimized}) {
    for (const double q : {5.0, 25.0, 50.0, 75.0, 95.0, 100.0}) {
      const Image img = (streams % 2) ? random_image(45, 27, 600 + streams)
                                      : quantize_8bit(synthetic_panorama(64, 128, 600 + streams));
      const auto bytes = codec::encode(img, codec::standard_tables(q), mode).bytes;
      ++streams;
      const Image ref = libjpeg_decode(bytes);
      if (ref.empty() || !ref.same_shape(img)) continue;
      ++decoded;
      worst_agree = std::min(worst_agree, psnr(ref, codec::decode(bytes)));
    }
  }
  o.require(decoded == streams && worst_agree > 40.0,
            std::to_string(decoded) + "/" + std::to_string(streams) +
                " streams decoded by libjpeg; min PSNR between libjpeg and our decoder " + fmt(worst_agree) + " dB");
  // Unit tables.
  double worst_unit = INFINITY;
  for (int i = 0; i < 5; ++i) {
    const Image img = random_image(64 + 8 * i, 40 + 3 * i, 700 + i);
    worst_unit = std::min(worst_unit, psnr(codec::decode(codec::encode(img, codec::unit_tables()).bytes), img));
  }
  o.require(worst_unit >= 50.0, "decode(encode(x)) with unit tables on 5 random images: min PSNR " +
                                    fmt(worst_unit) + " dB");
  // Rate estimate after fitting, on held-out images with the same statistics.
  double worst_rate = 0;
  for (const double q : {50.0, 75.0, 90.0}) {
    const auto tables = codec::standard_tables(q);
    const Image fit_img = quantize_8bit(bicubic_downscale(synthetic_panorama(256, 512, 800), 2, EdgeMode::kWrapX));
    const auto fit_enc = codec::encode(fit_img, tables);
    const codec::LaplaceRateModel model = codec::fit_laplace_model({&fit_enc.blocks});
    const Image test_img = quantize_8bit(bicubic_downscale(synthetic_panorama(256, 512, 801), 2, EdgeMode::kWrapX));
    const auto enc = codec::encode(test_img, tables);
    const double ratio = codec::estimate_rate(enc.blocks, model) / (8.0 * enc.bytes.size());
    worst_rate = std::max(worst_rate, std::abs(ratio - 1));
    o.detail << "    quality " << q << ": estimate / (8 bytes) = " << fmt(ratio) << "\n";
  }
  o.require(worst_rate <= 0.15, "estimate_rate within 15% of 8 * bytes: worst deviation " + fmt(100 * worst_rate) + "%");
  // Rate control at the 0.30 bpp operating point on a 2048 x 4096 panorama, s = 4.
  {
    const Image hr = synthetic_panorama(2048, 4096, 900);
    const Image lr = quantize_8bit(bicubic_downscale(hr, 4, EdgeMode::kWrapX));
    try {
      const codec::RateFit fit = codec::fit_quant_tables(lr, 0.30, hr.height(), hr.width());
      const double again = codec::bpp_real(codec::encode(lr, fit.tables).bytes.size(), hr.height(), hr.width());
      o.require(std::abs(fit.bpp - 0.30) <= 0.015 && std::abs(again - fit.bpp) < 1e-12,
                "fit_quant_tables on 2048x4096 (s = 4): bpp " + fmt(fit.bpp) + " at quality " +
                    fmt(fit.tables.quality) + " after " + std::to_string(fit.evaluations) +
                    " encodes; re-encode bpp " + fmt(again));
    } catch (const Error& e) {
      o.require(false, std::string("fit_quant_tables threw: ") + e.what());
    }
  }
  o.detail << "    runtime " << fmt(seconds_since(t0), 3) << " s\n";
  return o;
}

// ---------------------------------------------------------------------------
struct TrainedModels {
  TrainConfig cfg;
  double train_seconds = 0;
  std::vector<TrainLogRow> log;
  std::optional<VrModel> spherical;
  std::optional<VrModel> planar;
};

double moving_average(const std::vector<TrainLogRow>& log, int end_iteration, int window) {
  double s = 0;
  for (int i = end_iteration - window; i < end_iteration; ++i) s += log[static_cast<std::size_t>(i)].l_pix;
  return s / window;
}

Outcome c7_training(TrainedModels& tm) {
  Outcome o;
  TrainConfig cfg = TrainConfig::desk();
  cfg.validate();
  tm.cfg = cfg;
  const std::vector<Image> data = load_training_data(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  Trainer trainer(cfg, data);
  trainer.run(cfg.iterations);
  tm.train_seconds = seconds_since(t0);
  tm.log = trainer.log();
  tm.spherical.emplace(trainer.model());

  TrainConfig pcfg = cfg;
  pcfg.shape = "planar";
  Trainer planar(pcfg, data);
  planar.run(pcfg.iterations);
  tm.planar.emplace(planar.model());

  o.require(tm.train_seconds < 15 * 60,
            std::to_string(cfg.iterations) + " iterations on " + std::to_string(data.size()) + " synthetic " +
                std::to_string(cfg.erp_height) + "x" + std::to_string(cfg.erp_width) + " panoramas, s = " +
                std::to_string(cfg.scale) + ": " + fmt(tm.train_seconds, 4) + " s");
  const double early = moving_average(tm.log, 10, 10);
  const double late = moving_average(tm.log, cfg.iterations, 10);
  o.require(late <= 0.5 * early, "L_pix moving average (10 iterations): " + fmt(early) + " at iteration 10 -> " +
                                     fmt(late) + " at iteration " + std::to_string(cfg.iterations) + " (" +
                                     fmt(100 * (1 - late / early), 3) + "% decrease, 50% required)");

  // Held-out panoramas (a seed stream disjoint from the training data).
  std::vector<Image> heldout;
  for (int i = 0; i < 2; ++i) {
    heldout.push_back(synthetic_panorama(cfg.erp_height, cfg.erp_width, derive_seed(cfg.seed, 0x6576616c, i)));
  }
  const EvalSettings settings{cfg.eval_fov, cfg.eval_width, cfg.eval_height, cfg.eval_quality};
  const ViewDirection held_dir{20.0, 60.0};
  const EvalReport one = evaluate(*tm.spherical, heldout, {held_dir}, settings);
  o.require(one.model_mean.psnr >= one.baseline_mean.psnr,
            "held-out panoramas, view (theta 20, phi 60): model " + fmt(one.model_mean.psnr) +
                " dB vs bilinear-from-LR baseline " + fmt(one.baseline_mean.psnr) + " dB");
  const EvalReport all = evaluate(*tm.spherical, heldout, default_view_directions(), settings);
  o.detail << "    (info) all 10 directions: model " << fmt(all.model_mean.psnr) << " dB vs baseline "
           << fmt(all.baseline_mean.psnr) << " dB; bpp " << fmt(all.model_bpp) << " vs " << fmt(all.baseline_bpp)
           << "\n";
  for (const EvalRow& r : all.rows) {
    o.detail << "    (info) image " << r.image << " (" << r.dir.theta_deg << ", " << r.dir.phi_deg
             << "): model " << fmt(r.model.psnr) << " baseline " << fmt(r.baseline.psnr) << "\n";
  }

  const std::vector<ViewDirection> poles = {{90.0, 0.0}, {-90.0, 0.0}};
  const EvalReport ps = evaluate(*tm.spherical, heldout, poles, settings);
  const EvalReport pp = evaluate(*tm.planar, heldout, poles, settings);
  o.require(ps.model_mean.psnr >= pp.model_mean.psnr,
            "pole-facing views: spherical descriptor " + fmt(ps.model_mean.psnr) + " dB vs planar descriptor " +
                fmt(pp.model_mean.psnr) + " dB");
  return o;
}

// ---------------------------------------------------------------------------
Outcome c8_metrics() {
  Outcome o;
  Rng rng(81);
  Image a(64, 32);
  for (double& v : a.data()) v = rng.uniform(0.1, 0.9);
  Image b = a;
  for (double& v : b.data()) v += 1.0 / 255;
  const double p = psnr(a, b);
  o.require(std::abs(p - 48.13) <= 0.01, "PSNR of uniform 1/255 error: " + fmt(p, 6) + " dB");
  const double s = ssim(a, a);
  o.require(s == 1.0, "ssim(a, a) = " + fmt(s, 17));
  Image c = a;
  for (double& v : c.data()) v -= 0.0271;
  const double d = std::abs(ws_psnr(a, c) - psnr(a, c));
  o.require(d < 1e-9, "|ws_psnr - psnr| under uniform error: " + fmt(d));
  return o;
}

// ---------------------------------------------------------------------------
Outcome c9_seam(const TrainedModels& tm) {
  Outcome o;
  const Image hr = synthetic_panorama(128, 256, 91);
  const Image hr_rolled = roll_columns(hr, 128);
  double base = 0, learned = 0, full = 0;
  for (const double theta : {0.0, 35.0, -60.0}) {
    const ViewportSpec s{deg_to_rad(theta), kPi - 0.03, deg_to_rad(100), deg_to_rad(80), 48, 40};
    ViewportSpec r = s;
    r.phi_c = wrap_angle(s.phi_c - kPi);
    base = std::max(base, max_diff(render_viewport_baseline(hr, s, Kernel::bicubic()),
                                   render_viewport_baseline(hr_rolled, r, Kernel::bicubic())));
    base = std::max(base, max_diff(render_viewport_baseline(hr, s, Kernel::bilinear()),
                                   render_viewport_baseline(hr_rolled, r, Kernel::bilinear())));
    const VrModel& model = *tm.spherical;
    const Image lr = downsample_erp(model, hr);
    learned = std::max(learned, max_diff(render_viewport(model, lr, s), render_viewport(model, roll_columns(lr, 64), r)));
    // Whole chain including the downsampler and the codec; the roll is block aligned.
    const auto tables = codec::standard_tables(75);
    const Image lr_a = codec::decode(codec::encode(downsample_erp(model, hr), tables).bytes);
    const Image lr_b = codec::decode(codec::encode(downsample_erp(model, hr_rolled), tables).bytes);
    full = std::max(full, max_diff(render_viewport(model, lr_a, s), render_viewport(model, lr_b, r)));
  }
  o.require(base < 1e-6, "baseline renderer, phi = 180 vs rolled panorama: max difference " + fmt(base));
  o.require(learned < 1e-6, "learned renderer, phi = 180 vs rolled LR: max difference " + fmt(learned));
  o.require(full < 1e-6, "downsample + JPEG + learned render vs rolled HR: max difference " + fmt(full));
  return o;
}

}  // namespace

// Optional arguments select criteria by id (e.g. `acceptance C3 C6`); none runs all.
int main(int argc, char** argv) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::string> only(argv + 1, argv + argc);
  TrainedModels tm;
  std::vector<std::pair<std::string, Outcome>> results;
  auto run = [&](const std::string& label, const std::function<Outcome()>& fn) {
    const std::string id = label.substr(0, label.find(' '));
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) return;
    const auto t = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.require(false, std::string("threw: ") + e.what());
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << label << "  [" << fmt(seconds_since(t), 3) << " s]\n"
              << o.detail.str();
    std::cout.flush();
    results.emplace_back(label, std::move(o));
  };
  run("C1 geometry roundtrip", c1_geometry_roundtrip);
  run("C2 SSR finite-difference oracle", c2_ssr_oracle);
  run("C3 discrete pixel sampling conformance", c3_dps);
  run("C4 zero-decoder residual identity", c4_residual_identity);
  run("C5 gradient checks", c5_gradcheck);
  run("C6 codec", c6_codec);
  run("C7 desk-scale end-to-end training", [&] { return c7_training(tm); });
  run("C8 metric fixtures", c8_metrics);
  run("C9 seam continuity", [&] {
    // Seam continuity is structural, so an untrained model stands in when C7 was skipped.
    if (!tm.spherical) tm.spherical.emplace(model_config(TrainConfig::desk()), 9);
    return c9_seam(tm);
  });
  int failed = 0;
  for (const auto& [label, o] : results) failed += o.pass ? 0 : 1;
  std::cout << "summary: " << results.size() - failed << "/" << results.size() << " criteria passed in "
            << fmt(seconds_since(t0), 4) << " s\n";
  return failed == 0 ? 0 : 1;
}
