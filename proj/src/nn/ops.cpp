#include "omnivr/nn/ops.hpp"

#include <cmath>
#include <numbers>

#include "omnivr/error.hpp"

namespace omnivr::nn {

namespace {

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (!a.value().same_shape(b.value())) {
    throw Error(ErrorCode::kShapeMismatch, std::string(op) + ": " + a.value().shape_string() +
                                               " vs " + b.value().shape_string());
  }
}

void require_ndim(const Var& x, int n, const char* op) {
  if (x.value().ndim() != n) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string(op) + ": unexpected rank " + x.value().shape_string());
  }
}

Node& parent(Node& n, std::size_t i) { return *n.parents[i]; }

}  // namespace

Var add(const Var& a, const Var& b) {
  require_same_shape(a, b, "add");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  return make_node(std::move(out), {a, b}, [](Node& n) {
    for (int k = 0; k < 2; ++k) {
      Node& p = parent(n, k);
      if (!p.requires_grad) continue;
      Tensor& g = p.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
    }
  });
}

Var sub(const Var& a, const Var& b) {
  require_same_shape(a, b, "sub");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  return make_node(std::move(out), {a, b}, [](Node& n) {
    const double sign[2] = {1.0, -1.0};
    for (int k = 0; k < 2; ++k) {
      Node& p = parent(n, k);
      if (!p.requires_grad) continue;
      Tensor& g = p.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += sign[k] * n.grad[i];
    }
  });
}

Var mul(const Var& a, const Var& b) {
  require_same_shape(a, b, "mul");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  return make_node(std::move(out), {a, b}, [](Node& n) {
    Node& pa = parent(n, 0);
    Node& pb = parent(n, 1);
    if (pa.requires_grad) {
      Tensor& g = pa.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i] * pb.value[i];
    }
    if (pb.requires_grad) {
      Tensor& g = pb.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i] * pa.value[i];
    }
  });
}

Var scale(const Var& a, double k) {
  Tensor out = a.value();
  for (double& v : out.values()) v *= k;
  return make_node(std::move(out), {a}, [k](Node& n) {
    Tensor& g = parent(n, 0).grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += k * n.grad[i];
  });
}

Var relu(const Var& x) {
  Tensor out = x.value();
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return make_node(std::move(out), {x}, [](Node& n) {
    Node& p = parent(n, 0);
    Tensor& g = p.grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (p.value[i] > 0.0) g[i] += n.grad[i];
    }
  });
}

Var gelu(const Var& x) {
  Tensor out = x.value();
  for (double& v : out.values()) v = 0.5 * v * (1.0 + std::erf(v / std::numbers::sqrt2));
  return make_node(std::move(out), {x}, [](Node& n) {
    Node& p = parent(n, 0);
    Tensor& g = p.grad_buffer();
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double v = p.value[i];
      const double cdf = 0.5 * (1.0 + std::erf(v / std::numbers::sqrt2));
      const double pdf = inv_sqrt_2pi * std::exp(-0.5 * v * v);
      g[i] += n.grad[i] * (cdf + v * pdf);
    }
  });
}

Var linear(const Var& x, const Var& w, const Var& b) {
  require_ndim(x, 2, "linear");
  require_ndim(w, 2, "linear");
  const int rows = x.value().dim(0), in = x.value().dim(1), out_dim = w.value().dim(0);
  if (w.value().dim(1) != in || b.value().size() != static_cast<std::size_t>(out_dim)) {
    throw Error(ErrorCode::kShapeMismatch, "linear: x " + x.value().shape_string() + " w " +
                                               w.value().shape_string());
  }
  Tensor out({rows, out_dim});
  const double* xv = x.value().data();
  const double* wv = w.value().data();
  const double* bv = b.value().data();
  for (int r = 0; r < rows; ++r) {
    const double* xr = xv + static_cast<std::size_t>(r) * in;
    double* yr = out.data() + static_cast<std::size_t>(r) * out_dim;
    for (int o = 0; o < out_dim; ++o) {
      const double* wo = wv + static_cast<std::size_t>(o) * in;
      double s = bv[o];
      for (int i = 0; i < in; ++i) s += xr[i] * wo[i];
      yr[o] = s;
    }
  }
  return make_node(std::move(out), {x, w, b}, [rows, in, out_dim](Node& n) {
    Node& px = parent(n, 0);
    Node& pw = parent(n, 1);
    Node& pb = parent(n, 2);
    const double* gy = n.grad.data();
    if (px.requires_grad) {
      double* gx = px.grad_buffer().data();
      const double* wv = pw.value.data();
      for (int r = 0; r < rows; ++r) {
        double* gxr = gx + static_cast<std::size_t>(r) * in;
        const double* gyr = gy + static_cast<std::size_t>(r) * out_dim;
        for (int o = 0; o < out_dim; ++o) {
          const double go = gyr[o];
          if (go == 0.0) continue;
          const double* wo = wv + static_cast<std::size_t>(o) * in;
          for (int i = 0; i < in; ++i) gxr[i] += go * wo[i];
        }
      }
    }
    if (pw.requires_grad) {
      double* gw = pw.grad_buffer().data();
      const double* xv = px.value.data();
      for (int r = 0; r < rows; ++r) {
        const double* xr = xv + static_cast<std::size_t>(r) * in;
        const double* gyr = gy + static_cast<std::size_t>(r) * out_dim;
        for (int o = 0; o < out_dim; ++o) {
          const double go = gyr[o];
          if (go == 0.0) continue;
          double* gwo = gw + static_cast<std::size_t>(o) * in;
          for (int i = 0; i < in; ++i) gwo[i] += go * xr[i];
        }
      }
    }
    if (pb.requires_grad) {
      double* gb = pb.grad_buffer().data();
      for (int r = 0; r < rows; ++r) {
        const double* gyr = gy + static_cast<std::size_t>(r) * out_dim;
        for (int o = 0; o < out_dim; ++o) gb[o] += gyr[o];
      }
    }
  });
}

namespace {

struct ConvGeometry {
  int c, h, w, o, k, hp, wp, ho, wo;
};

// Copies x into a padded buffer according to the pad mode.
std::vector<double> pad_input(const Tensor& x, const ConvGeometry& g, const ConvOptions& opt) {
  std::vector<double> buf(static_cast<std::size_t>(g.c) * g.hp * g.wp, 0.0);
  const int pad = opt.padding;
  for (int c = 0; c < g.c; ++c) {
    for (int y = 0; y < g.h; ++y) {
      const double* src = x.data() + (static_cast<std::size_t>(c) * g.h + y) * g.w;
      double* dst = buf.data() + (static_cast<std::size_t>(c) * g.hp + y + pad) * g.wp;
      for (int xx = 0; xx < g.wp; ++xx) {
        int sx = xx - pad;
        if (opt.pad_mode == PadMode::kWrapX) {
          sx = ((sx % g.w) + g.w) % g.w;
        } else if (sx < 0 || sx >= g.w) {
          continue;
        }
        dst[xx] = src[sx];
      }
    }
  }
  return buf;
}

}  // namespace

Var conv2d(const Var& x, const Var& w, const Var& b, const ConvOptions& opt) {
  require_ndim(x, 3, "conv2d");
  require_ndim(w, 4, "conv2d");
  ConvGeometry g{};
  g.c = x.value().dim(0);
  g.h = x.value().dim(1);
  g.w = x.value().dim(2);
  g.o = w.value().dim(0);
  g.k = w.value().dim(2);
  if (w.value().dim(1) != g.c || w.value().dim(3) != g.k ||
      b.value().size() != static_cast<std::size_t>(g.o)) {
    throw Error(ErrorCode::kShapeMismatch, "conv2d: x " + x.value().shape_string() + " w " +
                                               w.value().shape_string());
  }
  g.hp = g.h + 2 * opt.padding;
  g.wp = g.w + 2 * opt.padding;
  if (g.hp < g.k || g.wp < g.k || opt.stride < 1) {
    throw Error(ErrorCode::kShapeMismatch, "conv2d: kernel larger than padded input");
  }
  g.ho = (g.hp - g.k) / opt.stride + 1;
  g.wo = (g.wp - g.k) / opt.stride + 1;

  auto padded = std::make_shared<std::vector<double>>(pad_input(x.value(), g, opt));
  Tensor out({g.o, g.ho, g.wo});
  const double* wv = w.value().data();
  const int s = opt.stride;
  for (int o = 0; o < g.o; ++o) {
    double* yo = out.data() + static_cast<std::size_t>(o) * g.ho * g.wo;
    const double bias = b.value()[o];
    for (int i = 0; i < g.ho * g.wo; ++i) yo[i] = bias;
    for (int c = 0; c < g.c; ++c) {
      const double* xc = padded->data() + static_cast<std::size_t>(c) * g.hp * g.wp;
      for (int ky = 0; ky < g.k; ++ky) {
        for (int kx = 0; kx < g.k; ++kx) {
          const double wk = wv[((static_cast<std::size_t>(o) * g.c + c) * g.k + ky) * g.k + kx];
          for (int oy = 0; oy < g.ho; ++oy) {
            const double* row = xc + static_cast<std::size_t>(oy * s + ky) * g.wp + kx;
            double* yrow = yo + static_cast<std::size_t>(oy) * g.wo;
            for (int ox = 0; ox < g.wo; ++ox) yrow[ox] += wk * row[ox * s];
          }
        }
      }
    }
  }
  return make_node(std::move(out), {x, w, b}, [g, opt, padded](Node& n) {
    Node& px = parent(n, 0);
    Node& pw = parent(n, 1);
    Node& pb = parent(n, 2);
    const int s = opt.stride;
    const double* gy = n.grad.data();
    if (pb.requires_grad) {
      Tensor& gb = pb.grad_buffer();
      for (int o = 0; o < g.o; ++o) {
        double acc = 0.0;
        for (int i = 0; i < g.ho * g.wo; ++i) acc += gy[static_cast<std::size_t>(o) * g.ho * g.wo + i];
        gb[o] += acc;
      }
    }
    std::vector<double> gpad;
    if (px.requires_grad) gpad.assign(padded->size(), 0.0);
    const double* wv = pw.value.data();
    double* gw = pw.requires_grad ? pw.grad_buffer().data() : nullptr;
    for (int o = 0; o < g.o; ++o) {
      const double* go = gy + static_cast<std::size_t>(o) * g.ho * g.wo;
      for (int c = 0; c < g.c; ++c) {
        const double* xc = padded->data() + static_cast<std::size_t>(c) * g.hp * g.wp;
        double* gxc = px.requires_grad ? gpad.data() + static_cast<std::size_t>(c) * g.hp * g.wp
                                       : nullptr;
        for (int ky = 0; ky < g.k; ++ky) {
          for (int kx = 0; kx < g.k; ++kx) {
            const std::size_t widx = ((static_cast<std::size_t>(o) * g.c + c) * g.k + ky) * g.k + kx;
            const double wk = wv[widx];
            double acc = 0.0;
            for (int oy = 0; oy < g.ho; ++oy) {
              const std::size_t base = static_cast<std::size_t>(oy * s + ky) * g.wp + kx;
              const double* grow = go + static_cast<std::size_t>(oy) * g.wo;
              if (gw) {
                const double* row = xc + base;
                for (int ox = 0; ox < g.wo; ++ox) acc += grow[ox] * row[ox * s];
              }
              if (gxc) {
                double* grow_x = gxc + base;
                for (int ox = 0; ox < g.wo; ++ox) grow_x[ox * s] += wk * grow[ox];
              }
            }
            if (gw) gw[widx] += acc;
          }
        }
      }
    }
    if (px.requires_grad) {
      Tensor& gx = px.grad_buffer();
      const int pad = opt.padding;
      for (int c = 0; c < g.c; ++c) {
        for (int y = 0; y < g.h; ++y) {
          const double* src = gpad.data() + (static_cast<std::size_t>(c) * g.hp + y + pad) * g.wp;
          double* dst = gx.data() + (static_cast<std::size_t>(c) * g.h + y) * g.w;
          for (int xx = 0; xx < g.wp; ++xx) {
            int sx = xx - pad;
            if (opt.pad_mode == PadMode::kWrapX) {
              sx = ((sx % g.w) + g.w) % g.w;
            } else if (sx < 0 || sx >= g.w) {
              continue;
            }
            dst[sx] += src[xx];
          }
        }
      }
    }
  });
}

Var chw_to_rows(const Var& x) {
  require_ndim(x, 3, "chw_to_rows");
  const int c = x.value().dim(0), hw = x.value().dim(1) * x.value().dim(2);
  Tensor out({hw, c});
  for (int ch = 0; ch < c; ++ch) {
    for (int i = 0; i < hw; ++i) {
      out[static_cast<std::size_t>(i) * c + ch] = x.value()[static_cast<std::size_t>(ch) * hw + i];
    }
  }
  return make_node(std::move(out), {x}, [c, hw](Node& n) {
    Tensor& g = parent(n, 0).grad_buffer();
    for (int ch = 0; ch < c; ++ch) {
      for (int i = 0; i < hw; ++i) {
        g[static_cast<std::size_t>(ch) * hw + i] += n.grad[static_cast<std::size_t>(i) * c + ch];
      }
    }
  });
}

Var gather_rows(const Var& x, const std::vector<int>& idx) {
  require_ndim(x, 2, "gather_rows");
  const int rows = x.value().dim(0), cols = x.value().dim(1);
  if (idx.empty()) throw Error(ErrorCode::kShapeMismatch, "gather_rows: empty index");
  Tensor out({static_cast<int>(idx.size()), cols});
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] < 0 || idx[r] >= rows) {
      throw Error(ErrorCode::kShapeMismatch, "gather_rows: index out of range");
    }
    const double* src = x.value().data() + static_cast<std::size_t>(idx[r]) * cols;
    std::copy(src, src + cols, out.data() + r * cols);
  }
  return make_node(std::move(out), {x}, [idx, cols](Node& n) {
    Tensor& g = parent(n, 0).grad_buffer();
    for (std::size_t r = 0; r < idx.size(); ++r) {
      double* dst = g.data() + static_cast<std::size_t>(idx[r]) * cols;
      const double* src = n.grad.data() + r * cols;
      for (int c = 0; c < cols; ++c) dst[c] += src[c];
    }
  });
}

Var group_weighted_sum(const Var& x, const std::vector<double>& weights, int g) {
  require_ndim(x, 2, "group_weighted_sum");
  const int rows = x.value().dim(0), cols = x.value().dim(1);
  if (g <= 0 || rows % g != 0 || weights.size() != static_cast<std::size_t>(rows)) {
    throw Error(ErrorCode::kShapeMismatch, "group_weighted_sum: bad grouping");
  }
  const int groups = rows / g;
  Tensor out({groups, cols});
  for (int r = 0; r < groups; ++r) {
    for (int c = 0; c < cols; ++c) {
      double s = 0.0;
      for (int k = 0; k < g; ++k) {
        s += weights[static_cast<std::size_t>(r) * g + k] *
             x.value()[(static_cast<std::size_t>(r) * g + k) * cols + c];
      }
      out[static_cast<std::size_t>(r) * cols + c] = s;
    }
  }
  return make_node(std::move(out), {x}, [weights, g, groups, cols](Node& n) {
    Tensor& gx = parent(n, 0).grad_buffer();
    for (int r = 0; r < groups; ++r) {
      for (int k = 0; k < g; ++k) {
        const double wk = weights[static_cast<std::size_t>(r) * g + k];
        for (int c = 0; c < cols; ++c) {
          gx[(static_cast<std::size_t>(r) * g + k) * cols + c] +=
              wk * n.grad[static_cast<std::size_t>(r) * cols + c];
        }
      }
    }
  });
}

Var fourier_features(const Var& amp, const Var& freq, const Var& phase, const Tensor& delta) {
  require_ndim(amp, 2, "fourier_features");
  const int m = amp.value().dim(0), two_f = amp.value().dim(1), f = two_f / 2;
  if (two_f % 2 != 0 || !freq.value().same_shape(amp.value()) || phase.value().ndim() != 2 ||
      phase.value().dim(0) != m || phase.value().dim(1) != f || delta.ndim() != 2 ||
      delta.dim(0) != m || delta.dim(1) != 2) {
    throw Error(ErrorCode::kShapeMismatch, "fourier_features: inconsistent shapes");
  }
  const double pi = std::numbers::pi;
  // Cache cos/sin of the phase for the backward pass.
  auto trig = std::make_shared<std::vector<double>>(static_cast<std::size_t>(m) * two_f);
  Tensor out({m, two_f});
  for (int r = 0; r < m; ++r) {
    const double dx = delta[static_cast<std::size_t>(r) * 2];
    const double dy = delta[static_cast<std::size_t>(r) * 2 + 1];
    const double* a = amp.value().data() + static_cast<std::size_t>(r) * two_f;
    const double* fr = freq.value().data() + static_cast<std::size_t>(r) * two_f;
    const double* ph = phase.value().data() + static_cast<std::size_t>(r) * f;
    double* o = out.data() + static_cast<std::size_t>(r) * two_f;
    double* t = trig->data() + static_cast<std::size_t>(r) * two_f;
    for (int k = 0; k < f; ++k) {
      const double arg = pi * (fr[k] * dx + fr[f + k] * dy + ph[k]);
      t[k] = std::cos(arg);
      t[f + k] = std::sin(arg);
      o[k] = a[k] * t[k];
      o[f + k] = a[f + k] * t[f + k];
    }
  }
  return make_node(std::move(out), {amp, freq, phase}, [delta, trig, m, f, two_f, pi](Node& n) {
    Node& pa = parent(n, 0);
    Node& pf = parent(n, 1);
    Node& pp = parent(n, 2);
    double* ga = pa.requires_grad ? pa.grad_buffer().data() : nullptr;
    double* gf = pf.requires_grad ? pf.grad_buffer().data() : nullptr;
    double* gp = pp.requires_grad ? pp.grad_buffer().data() : nullptr;
    for (int r = 0; r < m; ++r) {
      const double dx = delta[static_cast<std::size_t>(r) * 2];
      const double dy = delta[static_cast<std::size_t>(r) * 2 + 1];
      const std::size_t row = static_cast<std::size_t>(r) * two_f;
      const double* a = pa.value.data() + row;
      const double* t = trig->data() + row;
      const double* go = n.grad.data() + row;
      for (int k = 0; k < f; ++k) {
        const double c = t[k], s = t[f + k];
        if (ga) {
          ga[row + k] += go[k] * c;
          ga[row + f + k] += go[f + k] * s;
        }
        // d/d(arg) of a_c cos(arg) + a_s sin(arg), times pi
        const double darg = pi * (-go[k] * a[k] * s + go[f + k] * a[f + k] * c);
        if (gf) {
          gf[row + k] += darg * dx;
          gf[row + f + k] += darg * dy;
        }
        if (gp) gp[static_cast<std::size_t>(r) * f + k] += darg;
      }
    }
  });
}

Var sum(const Var& x) {
  double s = 0.0;
  for (double v : x.value().values()) s += v;
  return make_node(Tensor::scalar(s), {x}, [](Node& n) {
    Tensor& g = parent(n, 0).grad_buffer();
    const double go = n.grad[0];
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += go;
  });
}

Var sum_abs(const Var& x) {
  double s = 0.0;
  for (double v : x.value().values()) s += std::abs(v);
  return make_node(Tensor::scalar(s), {x}, [](Node& n) {
    Node& p = parent(n, 0);
    Tensor& g = p.grad_buffer();
    const double go = n.grad[0];
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double v = p.value[i];
      g[i] += go * (v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0));
    }
  });
}

Var sum_sq(const Var& x) {
  double s = 0.0;
  for (double v : x.value().values()) s += v * v;
  return make_node(Tensor::scalar(s), {x}, [](Node& n) {
    Node& p = parent(n, 0);
    Tensor& g = p.grad_buffer();
    const double go = n.grad[0];
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += 2.0 * go * p.value[i];
  });
}

Var channel_affine(const Var& x, const std::array<std::array<double, 3>, 3>& m,
                   const std::array<double, 3>& offset) {
  require_ndim(x, 3, "channel_affine");
  if (x.value().dim(0) != 3) throw Error(ErrorCode::kShapeMismatch, "channel_affine: needs 3 channels");
  const std::size_t hw = static_cast<std::size_t>(x.value().dim(1)) * x.value().dim(2);
  Tensor out(x.value().shape());
  for (int o = 0; o < 3; ++o) {
    for (std::size_t i = 0; i < hw; ++i) {
      double s = offset[o];
      for (int c = 0; c < 3; ++c) s += m[o][c] * x.value()[c * hw + i];
      out[o * hw + i] = s;
    }
  }
  return make_node(std::move(out), {x}, [m, hw](Node& n) {
    Tensor& g = parent(n, 0).grad_buffer();
    for (int c = 0; c < 3; ++c) {
      for (std::size_t i = 0; i < hw; ++i) {
        double s = 0.0;
        for (int o = 0; o < 3; ++o) s += m[o][c] * n.grad[o * hw + i];
        g[c * hw + i] += s;
      }
    }
  });
}

namespace {

const std::array<double, 64>& dct_matrix() {
  // basis[k * 8 + i] = c(k) cos((2i + 1) k pi / 16)
  static const std::array<double, 64> m = [] {
    std::array<double, 64> b{};
    for (int k = 0; k < 8; ++k) {
      const double ck = k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int i = 0; i < 8; ++i) {
        b[k * 8 + i] = ck * std::cos((2 * i + 1) * k * std::numbers::pi / 16.0);
      }
    }
    return b;
  }();
  return m;
}

// Applies the separable 8x8 transform (forward: M X M^T, inverse: M^T X M) in place
// on every block of a [C, H, W] buffer.
void transform_blocks(const double* in, double* out, int c, int h, int w, bool inverse) {
  const auto& b = dct_matrix();
  double tmp[64];
  for (int ch = 0; ch < c; ++ch) {
    for (int by = 0; by < h; by += 8) {
      for (int bx = 0; bx < w; bx += 8) {
        auto at = [&](const double* p, int y, int x) {
          return p[(static_cast<std::size_t>(ch) * h + by + y) * w + bx + x];
        };
        // rows
        for (int y = 0; y < 8; ++y) {
          for (int k = 0; k < 8; ++k) {
            double s = 0.0;
            for (int i = 0; i < 8; ++i) {
              s += (inverse ? b[i * 8 + k] : b[k * 8 + i]) * at(in, y, i);
            }
            tmp[y * 8 + k] = s;
          }
        }
        // columns
        for (int x = 0; x < 8; ++x) {
          for (int k = 0; k < 8; ++k) {
            double s = 0.0;
            for (int i = 0; i < 8; ++i) {
              s += (inverse ? b[i * 8 + k] : b[k * 8 + i]) * tmp[i * 8 + x];
            }
            out[(static_cast<std::size_t>(ch) * h + by + k) * w + bx + x] = s;
          }
        }
      }
    }
  }
}

}  // namespace

Var block_dct(const Var& x, bool inverse) {
  require_ndim(x, 3, "block_dct");
  const int c = x.value().dim(0), h = x.value().dim(1), w = x.value().dim(2);
  if (h % 8 != 0 || w % 8 != 0) {
    throw Error(ErrorCode::kShapeMismatch, "block_dct: dimensions must be multiples of 8");
  }
  Tensor out(x.value().shape());
  transform_blocks(x.value().data(), out.data(), c, h, w, inverse);
  return make_node(std::move(out), {x}, [c, h, w, inverse](Node& n) {
    // Orthonormal: the adjoint of the transform is its inverse.
    Tensor back(n.grad.shape());
    transform_blocks(n.grad.data(), back.data(), c, h, w, !inverse);
    Tensor& g = parent(n, 0).grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += back[i];
  });
}

Var block_scale(const Var& x, const std::vector<std::array<double, 64>>& table) {
  require_ndim(x, 3, "block_scale");
  const int c = x.value().dim(0), h = x.value().dim(1), w = x.value().dim(2);
  if (table.size() != static_cast<std::size_t>(c)) {
    throw Error(ErrorCode::kShapeMismatch, "block_scale: one table per channel required");
  }
  Tensor out(x.value().shape());
  for (int ch = 0; ch < c; ++ch) {
    for (int y = 0; y < h; ++y) {
      for (int xx = 0; xx < w; ++xx) {
        const std::size_t i = (static_cast<std::size_t>(ch) * h + y) * w + xx;
        out[i] = x.value()[i] * table[ch][(y % 8) * 8 + xx % 8];
      }
    }
  }
  return make_node(std::move(out), {x}, [table, c, h, w](Node& n) {
    Tensor& g = parent(n, 0).grad_buffer();
    for (int ch = 0; ch < c; ++ch) {
      for (int y = 0; y < h; ++y) {
        for (int xx = 0; xx < w; ++xx) {
          const std::size_t i = (static_cast<std::size_t>(ch) * h + y) * w + xx;
          g[i] += n.grad[i] * table[ch][(y % 8) * 8 + xx % 8];
        }
      }
    }
  });
}

Var round_ste(const Var& x) {
  Tensor out = x.value();
  for (double& v : out.values()) v = std::nearbyint(v);
  return make_node(std::move(out), {x}, [](Node& n) {
    Tensor& g = parent(n, 0).grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
  });
}

}  // namespace omnivr::nn
