#include <algorithm>
#include <climits>

#include "huffman.hpp"
#include "omnivr/codec/jpeg.hpp"
#include "omnivr/error.hpp"

namespace omnivr::codec {

namespace detail {

namespace {

HuffSpec make_spec(std::array<std::uint8_t, 16> counts, std::vector<std::uint8_t> symbols) {
  return {counts, std::move(symbols)};
}

// The AC symbol lists end with every (run, size) pair not yet listed, in
// ascending order. The explicit prefixes below are the distinct leading part.
std::vector<std::uint8_t> ac_symbols(std::vector<std::uint8_t> prefix) {
  std::vector<bool> seen(256, false);
  for (auto s : prefix) seen[s] = true;
  for (int run = 0; run < 16; ++run) {
    for (int size = 1; size <= 10; ++size) {
      const int s = run << 4 | size;
      if (!seen[s]) prefix.push_back(static_cast<std::uint8_t>(s));
    }
  }
  return prefix;
}

}  // namespace

const HuffSpec& std_dc_luma() {
  static const HuffSpec s =
      make_spec({0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0}, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
  return s;
}

const HuffSpec& std_dc_chroma() {
  static const HuffSpec s =
      make_spec({0, 3, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0}, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
  return s;
}

const HuffSpec& std_ac_luma() {
  static const HuffSpec s = make_spec(
      {0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7d},
      ac_symbols({0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06, 0x13, 0x51,
                  0x61, 0x07, 0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xa1, 0x08, 0x23, 0x42, 0xb1, 0xc1,
                  0x15, 0x52, 0xd1, 0xf0, 0x24, 0x33, 0x62, 0x72, 0x82, 0x09, 0x0a, 0x16}));
  return s;
}

const HuffSpec& std_ac_chroma() {
  static const HuffSpec s = make_spec(
      {0, 2, 1, 2, 4, 4, 3, 4, 7, 5, 4, 4, 0, 1, 2, 0x77},
      ac_symbols({0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41, 0x51,
                  0x07, 0x61, 0x71, 0x13, 0x22, 0x32, 0x81, 0x08, 0x14, 0x42, 0x91, 0xa1, 0xb1,
                  0xc1, 0x09, 0x23, 0x33, 0x52, 0xf0, 0x15, 0x62, 0x72, 0xd1, 0x0a, 0x16, 0x24,
                  0x34, 0xe1, 0x25, 0xf1}));
  return s;
}

HuffCodes build_codes(const HuffSpec& spec) {
  HuffCodes out;
  unsigned code = 0;
  std::size_t k = 0;
  for (int len = 1; len <= 16; ++len) {
    for (int i = 0; i < spec.counts[len - 1]; ++i) {
      const auto sym = spec.symbols.at(k++);
      out.code[sym] = static_cast<std::uint16_t>(code);
      out.size[sym] = static_cast<std::uint8_t>(len);
      ++code;
    }
    code <<= 1;
  }
  return out;
}

HuffSpec optimal_spec(const std::array<long long, 256>& freq_in) {
  std::array<long long, 257> freq{};
  std::copy(freq_in.begin(), freq_in.end(), freq.begin());
  freq[256] = 1;  // reserved so that no real code is all ones
  std::array<int, 257> codesize{};
  std::array<int, 257> others;
  others.fill(-1);
  for (;;) {
    int c1 = -1, c2 = -1;
    long long v = LLONG_MAX;
    for (int i = 0; i <= 256; ++i) {
      if (freq[i] && freq[i] <= v) {
        v = freq[i];
        c1 = i;
      }
    }
    v = LLONG_MAX;
    for (int i = 0; i <= 256; ++i) {
      if (freq[i] && freq[i] <= v && i != c1) {
        v = freq[i];
        c2 = i;
      }
    }
    if (c2 < 0) break;
    freq[c1] += freq[c2];
    freq[c2] = 0;
    ++codesize[c1];
    while (others[c1] >= 0) {
      c1 = others[c1];
      ++codesize[c1];
    }
    others[c1] = c2;
    ++codesize[c2];
    while (others[c2] >= 0) {
      c2 = others[c2];
      ++codesize[c2];
    }
  }
  std::array<int, 33> bits{};
  for (int i = 0; i <= 256; ++i) {
    if (codesize[i]) {
      if (codesize[i] > 32) throw Error(ErrorCode::kInvalidArgument, "huffman code too long");
      ++bits[codesize[i]];
    }
  }
  // Shorten codes longer than 16 bits, keeping the prefix property.
  for (int i = 32; i > 16; --i) {
    while (bits[i] > 0) {
      int j = i - 2;
      while (bits[j] == 0) --j;
      bits[i] -= 2;
      bits[i - 1] += 1;
      bits[j + 1] += 2;
      bits[j] -= 1;
    }
  }
  int i = 16;
  while (bits[i] == 0) --i;
  bits[i] -= 1;  // drop the reserved symbol
  HuffSpec spec;
  for (int l = 1; l <= 16; ++l) spec.counts[l - 1] = static_cast<std::uint8_t>(bits[l]);
  for (int l = 1; l <= 32; ++l) {
    for (int s = 0; s < 256; ++s) {
      if (codesize[s] == l) spec.symbols.push_back(static_cast<std::uint8_t>(s));
    }
  }
  return spec;
}

}  // namespace detail

namespace {

using detail::HuffCodes;
using detail::HuffSpec;
using detail::magnitude_category;

class BitWriter {
 public:
  explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  void put(unsigned value, int nbits) {
    for (int i = nbits - 1; i >= 0; --i) {
      acc_ = static_cast<std::uint8_t>(acc_ << 1 | ((value >> i) & 1u));
      if (++filled_ == 8) flush_byte();
    }
  }

  // Pads the final byte with ones.
  void finish() {
    while (filled_ != 0) put(1, 1);
  }

 private:
  void flush_byte() {
    out_.push_back(acc_);
    if (acc_ == 0xFF) out_.push_back(0x00);
    acc_ = 0;
    filled_ = 0;
  }

  std::vector<std::uint8_t>& out_;
  std::uint8_t acc_ = 0;
  int filled_ = 0;
};

// Walks the entropy-coding symbols in stream order. `sink(table, symbol,
// extra_bits, extra_count)` with table 0..3 = DC luma, AC luma, DC chroma, AC chroma.
template <typename Sink>
void walk_symbols(const CoeffBlocks& blocks, int n_comp, Sink&& sink) {
  std::array<int, 3> pred{};
  for (std::size_t b = 0; b < blocks.block_count(); ++b) {
    for (int c = 0; c < n_comp; ++c) {
      const auto& blk = blocks.channels[c][b];
      const int dc_table = c == 0 ? 0 : 2;
      const int ac_table = dc_table + 1;
      const int diff = blk[0] - pred[c];
      pred[c] = blk[0];
      int s = magnitude_category(diff);
      sink(dc_table, s, static_cast<unsigned>(diff < 0 ? diff - 1 : diff) & ((1u << s) - 1), s);
      int run = 0;
      for (int k = 1; k < 64; ++k) {
        const int v = blk[k];
        if (v == 0) {
          ++run;
          continue;
        }
        while (run > 15) {
          sink(ac_table, 0xF0, 0u, 0);
          run -= 16;
        }
        s = magnitude_category(v);
        sink(ac_table, run << 4 | s, static_cast<unsigned>(v < 0 ? v - 1 : v) & ((1u << s) - 1), s);
        run = 0;
      }
      if (run > 0) sink(ac_table, 0x00, 0u, 0);
    }
  }
}

void put_u16(std::vector<std::uint8_t>& out, unsigned v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

void put_marker(std::vector<std::uint8_t>& out, std::uint8_t m) {
  out.push_back(0xFF);
  out.push_back(m);
}

}  // namespace

std::vector<std::uint8_t> write_stream(const CoeffBlocks& blocks, const QuantTables& q, int width,
                                       int height, HuffmanMode mode) {
  if (width <= 0 || height <= 0 || width > 65535 || height > 65535 ||
      blocks.blocks_w != (width + 7) / 8 || blocks.blocks_h != (height + 7) / 8) {
    throw Error(ErrorCode::kInvalidArgument, "block grid does not match image size");
  }
  const int n_comp = 3;
  std::array<HuffSpec, 4> specs;
  if (mode == HuffmanMode::kStandard) {
    specs = {detail::std_dc_luma(), detail::std_ac_luma(), detail::std_dc_chroma(),
             detail::std_ac_chroma()};
  } else {
    std::array<std::array<long long, 256>, 4> freq{};
    walk_symbols(blocks, n_comp, [&](int t, int sym, unsigned, int) { ++freq[t][sym]; });
    for (int t = 0; t < 4; ++t) specs[t] = detail::optimal_spec(freq[t]);
  }
  std::array<HuffCodes, 4> codes;
  for (int t = 0; t < 4; ++t) codes[t] = detail::build_codes(specs[t]);

  std::vector<std::uint8_t> out;
  out.reserve(1024 + blocks.block_count() * 24);
  put_marker(out, 0xD8);  // SOI

  put_marker(out, 0xE0);  // APP0 JFIF
  put_u16(out, 16);
  for (char ch : {'J', 'F', 'I', 'F', '\0'}) out.push_back(static_cast<std::uint8_t>(ch));
  out.insert(out.end(), {1, 1, 0, 0, 1, 0, 1, 0, 0});

  put_marker(out, 0xDB);  // DQT, both tables, 8-bit, zigzag order
  put_u16(out, 2 + 2 * 65);
  const auto& zz = zigzag_to_natural();
  for (int id = 0; id < 2; ++id) {
    const auto& t = id == 0 ? q.luma : q.chroma;
    out.push_back(static_cast<std::uint8_t>(id));
    for (int k = 0; k < 64; ++k) {
      if (t[zz[k]] < 1 || t[zz[k]] > 255) {
        throw Error(ErrorCode::kInvalidArgument, "quantization entries must be in [1, 255]");
      }
      out.push_back(static_cast<std::uint8_t>(t[zz[k]]));
    }
  }

  put_marker(out, 0xC0);  // SOF0
  put_u16(out, 8 + 3 * n_comp);
  out.push_back(8);
  put_u16(out, static_cast<unsigned>(height));
  put_u16(out, static_cast<unsigned>(width));
  out.push_back(static_cast<std::uint8_t>(n_comp));
  for (int c = 0; c < n_comp; ++c) {
    out.push_back(static_cast<std::uint8_t>(c + 1));
    out.push_back(0x11);
    out.push_back(c == 0 ? 0 : 1);
  }

  put_marker(out, 0xC4);  // DHT
  std::size_t dht_len = 2;
  for (const auto& s : specs) dht_len += 17 + s.symbols.size();
  put_u16(out, static_cast<unsigned>(dht_len));
  const std::uint8_t classes[4] = {0x00, 0x10, 0x01, 0x11};
  for (int t = 0; t < 4; ++t) {
    out.push_back(classes[t]);
    out.insert(out.end(), specs[t].counts.begin(), specs[t].counts.end());
    out.insert(out.end(), specs[t].symbols.begin(), specs[t].symbols.end());
  }

  put_marker(out, 0xDA);  // SOS
  put_u16(out, 6 + 2 * n_comp);
  out.push_back(static_cast<std::uint8_t>(n_comp));
  for (int c = 0; c < n_comp; ++c) {
    out.push_back(static_cast<std::uint8_t>(c + 1));
    out.push_back(c == 0 ? 0x00 : 0x11);
  }
  out.insert(out.end(), {0, 63, 0});

  BitWriter bw(out);
  walk_symbols(blocks, n_comp, [&](int t, int sym, unsigned extra, int n_extra) {
    if (codes[t].size[sym] == 0) throw Error(ErrorCode::kInvalidArgument, "symbol missing from table");
    bw.put(codes[t].code[sym], codes[t].size[sym]);
    if (n_extra) bw.put(extra, n_extra);
  });
  bw.finish();
  put_marker(out, 0xD9);  // EOI
  return out;
}

EncodeResult encode(const Image& img, const QuantTables& q, HuffmanMode mode) {
  EncodeResult r;
  r.blocks = forward_quantize(img, q);
  r.bytes = write_stream(r.blocks, q, img.width(), img.height(), mode);
  return r;
}

}  // namespace omnivr::codec
