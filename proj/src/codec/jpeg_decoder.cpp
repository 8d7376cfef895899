#include <algorithm>
#include <optional>

#include "huffman.hpp"
#include "omnivr/codec/jpeg.hpp"
#include "omnivr/error.hpp"

namespace omnivr::codec {

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedStream, what);
}

struct HuffDecoder {
  std::array<int, 17> first_code{};  // first canonical code of each length
  std::array<int, 17> count{};
  std::array<int, 17> offset{};  // index into symbols of the first code of each length
  std::vector<std::uint8_t> symbols;
  bool defined = false;
};

HuffDecoder make_decoder(const detail::HuffSpec& spec) {
  HuffDecoder d;
  d.symbols = spec.symbols;
  int code = 0, k = 0;
  for (int len = 1; len <= 16; ++len) {
    d.first_code[len] = code;
    d.count[len] = spec.counts[len - 1];
    d.offset[len] = k;
    code += d.count[len];
    k += d.count[len];
    if (code > (1 << len)) malformed("over-subscribed huffman table");
    code <<= 1;
  }
  d.defined = true;
  return d;
}

class BitReader {
 public:
  BitReader(const std::vector<std::uint8_t>& data, std::size_t pos) : data_(data), pos_(pos) {}

  int bit() {
    if (left_ == 0) load();
    --left_;
    return (cur_ >> left_) & 1;
  }

  unsigned bits(int n) {
    unsigned v = 0;
    for (int i = 0; i < n; ++i) v = v << 1 | static_cast<unsigned>(bit());
    return v;
  }

  int decode(const HuffDecoder& h) {
    if (!h.defined) malformed("scan references an undefined huffman table");
    int code = 0;
    for (int len = 1; len <= 16; ++len) {
      code = code << 1 | bit();
      const int idx = code - h.first_code[len];
      if (idx >= 0 && idx < h.count[len]) return h.symbols[h.offset[len] + idx];
    }
    malformed("invalid huffman code");
  }

  // Position just after the entropy-coded data.
  std::size_t position() const { return pos_; }

 private:
  void load() {
    if (pos_ >= data_.size()) malformed("stream truncated inside entropy-coded data");
    const std::uint8_t b = data_[pos_];
    if (b == 0xFF) {
      if (pos_ + 1 >= data_.size()) malformed("stream truncated inside entropy-coded data");
      if (data_[pos_ + 1] != 0x00) malformed("marker inside entropy-coded data");
      pos_ += 2;
    } else {
      pos_ += 1;
    }
    cur_ = b;
    left_ = 8;
  }

  const std::vector<std::uint8_t>& data_;
  std::size_t pos_;
  unsigned cur_ = 0;
  int left_ = 0;
};

int extend(unsigned v, int s) {
  if (s == 0) return 0;
  return v < (1u << (s - 1)) ? static_cast<int>(v) - (1 << s) + 1 : static_cast<int>(v);
}

struct Component {
  int id = 0;
  int tq = 0;
  int dc_table = 0;
  int ac_table = 0;
};

}  // namespace

DecodeResult decode_full(const std::vector<std::uint8_t>& bytes) {
  const std::size_t n = bytes.size();
  if (n < 4 || bytes[0] != 0xFF || bytes[1] != 0xD8) malformed("missing SOI");
  std::size_t pos = 2;
  std::array<std::optional<std::array<int, 64>>, 4> qtables;
  std::array<HuffDecoder, 4> dc_tables, ac_tables;
  std::vector<Component> comps;
  int width = 0, height = 0;
  bool have_frame = false;
  std::optional<CoeffBlocks> blocks;

  auto u16 = [&](std::size_t at) {
    if (at + 1 >= n) malformed("stream truncated");
    return static_cast<int>(bytes[at]) << 8 | bytes[at + 1];
  };

  for (;;) {
    if (pos + 1 >= n) malformed("stream ended without EOI");
    if (bytes[pos] != 0xFF) malformed("expected a marker");
    const std::uint8_t m = bytes[pos + 1];
    pos += 2;
    if (m == 0xFF) {  // fill byte
      --pos;
      continue;
    }
    if (m == 0xD9) break;  // EOI
    if (m == 0xD8 || (m >= 0xD0 && m <= 0xD7) || m == 0x01) malformed("unexpected marker");
    const int len = u16(pos);
    if (len < 2 || pos + static_cast<std::size_t>(len) > n) malformed("segment overruns stream");
    const std::size_t seg = pos + 2;
    const std::size_t seg_end = pos + static_cast<std::size_t>(len);
    pos = seg_end;

    if (m == 0xDB) {
      std::size_t p = seg;
      while (p < seg_end) {
        const int pq = bytes[p] >> 4, tq = bytes[p] & 15;
        ++p;
        if (tq > 3 || pq > 1) malformed("bad DQT table spec");
        const std::size_t need = pq ? 128 : 64;
        if (p + need > seg_end) malformed("DQT truncated");
        std::array<int, 64> t{};
        const auto& zz = zigzag_to_natural();
        for (int k = 0; k < 64; ++k) {
          t[zz[k]] = pq ? (bytes[p + 2 * k] << 8 | bytes[p + 2 * k + 1]) : bytes[p + k];
          if (t[zz[k]] == 0) malformed("zero quantization entry");
        }
        p += need;
        qtables[tq] = t;
      }
    } else if (m == 0xC4) {
      std::size_t p = seg;
      while (p < seg_end) {
        const int tc = bytes[p] >> 4, th = bytes[p] & 15;
        ++p;
        if (tc > 1 || th > 3 || p + 16 > seg_end) malformed("bad DHT table spec");
        detail::HuffSpec spec;
        int total = 0;
        for (int i = 0; i < 16; ++i) {
          spec.counts[i] = bytes[p + i];
          total += spec.counts[i];
        }
        p += 16;
        if (total > 256 || p + static_cast<std::size_t>(total) > seg_end) malformed("DHT truncated");
        spec.symbols.assign(bytes.begin() + static_cast<long>(p), bytes.begin() + static_cast<long>(p) + total);
        p += static_cast<std::size_t>(total);
        (tc == 0 ? dc_tables : ac_tables)[th] = make_decoder(spec);
      }
    } else if (m == 0xC0 || m == 0xC1) {
      if (have_frame) malformed("multiple frames");
      if (len < 8 || bytes[seg] != 8) malformed("only 8-bit precision is supported");
      height = u16(seg + 1);
      width = u16(seg + 3);
      const int nc = bytes[seg + 5];
      if (width == 0 || height == 0) malformed("zero image dimension");
      if ((nc != 1 && nc != 3) || len != 8 + 3 * nc) malformed("unsupported component count");
      for (int c = 0; c < nc; ++c) {
        const std::size_t p = seg + 6 + 3 * static_cast<std::size_t>(c);
        if (bytes[p + 1] != 0x11) malformed("chroma subsampling is not supported");
        if (bytes[p + 2] > 3) malformed("bad quantization table index");
        comps.push_back({bytes[p], bytes[p + 2], 0, 0});
      }
      have_frame = true;
    } else if (m == 0xDA) {
      if (!have_frame) malformed("scan before frame header");
      const int ns = bytes[seg];
      if (ns != static_cast<int>(comps.size()) || len != 6 + 2 * ns) {
        malformed("only single interleaved scans are supported");
      }
      for (int i = 0; i < ns; ++i) {
        const int id = bytes[seg + 1 + 2 * i];
        const int tables = bytes[seg + 2 + 2 * i];
        auto it = std::find_if(comps.begin(), comps.end(), [&](const Component& c) { return c.id == id; });
        if (it == comps.end()) malformed("scan references unknown component");
        it->dc_table = tables >> 4;
        it->ac_table = tables & 15;
        if (it->dc_table > 3 || it->ac_table > 3) malformed("bad huffman table index");
      }
      const std::size_t tail = seg + 1 + 2 * static_cast<std::size_t>(ns);
      if (bytes[tail] != 0 || bytes[tail + 1] != 63 || bytes[tail + 2] != 0) {
        malformed("not a baseline sequential scan");
      }
      CoeffBlocks cb;
      cb.blocks_w = (width + 7) / 8;
      cb.blocks_h = (height + 7) / 8;
      for (std::size_t c = 0; c < comps.size(); ++c) cb.channels[c].resize(cb.block_count());
      BitReader br(bytes, seg_end);
      std::array<int, 3> pred{};
      const auto& zz = zigzag_to_natural();
      (void)zz;
      for (std::size_t b = 0; b < cb.block_count(); ++b) {
        for (std::size_t c = 0; c < comps.size(); ++c) {
          auto& blk = cb.channels[c][b];
          blk.fill(0);
          const int s = br.decode(dc_tables[comps[c].dc_table]);
          if (s > 11) malformed("bad DC category");
          pred[c] += extend(br.bits(s), s);
          blk[0] = pred[c];
          for (int k = 1; k < 64;) {
            const int rs = br.decode(ac_tables[comps[c].ac_table]);
            const int r = rs >> 4, sz = rs & 15;
            if (sz == 0) {
              if (r == 15) {
                k += 16;
                continue;
              }
              if (r != 0) malformed("bad AC symbol");
              break;  // EOB
            }
            k += r;
            if (k > 63 || sz > 10) malformed("AC coefficient index out of range");
            blk[k++] = extend(br.bits(sz), sz);
          }
        }
      }
      pos = br.position();
      blocks = std::move(cb);
    } else if ((m >= 0xE0 && m <= 0xEF) || m == 0xFE) {
      // application data and comments are skipped
    } else if (m == 0xDD) {
      if (u16(seg) != 0) malformed("restart intervals are not supported");
    } else {
      malformed("unsupported marker");
    }
  }
  if (!blocks) malformed("no scan data");

  DecodeResult out;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    if (!qtables[comps[c].tq]) malformed("missing quantization table");
    for (int i = 0; i < 64; ++i) {
      if ((*qtables[comps[c].tq])[i] > 255) malformed("16-bit tables are not supported");
    }
  }
  out.tables.luma = *qtables[comps[0].tq];
  out.tables.chroma = comps.size() == 3 ? *qtables[comps[1].tq] : out.tables.luma;
  if (comps.size() == 3 && *qtables[comps[2].tq] != out.tables.chroma) {
    malformed("Cb and Cr must share a quantization table");
  }
  if (comps.size() == 1) {
    // Grayscale: neutral chroma so the shared reconstruction path applies.
    blocks->channels[1].assign(blocks->block_count(), std::array<int, 64>{});
    blocks->channels[2].assign(blocks->block_count(), std::array<int, 64>{});
  }
  out.blocks = std::move(*blocks);
  out.image = reconstruct(out.blocks, out.tables, width, height);
  return out;
}

Image decode(const std::vector<std::uint8_t>& bytes) { return decode_full(bytes).image; }

}  // namespace omnivr::codec
