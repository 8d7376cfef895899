#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace omnivr::codec::detail {

// Canonical Huffman table as carried by DHT: counts per code length 1..16 and
// the symbols in code order.
struct HuffSpec {
  std::array<std::uint8_t, 16> counts{};
  std::vector<std::uint8_t> symbols;
};

struct HuffCodes {
  std::array<std::uint16_t, 256> code{};
  std::array<std::uint8_t, 256> size{};  // 0 = symbol absent
};

const HuffSpec& std_dc_luma();
const HuffSpec& std_ac_luma();
const HuffSpec& std_dc_chroma();
const HuffSpec& std_ac_chroma();

HuffCodes build_codes(const HuffSpec& spec);
// Length-limited (16 bit) code from symbol frequencies; one code point is
// reserved so no code is all ones.
HuffSpec optimal_spec(const std::array<long long, 256>& freq);

// Number of magnitude bits of a coefficient value (its category).
inline int magnitude_category(int v) {
  unsigned a = static_cast<unsigned>(v < 0 ? -v : v);
  int n = 0;
  while (a) {
    ++n;
    a >>= 1;
  }
  return n;
}

}  // namespace omnivr::codec::detail
