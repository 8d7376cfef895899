#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "omnivr/image.hpp"

namespace omnivr {

// PNG (8/16-bit, gray or RGB, alpha dropped), binary PPM (P6) and baseline JPEG
// by file extension. Samples are scaled to [0, 1].
Image read_image(const std::string& path);
// 8-bit RGB PNG; samples are clamped and rounded.
void write_png(const std::string& path, const Image& img);
void write_ppm(const std::string& path, const Image& img);

std::vector<std::uint8_t> read_bytes(const std::string& path);
void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes);

// Rounds to the 8-bit grid, as a PNG write/read roundtrip would.
Image quantize_8bit(const Image& img);

}  // namespace omnivr
