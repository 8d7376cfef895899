#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "omnivr/error.hpp"

namespace omnivr {

using Rgb = std::array<double, 3>;

// Planar RGB raster (channel-major, then row-major), samples nominally in [0, 1].
// Used for full ERP panoramas, cropped patches and rendered viewports alike.
class Image {
 public:
  static constexpr int kChannels = 3;

  Image() = default;
  Image(int width, int height, double fill = 0.0)
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(kChannels) * width * height, fill) {
    if (width <= 0 || height <= 0) {
      throw Error(ErrorCode::kInvalidArgument, "image dimensions must be positive");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t plane_size() const noexcept {
    return static_cast<std::size_t>(width_) * height_;
  }
  bool empty() const noexcept { return data_.empty(); }

  double& at(int c, int y, int x) noexcept { return data_[index(c, y, x)]; }
  double at(int c, int y, int x) const noexcept { return data_[index(c, y, x)]; }

  Rgb pixel(int y, int x) const noexcept {
    return {at(0, y, x), at(1, y, x), at(2, y, x)};
  }
  void set_pixel(int y, int x, const Rgb& v) noexcept {
    for (int c = 0; c < kChannels; ++c) at(c, y, x) = v[c];
  }

  std::span<double> plane(int c) noexcept {
    return {data_.data() + c * plane_size(), plane_size()};
  }
  std::span<const double> plane(int c) const noexcept {
    return {data_.data() + c * plane_size(), plane_size()};
  }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int c, int y, int x) const noexcept {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

// Circular shift of all columns to the right by `k` (negative k shifts left).
Image roll_columns(const Image& img, int k);

}  // namespace omnivr
