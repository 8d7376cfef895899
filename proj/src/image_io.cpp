#include "omnivr/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include "omnivr/codec/jpeg.hpp"
#include "omnivr/error.hpp"

namespace omnivr {

namespace {

std::string extension(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

Image read_png(const std::string& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw Error(ErrorCode::kIo, "cannot read PNG " + path + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    png_image_free(&image);
    throw Error(ErrorCode::kIo, "cannot decode PNG " + path + ": " + image.message);
  }
  Image img(static_cast<int>(image.width), static_cast<int>(image.height));
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        img.at(c, y, x) = buf[(static_cast<std::size_t>(y) * img.width() + x) * 3 + c] / 255.0;
      }
    }
  }
  return img;
}

Image read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P6") throw Error(ErrorCode::kIo, path + " is not a binary PPM");
  auto next_int = [&]() {
    int v = 0;
    for (;;) {
      in >> std::ws;
      if (in.peek() == '#') {
        std::string skip;
        std::getline(in, skip);
        continue;
      }
      break;
    }
    if (!(in >> v)) throw Error(ErrorCode::kIo, "bad PPM header in " + path);
    return v;
  };
  const int w = next_int(), h = next_int(), maxval = next_int();
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) throw Error(ErrorCode::kIo, "bad PPM header in " + path);
  in.get();
  const int bps = maxval > 255 ? 2 : 1;
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(w) * h * 3 * bps);
  if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()))) {
    throw Error(ErrorCode::kIo, "truncated PPM " + path);
  }
  Image img(w, h);
  for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i) {
    for (int c = 0; c < 3; ++c) {
      const std::size_t k = (i * 3 + c) * bps;
      const int v = bps == 2 ? (buf[k] << 8 | buf[k + 1]) : buf[k];
      img.plane(c)[i] = static_cast<double>(v) / maxval;
    }
  }
  return img;
}

}  // namespace

Image read_image(const std::string& path) {
  const std::string ext = extension(path);
  if (ext == "png") return read_png(path);
  if (ext == "ppm" || ext == "pnm") return read_ppm(path);
  if (ext == "jpg" || ext == "jpeg") return codec::decode(read_bytes(path));
  throw Error(ErrorCode::kIo, "unsupported image format: " + path);
}

void write_png(const std::string& path, const Image& img) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(img.width()) * img.height() * 3);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        buf[(static_cast<std::size_t>(y) * img.width() + x) * 3 + c] = to_byte(img.at(c, y, x));
      }
    }
  }
  if (!png_image_write_to_file(&image, path.c_str(), 0, buf.data(), 0, nullptr)) {
    throw Error(ErrorCode::kIo, "cannot write PNG " + path + ": " + image.message);
  }
}

void write_ppm(const std::string& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
  out << "P6\n" << img.width() << " " << img.height() << "\n255\n";
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) out.put(static_cast<char>(to_byte(img.at(c, y, x))));
    }
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

Image quantize_8bit(const Image& img) {
  Image out = img;
  for (double& v : out.data()) v = to_byte(v) / 255.0;
  return out;
}

}  // namespace omnivr
