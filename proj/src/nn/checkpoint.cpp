#include "omnivr/nn/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "omnivr/error.hpp"

namespace omnivr::nn {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

constexpr char kMagic[8] = {'O', 'V', 'R', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kMaxLen = 1u << 30;

void put_u32(std::ostream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void put_str(std::ostream& os, const std::string& s) {
  put_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t get_u32(std::istream& is) {
  std::uint32_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), 4)) {
    throw Error(ErrorCode::kIo, "checkpoint truncated");
  }
  return v;
}
std::string get_str(std::istream& is) {
  const std::uint32_t n = get_u32(is);
  if (n > kMaxLen) throw Error(ErrorCode::kIo, "checkpoint string too long");
  std::string s(n, '\0');
  if (!is.read(s.data(), n)) throw Error(ErrorCode::kIo, "checkpoint truncated");
  return s;
}

}  // namespace

void write_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
  os.write(kMagic, 8);
  put_u32(os, kVersion);
  put_u32(os, static_cast<std::uint32_t>(ckpt.meta.size()));
  for (const auto& [k, v] : ckpt.meta) {
    put_str(os, k);
    put_str(os, v);
  }
  put_u32(os, static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, t] : ckpt.tensors) {
    put_str(os, name);
    put_u32(os, static_cast<std::uint32_t>(t.ndim()));
    for (int d : t.shape()) {
      const std::int32_t di = d;
      os.write(reinterpret_cast<const char*>(&di), 4);
    }
    os.write(reinterpret_cast<const char*>(t.data()),
             static_cast<std::streamsize>(t.size() * sizeof(double)));
  }
  if (!os) throw Error(ErrorCode::kIo, "write failed for " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kIo, "cannot open " + path);
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
    throw Error(ErrorCode::kIo, path + " is not a checkpoint");
  }
  if (get_u32(is) != kVersion) throw Error(ErrorCode::kIo, "unsupported checkpoint version");
  Checkpoint ckpt;
  const std::uint32_t n_meta = get_u32(is);
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string k = get_str(is);
    ckpt.meta[k] = get_str(is);
  }
  const std::uint32_t n_tensors = get_u32(is);
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    std::string name = get_str(is);
    const std::uint32_t ndim = get_u32(is);
    if (ndim == 0 || ndim > 4) throw Error(ErrorCode::kIo, "bad tensor rank in checkpoint");
    std::vector<int> shape(ndim);
    for (auto& d : shape) {
      std::int32_t di = 0;
      if (!is.read(reinterpret_cast<char*>(&di), 4) || di <= 0) {
        throw Error(ErrorCode::kIo, "bad tensor dims in checkpoint");
      }
      d = di;
    }
    Tensor t(shape);
    if (!is.read(reinterpret_cast<char*>(t.data()),
                 static_cast<std::streamsize>(t.size() * sizeof(double)))) {
      throw Error(ErrorCode::kIo, "checkpoint truncated");
    }
    ckpt.tensors.emplace_back(std::move(name), std::move(t));
  }
  return ckpt;
}

Checkpoint make_checkpoint(const ParamStore& params, const Adam* adam,
                           std::map<std::string, std::string> meta) {
  Checkpoint ckpt;
  ckpt.meta = std::move(meta);
  for (const auto& [name, var] : params.items()) ckpt.tensors.emplace_back(name, var.value());
  if (adam) {
    ckpt.meta["adam.t"] = std::to_string(adam->steps());
    for (const auto& [name, t] : adam->first_moments()) ckpt.tensors.emplace_back("adam.m/" + name, t);
    for (const auto& [name, t] : adam->second_moments()) ckpt.tensors.emplace_back("adam.v/" + name, t);
  }
  return ckpt;
}

void restore_checkpoint(const Checkpoint& ckpt, ParamStore& params, Adam* adam) {
  std::size_t restored = 0;
  for (const auto& [name, t] : ckpt.tensors) {
    if (name.rfind("adam.", 0) == 0) {
      if (!adam) continue;
      const std::string key = name.substr(7);
      (name[5] == 'm' ? adam->first_moments() : adam->second_moments())[key] = t;
      continue;
    }
    if (!params.contains(name)) {
      throw Error(ErrorCode::kShapeMismatch, "checkpoint has unknown parameter " + name);
    }
    Var& v = params.get(name);
    if (!v.value().same_shape(t)) {
      throw Error(ErrorCode::kShapeMismatch, "checkpoint shape mismatch for " + name);
    }
    v.mutable_value() = t;
    ++restored;
  }
  if (restored != params.size()) {
    throw Error(ErrorCode::kShapeMismatch, "checkpoint is missing parameters");
  }
  if (adam) {
    auto it = ckpt.meta.find("adam.t");
    adam->set_steps(it == ckpt.meta.end() ? 0 : std::stoll(it->second));
  }
}

}  // namespace omnivr::nn
