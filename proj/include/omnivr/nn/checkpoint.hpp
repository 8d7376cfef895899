#pragma once

#include <map>
#include <string>

#include "omnivr/nn/autograd.hpp"
#include "omnivr/nn/optim.hpp"

namespace omnivr::nn {

// Binary checkpoint, little-endian:
//   8 bytes   magic "OVRCKPT\0"
//   u32       version (1)
//   u32       meta entry count, then per entry: u32 key length, key bytes,
//             u32 value length, value bytes
//   u32       tensor count, then per tensor: u32 name length, name bytes,
//             u32 ndim, ndim x i32 dims, numel x f64 samples
// Parameters are stored under their own names; Adam moments under "adam.m/<name>"
// and "adam.v/<name>", the Adam step count under meta key "adam.t".
struct Checkpoint {
  std::map<std::string, std::string> meta;
  std::vector<std::pair<std::string, Tensor>> tensors;
};

void write_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::string& path);

Checkpoint make_checkpoint(const ParamStore& params, const Adam* adam,
                           std::map<std::string, std::string> meta = {});
// Copies stored parameter values into an existing store (names and shapes must
// match) and, when given, restores the optimizer state.
void restore_checkpoint(const Checkpoint& ckpt, ParamStore& params, Adam* adam);

}  // namespace omnivr::nn
