#include "omnivr/nn/tensor.hpp"

#include <algorithm>

#include "omnivr/error.hpp"

namespace omnivr::nn {

std::size_t shape_numel(const std::vector<int>& shape) {
  if (shape.empty() || shape.size() > 4) {
    throw Error(ErrorCode::kShapeMismatch, "tensors have between one and four dimensions");
  }
  std::size_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw Error(ErrorCode::kShapeMismatch, "tensor dimensions must be positive");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

Tensor::Tensor(std::vector<int> shape, double fill)
    : shape_(std::move(shape)), data_(shape_numel(shape_), fill) {}

Tensor::Tensor(std::vector<int> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_numel(shape_) != data_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "data length does not match shape " + shape_string());
  }
}

double Tensor::item() const {
  if (data_.size() != 1) throw Error(ErrorCode::kShapeMismatch, "item() needs a scalar tensor");
  return data_[0];
}

Tensor Tensor::reshaped(std::vector<int> shape) const {
  return Tensor(std::move(shape), data_);
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

std::string Tensor::shape_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape_[i]);
  }
  return s + "]";
}

}  // namespace omnivr::nn
