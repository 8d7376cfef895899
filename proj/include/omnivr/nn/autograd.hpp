#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "omnivr/nn/tensor.hpp"

namespace omnivr::nn {

struct Node {
  Tensor value;
  Tensor grad;  // allocated on first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into the parents' grads.
  std::function<void(Node&)> backward;

  Tensor& grad_buffer();
};

// Handle to a value in a computation graph. Copies share the node.
class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  const Tensor& value() const { return node_->value; }
  Tensor& mutable_value() { return node_->value; }
  const Tensor& grad() const { return node_->grad; }
  Tensor& grad_buffer() { return node_->grad_buffer(); }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  const std::vector<int>& shape() const { return node_->value.shape(); }
  Node* node() const { return node_.get(); }
  const std::shared_ptr<Node>& shared() const { return node_; }
  explicit operator bool() const { return static_cast<bool>(node_); }

 private:
  std::shared_ptr<Node> node_;
};

Var constant(Tensor value);
Var leaf(Tensor value, bool requires_grad);

// Creates an interior node. The node requires grad iff any parent does.
Var make_node(Tensor value, std::vector<Var> parents, std::function<void(Node&)> backward);

// Reverse sweep from a scalar loss. Gradients accumulate into every reachable
// node that requires grad. Throws kDisconnectedGraph when nothing upstream
// requires grad.
void backward(const Var& loss);

// Named learnable tensors with deterministic (insertion) iteration order.
class ParamStore {
 public:
  Var& add(const std::string& name, Tensor init);
  Var& get(const std::string& name);
  const Var& get(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  std::size_t size() const noexcept { return params_.size(); }
  std::size_t parameter_count() const;
  const std::vector<std::pair<std::string, Var>>& items() const noexcept { return params_; }
  std::vector<std::pair<std::string, Var>>& items() noexcept { return params_; }

  void zero_grad();

 private:
  std::vector<std::pair<std::string, Var>> params_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace omnivr::nn
