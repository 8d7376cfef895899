#pragma once

#include <map>
#include <string>

#include "omnivr/nn/autograd.hpp"

namespace omnivr::nn {

struct AdamOptions {
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction. Moments are keyed by parameter name so the
// optimizer state can be checkpointed next to the parameters.
class Adam {
 public:
  explicit Adam(AdamOptions opt = {}) : opt_(opt) {}

  // Applies one update from the accumulated grads. Parameters without a grad
  // buffer (never reached by backward) count as zero gradient.
  void step(ParamStore& params);

  const AdamOptions& options() const noexcept { return opt_; }
  void set_lr(double lr) { opt_.lr = lr; }
  long long steps() const noexcept { return t_; }
  void set_steps(long long t) { t_ = t; }

  std::map<std::string, Tensor>& first_moments() { return m_; }
  std::map<std::string, Tensor>& second_moments() { return v_; }
  const std::map<std::string, Tensor>& first_moments() const { return m_; }
  const std::map<std::string, Tensor>& second_moments() const { return v_; }

 private:
  AdamOptions opt_;
  long long t_ = 0;
  std::map<std::string, Tensor> m_;
  std::map<std::string, Tensor> v_;
};

}  // namespace omnivr::nn
