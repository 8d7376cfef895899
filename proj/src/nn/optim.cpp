#include "omnivr/nn/optim.hpp"

#include <cmath>

namespace omnivr::nn {

void Adam::step(ParamStore& params) {
  ++t_;
  const double bc1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(t_));
  for (auto& [name, var] : params.items()) {
    Tensor& value = var.mutable_value();
    auto [mit, m_new] = m_.try_emplace(name, value.shape());
    auto [vit, v_new] = v_.try_emplace(name, value.shape());
    (void)m_new;
    (void)v_new;
    Tensor& m = mit->second;
    Tensor& v = vit->second;
    const Tensor& g = var.grad();
    const bool has_grad = g.size() == value.size();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double gi = has_grad ? g[i] : 0.0;
      m[i] = opt_.beta1 * m[i] + (1.0 - opt_.beta1) * gi;
      v[i] = opt_.beta2 * v[i] + (1.0 - opt_.beta2) * gi * gi;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      value[i] -= opt_.lr * mhat / (std::sqrt(vhat) + opt_.eps);
    }
  }
}

}  // namespace omnivr::nn
