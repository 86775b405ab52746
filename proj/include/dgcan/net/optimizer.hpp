#pragma once

#include "dgcan/net/layers.hpp"

namespace dgcan::net {

// SGD with momentum and decoupled-from-nothing weight decay folded into the
// gradient: v = m*v + (g + wd*p); p -= lr*v.
template <class T>
class SgdOptimizer {
 public:
  SgdOptimizer(ParamList<T>& params, double lr, double momentum, double weight_decay)
      : params_(params), lr_(lr), momentum_(momentum), weight_decay_(weight_decay) {
    for (auto& [name, p] : params_) velocity_.emplace_back(p->value.shape(), T(0));
  }

  void set_learning_rate(double lr) { lr_ = lr; }
  double learning_rate() const { return lr_; }

  void zero_grad() {
    for (auto& [name, p] : params_) p->grad.fill(T(0));
  }

  void step() {
    for (std::size_t i = 0; i < params_.size(); ++i) {
      auto& p = params_[i].second;
      Tensor<T>& v = velocity_[i];
      for (std::int64_t j = 0; j < p->value.size(); ++j) {
        const T g = p->grad[j] + static_cast<T>(weight_decay_) * p->value[j];
        v[j] = static_cast<T>(momentum_) * v[j] + g;
        p->value[j] -= static_cast<T>(lr_) * v[j];
      }
    }
  }

 private:
  ParamList<T>& params_;
  double lr_, momentum_, weight_decay_;
  std::vector<Tensor<T>> velocity_;
};

}  // namespace dgcan::net
