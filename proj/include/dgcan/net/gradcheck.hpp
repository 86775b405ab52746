#pragma once

#include <functional>

#include "dgcan/net/autodiff.hpp"

namespace dgcan::net {

// Central finite-difference verification. loss_fn rebuilds the graph from
// the current leaf values and returns the scalar loss node. The relative
// error uses an absolute floor of 1 so near-zero gradients compare sanely:
// |ad - fd| / max(1, |ad|, |fd|).
struct GradCheckResult {
  double max_rel_error = 0.0;
  std::int64_t checked = 0;
};

inline GradCheckResult gradcheck(
    const std::function<Var<double>()>& loss_fn,
    const std::vector<Var<double>>& leaves, double eps = 1e-5) {
  GradCheckResult result;
  Var<double> root = loss_fn();
  for (const auto& leaf : leaves) leaf->grad.fill(0.0);
  backward(root);
  std::vector<Tensor<double>> grads;
  for (const auto& leaf : leaves) grads.push_back(leaf->grad);

  for (std::size_t li = 0; li < leaves.size(); ++li) {
    auto& value = leaves[li]->value;
    for (std::int64_t i = 0; i < value.size(); ++i) {
      const double orig = value[i];
      value[i] = orig + eps;
      const double lp = loss_fn()->value[0];
      value[i] = orig - eps;
      const double lm = loss_fn()->value[0];
      value[i] = orig;
      const double fd = (lp - lm) / (2.0 * eps);
      const double ad = grads[li][i];
      const double rel = std::abs(ad - fd) / std::max({1.0, std::abs(ad), std::abs(fd)});
      result.max_rel_error = std::max(result.max_rel_error, rel);
      ++result.checked;
    }
  }
  return result;
}

}  // namespace dgcan::net
