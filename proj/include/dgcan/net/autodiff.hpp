#pragma once

#include <functional>
#include <memory>
#include <unordered_set>

#include "dgcan/net/tensor.hpp"

namespace dgcan::net {

// Reverse-mode autodiff over dynamically built graphs. Each op allocates a
// node holding its value and a closure that scatters the node's gradient
// into its parents.
template <class T>
struct Node {
  Tensor<T> value;
  Tensor<T> grad;  // allocated with the value, zero-initialized
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backprop;  // may be empty (leaf)

  explicit Node(Tensor<T> v, bool req)
      : value(std::move(v)), grad(value.shape(), T(0)), requires_grad(req) {}
};

template <class T>
using Var = std::shared_ptr<Node<T>>;

template <class T>
Var<T> make_leaf(Tensor<T> value, bool requires_grad = true) {
  return std::make_shared<Node<T>>(std::move(value), requires_grad);
}

template <class T>
Var<T> make_const(Tensor<T> value) {
  return std::make_shared<Node<T>>(std::move(value), false);
}

template <class T, class Fn>
Var<T> make_op(Tensor<T> value, std::vector<Var<T>> parents, Fn&& backprop) {
  bool req = false;
  for (const auto& p : parents) req = req || p->requires_grad;
  auto node = std::make_shared<Node<T>>(std::move(value), req);
  if (req) {
    node->parents = std::move(parents);
    node->backprop = std::forward<Fn>(backprop);
  }
  return node;
}

// Accumulates gradients of all reachable nodes; root must be scalar.
template <class T>
void backward(const Var<T>& root) {
  if (root->value.size() != 1)
    throw std::invalid_argument("backward: root must be scalar");
  // iterative postorder; each node enters the stack once (DAG, so a node
  // marked but unfinished can only be a stack ancestor, which would imply a
  // cycle)
  std::vector<Node<T>*> order;
  std::unordered_set<Node<T>*> added{root.get()};
  std::vector<std::pair<Node<T>*, std::size_t>> stack{{root.get(), 0}};
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node<T>* parent = node->parents[next++].get();
      if (parent->requires_grad && !added.count(parent)) {
        added.insert(parent);
        stack.push_back({parent, 0});
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  root->grad.fill(T(0));
  root->grad[0] = T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<T>* node = *it;
    if (node->backprop) node->backprop(*node);
  }
}

}  // namespace dgcan::net
