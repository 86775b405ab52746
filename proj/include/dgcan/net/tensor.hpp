#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace dgcan::net {

// Dense row-major tensor. Training runs in float, gradient verification in
// double; everything in this module is templated on the scalar type.
template <class T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape, T fill = T(0))
      : shape_(std::move(shape)),
        data_(checked_size(shape_), fill) {}

  static Tensor from(std::vector<int> shape, std::vector<T> data) {
    Tensor t;
    t.shape_ = std::move(shape);
    if (checked_size(t.shape_) != data.size())
      throw std::invalid_argument("Tensor::from: size mismatch");
    t.data_ = std::move(data);
    return t;
  }

  static Tensor scalar(T v) { return from({1}, {v}); }

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_.at(i); }
  std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  T& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
  const T& operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

  // NCHW accessor
  T& at4(int n, int c, int h, int w) {
    return data_[((static_cast<std::size_t>(n) * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
  }
  const T& at4(int n, int c, int h, int w) const {
    return data_[((static_cast<std::size_t>(n) * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
  }
  T& at2(int r, int c) { return data_[static_cast<std::size_t>(r) * shape_[1] + c]; }
  const T& at2(int r, int c) const { return data_[static_cast<std::size_t>(r) * shape_[1] + c]; }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  Tensor reshaped(std::vector<int> shape) const {
    Tensor t;
    t.shape_ = std::move(shape);
    if (checked_size(t.shape_) != data_.size())
      throw std::invalid_argument("Tensor::reshaped: size mismatch");
    t.data_ = data_;
    return t;
  }

  template <class U>
  Tensor<U> cast() const {
    Tensor<U> t(shape_);
    for (std::size_t i = 0; i < data_.size(); ++i)
      t[static_cast<std::int64_t>(i)] = static_cast<U>(data_[i]);
    return t;
  }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

 private:
  static std::size_t checked_size(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) {
      if (d <= 0) throw std::invalid_argument("Tensor: non-positive dimension");
      n *= static_cast<std::size_t>(d);
    }
    return shape.empty() ? 0 : n;
  }

  std::vector<int> shape_;
  std::vector<T> data_;
};

}  // namespace dgcan::net
