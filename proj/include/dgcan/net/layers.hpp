#pragma once

#include <map>
#include <string>

#include "dgcan/common/rng.hpp"
#include "dgcan/net/ops.hpp"

namespace dgcan::net {

template <class T>
using ParamList = std::vector<std::pair<std::string, Var<T>>>;

template <class T>
struct Conv2dLayer {
  Var<T> weight, bias;
  int stride = 1, pad = 0;

  Conv2dLayer() = default;
  Conv2dLayer(int in, int out, int k, int stride_, int pad_, Rng& rng)
      : stride(stride_), pad(pad_) {
    Tensor<T> w({out, in, k, k});
    const double std_dev = std::sqrt(2.0 / (in * k * k));
    for (std::int64_t i = 0; i < w.size(); ++i)
      w[i] = static_cast<T>(rng.normal(0.0, std_dev));
    weight = make_leaf(std::move(w));
    bias = make_leaf(Tensor<T>({out}, T(0)));
  }

  Var<T> operator()(const Var<T>& x) const { return conv2d(x, weight, bias, stride, pad); }

  void collect(const std::string& prefix, ParamList<T>& out) const {
    out.push_back({prefix + ".weight", weight});
    out.push_back({prefix + ".bias", bias});
  }
};

template <class T>
struct LinearLayer {
  Var<T> weight, bias;

  LinearLayer() = default;
  LinearLayer(int in, int out, Rng& rng) {
    Tensor<T> w({out, in});
    const double std_dev = std::sqrt(2.0 / in);
    for (std::int64_t i = 0; i < w.size(); ++i)
      w[i] = static_cast<T>(rng.normal(0.0, std_dev));
    weight = make_leaf(std::move(w));
    bias = make_leaf(Tensor<T>({out}, T(0)));
  }

  Var<T> operator()(const Var<T>& x) const { return linear(x, weight, bias); }

  void collect(const std::string& prefix, ParamList<T>& out) const {
    out.push_back({prefix + ".weight", weight});
    out.push_back({prefix + ".bias", bias});
  }
};

// Fixed 2-D sine/cosine positional encoding over absolute pixel coordinates:
// channels split evenly between the two axes, sin/cos pairs per frequency,
// all values in [-1, 1]. channels must be divisible by 4.
template <class T>
Tensor<T> sine_positional_encoding(int height, int width, int channels,
                                   double pos_scale = 1.0) {
  if (channels % 4 != 0)
    throw std::invalid_argument("sine_positional_encoding: channels must be divisible by 4");
  const int bands = channels / 4;
  Tensor<T> pe({channels, height, width});
  for (int b = 0; b < bands; ++b) {
    const double freq = pos_scale / std::pow(10000.0, static_cast<double>(b) / bands);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const std::int64_t hw = static_cast<std::int64_t>(y) * width + x;
        const std::int64_t plane = static_cast<std::int64_t>(height) * width;
        pe[(0 * bands + b) * plane + hw] = static_cast<T>(std::sin(y * freq));
        pe[(1 * bands + b) * plane + hw] = static_cast<T>(std::cos(y * freq));
        pe[(2 * bands + b) * plane + hw] = static_cast<T>(std::sin(x * freq));
        pe[(3 * bands + b) * plane + hw] = static_cast<T>(std::cos(x * freq));
      }
  }
  return pe;
}

struct LcaConfig {
  std::array<int, 3> window = {5, 3, 3};  // per fusion stage
  int heads = 2;
  double pos_scale = 1.0;
  // embed dim per stage = stage channels / embed_divisor
  int embed_divisor = 2;
};

// Local cross-modal attention block: RGB features query depth keys/values in
// a k x k neighborhood; the refined depth features are concatenated back to
// the RGB stream and projected to C channels.
template <class T>
struct LcaBlock {
  Conv2dLayer<T> q_proj, k_proj, v_proj;  // 1x1, C -> C'
  Conv2dLayer<T> out_proj;                // 1x1, C' -> C
  Conv2dLayer<T> fuse_proj;               // 1x1, 2C -> C
  int window = 3;
  int heads = 2;
  int embed = 0;
  double pos_scale = 1.0;
  mutable std::map<std::pair<int, int>, Tensor<T>> pe_cache;

  LcaBlock() = default;
  LcaBlock(int channels, int embed_, int window_, int heads_, double pos_scale_, Rng& rng)
      : q_proj(channels, embed_, 1, 1, 0, rng),
        k_proj(channels, embed_, 1, 1, 0, rng),
        v_proj(channels, embed_, 1, 1, 0, rng),
        out_proj(embed_, channels, 1, 1, 0, rng),
        fuse_proj(2 * channels, channels, 1, 1, 0, rng),
        window(window_), heads(heads_), embed(embed_), pos_scale(pos_scale_) {
    if (window % 2 == 0) throw std::invalid_argument("LcaBlock: window must be odd");
    if (embed % heads != 0)
      throw std::invalid_argument("LcaBlock: embed dim not divisible by heads");
  }

  const Tensor<T>& pe_for(int h, int w) const {
    auto it = pe_cache.find({h, w});
    if (it == pe_cache.end())
      it = pe_cache.emplace(std::pair<int, int>{h, w},
                            sine_positional_encoding<T>(h, w, embed, pos_scale)).first;
    return it->second;
  }

  Var<T> operator()(const Var<T>& x_rgb, const Var<T>& x_depth) const {
    const auto& s = x_rgb->value.shape();
    const Tensor<T>& pe = pe_for(s[2], s[3]);
    Var<T> q = add_const_chw(q_proj(x_rgb), pe);
    Var<T> k = add_const_chw(k_proj(x_depth), pe);
    Var<T> v = v_proj(x_depth);
    Var<T> refined = local_cross_attention(q, k, v, window, heads);
    Var<T> y = out_proj(refined);
    return fuse_proj(concat_channels(x_rgb, y));
  }

  void collect(const std::string& prefix, ParamList<T>& out) const {
    q_proj.collect(prefix + ".q", out);
    k_proj.collect(prefix + ".k", out);
    v_proj.collect(prefix + ".v", out);
    out_proj.collect(prefix + ".out", out);
    fuse_proj.collect(prefix + ".fuse", out);
  }
};

}  // namespace dgcan::net
