#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "dgcan/net/autodiff.hpp"

namespace dgcan::net {

template <class T>
using MatMap = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
template <class T>
using ConstMatMap =
    Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

// ---- elementwise ----

template <class T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  if (!a->value.same_shape(b->value)) throw std::invalid_argument("add: shape mismatch");
  Tensor<T> out = a->value;
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] += b->value[i];
  return make_op<T>(std::move(out), {a, b}, [a, b](Node<T>& n) {
    if (a->requires_grad)
      for (std::int64_t i = 0; i < n.grad.size(); ++i) a->grad[i] += n.grad[i];
    if (b->requires_grad)
      for (std::int64_t i = 0; i < n.grad.size(); ++i) b->grad[i] += n.grad[i];
  });
}

template <class T>
Var<T> scale(const Var<T>& a, T s) {
  Tensor<T> out = a->value;
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] *= s;
  return make_op<T>(std::move(out), {a}, [a, s](Node<T>& n) {
    if (a->requires_grad)
      for (std::int64_t i = 0; i < n.grad.size(); ++i) a->grad[i] += s * n.grad[i];
  });
}

template <class T>
Var<T> relu(const Var<T>& a) {
  Tensor<T> out = a->value;
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], T(0));
  return make_op<T>(std::move(out), {a}, [a](Node<T>& n) {
    if (!a->requires_grad) return;
    for (std::int64_t i = 0; i < n.grad.size(); ++i)
      if (a->value[i] > T(0)) a->grad[i] += n.grad[i];
  });
}

template <class T>
Var<T> sigmoid(const Var<T>& a) {
  Tensor<T> out = a->value;
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] = T(1) / (T(1) + std::exp(-out[i]));
  auto saved = std::make_shared<Tensor<T>>(out);
  return make_op<T>(std::move(out), {a}, [a, saved](Node<T>& n) {
    if (!a->requires_grad) return;
    for (std::int64_t i = 0; i < n.grad.size(); ++i) {
      const T y = (*saved)[i];
      a->grad[i] += y * (T(1) - y) * n.grad[i];
    }
  });
}

// Adds a constant [C,H,W] tensor to every batch element of a [N,C,H,W] input
// (used for positional encodings).
template <class T>
Var<T> add_const_chw(const Var<T>& a, const Tensor<T>& c) {
  const auto& s = a->value.shape();
  if (a->value.rank() != 4 || c.rank() != 3 || s[1] != c.dim(0) || s[2] != c.dim(1) ||
      s[3] != c.dim(2))
    throw std::invalid_argument("add_const_chw: shape mismatch");
  Tensor<T> out = a->value;
  const std::int64_t per = c.size();
  for (int n = 0; n < s[0]; ++n)
    for (std::int64_t i = 0; i < per; ++i) out[n * per + i] += c[i];
  return make_op<T>(std::move(out), {a}, [a](Node<T>& n) {
    if (!a->requires_grad) return;
    for (std::int64_t i = 0; i < n.grad.size(); ++i) a->grad[i] += n.grad[i];
  });
}

// [N,1,H,W] -> [N,3,H,W] (depth images replicated before the depth stream).
template <class T>
Var<T> replicate_channels3(const Var<T>& a) {
  const auto& s = a->value.shape();
  if (a->value.rank() != 4 || s[1] != 1)
    throw std::invalid_argument("replicate_channels3: need [N,1,H,W]");
  const int N = s[0];
  const std::int64_t plane = static_cast<std::int64_t>(s[2]) * s[3];
  Tensor<T> out({N, 3, s[2], s[3]});
  for (int n = 0; n < N; ++n)
    for (int c = 0; c < 3; ++c)
      std::copy_n(a->value.data() + n * plane, plane, out.data() + (n * 3 + c) * plane);
  return make_op<T>(std::move(out), {a}, [a, N, plane](Node<T>& node) {
    if (!a->requires_grad) return;
    for (int n = 0; n < N; ++n)
      for (int c = 0; c < 3; ++c)
        for (std::int64_t i = 0; i < plane; ++i)
          a->grad[n * plane + i] += node.grad[(n * 3 + c) * plane + i];
  });
}

template <class T>
Var<T> reshape(const Var<T>& a, std::vector<int> shape) {
  Tensor<T> out = a->value.reshaped(std::move(shape));
  return make_op<T>(std::move(out), {a}, [a](Node<T>& n) {
    if (!a->requires_grad) return;
    for (std::int64_t i = 0; i < n.grad.size(); ++i) a->grad[i] += n.grad[i];
  });
}

template <class T>
Var<T> concat_channels(const Var<T>& a, const Var<T>& b) {
  const auto& sa = a->value.shape();
  const auto& sb = b->value.shape();
  if (a->value.rank() != 4 || b->value.rank() != 4 || sa[0] != sb[0] ||
      sa[2] != sb[2] || sa[3] != sb[3])
    throw std::invalid_argument("concat_channels: shape mismatch");
  const int N = sa[0], Ca = sa[1], Cb = sb[1], H = sa[2], W = sa[3];
  Tensor<T> out({N, Ca + Cb, H, W});
  const std::int64_t plane = static_cast<std::int64_t>(H) * W;
  for (int n = 0; n < N; ++n) {
    std::copy_n(a->value.data() + n * Ca * plane, Ca * plane,
                out.data() + n * (Ca + Cb) * plane);
    std::copy_n(b->value.data() + n * Cb * plane, Cb * plane,
                out.data() + (n * (Ca + Cb) + Ca) * plane);
  }
  return make_op<T>(std::move(out), {a, b}, [a, b, N, Ca, Cb, plane](Node<T>& n) {
    for (int i = 0; i < N; ++i) {
      if (a->requires_grad)
        for (std::int64_t j = 0; j < Ca * plane; ++j)
          a->grad[i * Ca * plane + j] += n.grad[i * (Ca + Cb) * plane + j];
      if (b->requires_grad)
        for (std::int64_t j = 0; j < Cb * plane; ++j)
          b->grad[i * Cb * plane + j] += n.grad[(i * (Ca + Cb) + Ca) * plane + j];
    }
  });
}

// ---- dense ----

// x: [M, K], weight: [O, K], bias: [O] -> [M, O]
template <class T>
Var<T> linear(const Var<T>& x, const Var<T>& weight, const Var<T>& bias) {
  const int M = x->value.dim(0), K = x->value.dim(1);
  const int O = weight->value.dim(0);
  if (weight->value.dim(1) != K || bias->value.dim(0) != O)
    throw std::invalid_argument("linear: shape mismatch");
  Tensor<T> out({M, O});
  ConstMatMap<T> X(x->value.data(), M, K), W(weight->value.data(), O, K);
  MatMap<T> Y(out.data(), M, O);
  Y.noalias() = X * W.transpose();
  for (int m = 0; m < M; ++m)
    for (int o = 0; o < O; ++o) out.at2(m, o) += bias->value[o];
  return make_op<T>(std::move(out), {x, weight, bias},
                    [x, weight, bias, M, K, O](Node<T>& n) {
                      ConstMatMap<T> dY(n.grad.data(), M, O);
                      if (x->requires_grad) {
                        MatMap<T> dX(x->grad.data(), M, K);
                        ConstMatMap<T> W(weight->value.data(), O, K);
                        dX.noalias() += dY * W;
                      }
                      if (weight->requires_grad) {
                        MatMap<T> dW(weight->grad.data(), O, K);
                        ConstMatMap<T> X(x->value.data(), M, K);
                        dW.noalias() += dY.transpose() * X;
                      }
                      if (bias->requires_grad)
                        for (int m = 0; m < M; ++m)
                          for (int o = 0; o < O; ++o) bias->grad[o] += n.grad[m * O + o];
                    });
}

// ---- convolution ----

namespace detail {

template <class T>
void im2col(const T* src, int C, int H, int W, int kh, int kw, int stride, int pad,
            int Ho, int Wo, T* col) {
  // col: [C*kh*kw, Ho*Wo]
  for (int c = 0; c < C; ++c)
    for (int ky = 0; ky < kh; ++ky)
      for (int kx = 0; kx < kw; ++kx) {
        T* dst = col + ((c * kh + ky) * kw + kx) * (Ho * Wo);
        for (int oy = 0; oy < Ho; ++oy) {
          const int iy = oy * stride + ky - pad;
          if (iy < 0 || iy >= H) {
            std::fill_n(dst + oy * Wo, Wo, T(0));
            continue;
          }
          const T* row = src + (c * H + iy) * W;
          for (int ox = 0; ox < Wo; ++ox) {
            const int ix = ox * stride + kx - pad;
            dst[oy * Wo + ox] = (ix >= 0 && ix < W) ? row[ix] : T(0);
          }
        }
      }
}

template <class T>
void col2im_add(const T* col, int C, int H, int W, int kh, int kw, int stride, int pad,
                int Ho, int Wo, T* dst) {
  for (int c = 0; c < C; ++c)
    for (int ky = 0; ky < kh; ++ky)
      for (int kx = 0; kx < kw; ++kx) {
        const T* src = col + ((c * kh + ky) * kw + kx) * (Ho * Wo);
        for (int oy = 0; oy < Ho; ++oy) {
          const int iy = oy * stride + ky - pad;
          if (iy < 0 || iy >= H) continue;
          T* row = dst + (c * H + iy) * W;
          for (int ox = 0; ox < Wo; ++ox) {
            const int ix = ox * stride + kx - pad;
            if (ix >= 0 && ix < W) row[ix] += src[oy * Wo + ox];
          }
        }
      }
}

}  // namespace detail

// x: [N,C,H,W], weight: [O,C,kh,kw], bias: [O]
template <class T>
Var<T> conv2d(const Var<T>& x, const Var<T>& weight, const Var<T>& bias, int stride,
              int pad) {
  const auto& xs = x->value.shape();
  const auto& ws = weight->value.shape();
  if (x->value.rank() != 4 || weight->value.rank() != 4 || xs[1] != ws[1])
    throw std::invalid_argument("conv2d: shape mismatch");
  const int N = xs[0], C = xs[1], H = xs[2], W = xs[3];
  const int O = ws[0], kh = ws[2], kw = ws[3];
  const int Ho = (H + 2 * pad - kh) / stride + 1;
  const int Wo = (W + 2 * pad - kw) / stride + 1;
  if (Ho <= 0 || Wo <= 0) throw std::invalid_argument("conv2d: empty output");

  Tensor<T> out({N, O, Ho, Wo});
  const int ckk = C * kh * kw;
  const std::int64_t ospatial = static_cast<std::int64_t>(Ho) * Wo;
  Tensor<T> col({ckk, Ho, Wo});
  ConstMatMap<T> Wm(weight->value.data(), O, ckk);
  for (int n = 0; n < N; ++n) {
    detail::im2col(x->value.data() + static_cast<std::int64_t>(n) * C * H * W, C, H, W,
                   kh, kw, stride, pad, Ho, Wo, col.data());
    ConstMatMap<T> Cm(col.data(), ckk, ospatial);
    MatMap<T> Y(out.data() + n * O * ospatial, O, ospatial);
    Y.noalias() = Wm * Cm;
    for (int o = 0; o < O; ++o) {
      T* dst = out.data() + (n * O + o) * ospatial;
      const T b = bias->value[o];
      for (std::int64_t i = 0; i < ospatial; ++i) dst[i] += b;
    }
  }
  return make_op<T>(
      std::move(out), {x, weight, bias},
      [x, weight, bias, N, C, H, W, O, kh, kw, stride, pad, Ho, Wo, ckk,
       ospatial](Node<T>& node) {
        Tensor<T> col({ckk, Ho, Wo});
        Tensor<T> dcol({ckk, Ho, Wo});
        ConstMatMap<T> Wm(weight->value.data(), O, ckk);
        for (int n = 0; n < N; ++n) {
          ConstMatMap<T> dY(node.grad.data() + n * O * ospatial, O, ospatial);
          if (weight->requires_grad) {
            detail::im2col(x->value.data() + static_cast<std::int64_t>(n) * C * H * W, C,
                           H, W, kh, kw, stride, pad, Ho, Wo, col.data());
            ConstMatMap<T> Cm(col.data(), ckk, ospatial);
            MatMap<T> dW(weight->grad.data(), O, ckk);
            dW.noalias() += dY * Cm.transpose();
          }
          if (x->requires_grad) {
            MatMap<T> dC(dcol.data(), ckk, ospatial);
            dC.noalias() = Wm.transpose() * dY;
            detail::col2im_add(dcol.data(), C, H, W, kh, kw, stride, pad, Ho, Wo,
                               x->grad.data() + static_cast<std::int64_t>(n) * C * H * W);
          }
          if (bias->requires_grad)
            for (int o = 0; o < O; ++o) {
              const T* g = node.grad.data() + (n * O + o) * ospatial;
              T s = T(0);
              for (std::int64_t i = 0; i < ospatial; ++i) s += g[i];
              bias->grad[o] += s;
            }
        }
      });
}

// ---- pooling / gather ----

template <class T>
Var<T> global_avg_pool(const Var<T>& x) {
  const auto& s = x->value.shape();
  if (x->value.rank() != 4) throw std::invalid_argument("global_avg_pool: need NCHW");
  const int N = s[0], C = s[1];
  const std::int64_t plane = static_cast<std::int64_t>(s[2]) * s[3];
  Tensor<T> out({N, C});
  for (int n = 0; n < N; ++n)
    for (int c = 0; c < C; ++c) {
      const T* src = x->value.data() + (n * C + c) * plane;
      T sum = T(0);
      for (std::int64_t i = 0; i < plane; ++i) sum += src[i];
      out.at2(n, c) = sum / static_cast<T>(plane);
    }
  return make_op<T>(std::move(out), {x}, [x, N, C, plane](Node<T>& n) {
    if (!x->requires_grad) return;
    for (int i = 0; i < N; ++i)
      for (int c = 0; c < C; ++c) {
        const T g = n.grad[i * C + c] / static_cast<T>(plane);
        T* dst = x->grad.data() + (i * C + c) * plane;
        for (std::int64_t j = 0; j < plane; ++j) dst[j] += g;
      }
  });
}

// Gathers scalar entries of a NCHW map; out[k] = x[idx[k]].
template <class T>
Var<T> gather_nchw(const Var<T>& x, std::vector<std::array<int, 4>> idx) {
  const auto& s = x->value.shape();
  if (x->value.rank() != 4) throw std::invalid_argument("gather_nchw: need NCHW");
  Tensor<T> out({static_cast<int>(idx.size())});
  auto flat = std::make_shared<std::vector<std::int64_t>>(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto& [n, c, h, w] = idx[k];
    (*flat)[k] = ((static_cast<std::int64_t>(n) * s[1] + c) * s[2] + h) * s[3] + w;
    out[k] = x->value[(*flat)[k]];
  }
  return make_op<T>(std::move(out), {x}, [x, flat](Node<T>& n) {
    if (!x->requires_grad) return;
    for (std::size_t k = 0; k < flat->size(); ++k) x->grad[(*flat)[k]] += n.grad[k];
  });
}

// ---- RoI align ----

struct RoiBox {
  int batch = 0;
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;  // feature coordinates
};

// 2x2 bilinear samples per output bin, averaged. Gradients flow to the
// feature map only.
template <class T>
Var<T> roi_align(const Var<T>& x, const std::vector<RoiBox>& boxes, int out_size) {
  const auto& s = x->value.shape();
  if (x->value.rank() != 4) throw std::invalid_argument("roi_align: need NCHW");
  const int C = s[1], H = s[2], W = s[3];
  const int M = static_cast<int>(boxes.size());
  if (M == 0) throw std::invalid_argument("roi_align: no boxes");
  for (const auto& b : boxes)
    if (b.x1 <= b.x0 || b.y1 <= b.y0)
      throw std::invalid_argument("roi_align: degenerate box");

  // 16 (plane offset, weight) taps per output bin, shared across channels;
  // order matches the [M, out, out] bin layout of the output tensor
  struct Tap {
    std::int64_t off;
    T w;
  };
  auto taps = std::make_shared<std::vector<std::array<Tap, 16>>>();
  taps->resize(static_cast<std::size_t>(M) * out_size * out_size);

  auto sample_weights = [&](double yy, double xx, Tap* w) {
    const double yc = std::clamp(yy, 0.0, static_cast<double>(H - 1));
    const double xc = std::clamp(xx, 0.0, static_cast<double>(W - 1));
    const int y0i = std::clamp(static_cast<int>(yc), 0, std::max(H - 2, 0));
    const int x0i = std::clamp(static_cast<int>(xc), 0, std::max(W - 2, 0));
    const double fy = yc - y0i, fx = xc - x0i;
    const int y1i = std::min(y0i + 1, H - 1), x1i = std::min(x0i + 1, W - 1);
    w[0] = {static_cast<std::int64_t>(y0i) * W + x0i, static_cast<T>((1 - fy) * (1 - fx) / 4.0)};
    w[1] = {static_cast<std::int64_t>(y0i) * W + x1i, static_cast<T>((1 - fy) * fx / 4.0)};
    w[2] = {static_cast<std::int64_t>(y1i) * W + x0i, static_cast<T>(fy * (1 - fx) / 4.0)};
    w[3] = {static_cast<std::int64_t>(y1i) * W + x1i, static_cast<T>(fy * fx / 4.0)};
  };

  Tensor<T> out({M, C, out_size, out_size});
  for (int m = 0; m < M; ++m) {
    const auto& b = boxes[m];
    const double bw = (b.x1 - b.x0) / out_size, bh = (b.y1 - b.y0) / out_size;
    for (int by = 0; by < out_size; ++by)
      for (int bx = 0; bx < out_size; ++bx) {
        auto& bin = (*taps)[(static_cast<std::size_t>(m) * out_size + by) * out_size + bx];
        int wi = 0;
        for (int sy = 0; sy < 2; ++sy)
          for (int sx = 0; sx < 2; ++sx) {
            const double yy = b.y0 + (by + (sy + 0.5) / 2.0) * bh;
            const double xx = b.x0 + (bx + (sx + 0.5) / 2.0) * bw;
            sample_weights(yy, xx, bin.data() + 4 * wi);
            ++wi;
          }
        for (int c = 0; c < C; ++c) {
          const T* plane =
              x->value.data() + (static_cast<std::int64_t>(b.batch) * C + c) * H * W;
          T acc = T(0);
          for (const Tap& t : bin) acc += plane[t.off] * t.w;
          out.at4(m, c, by, bx) = acc;
        }
      }
  }
  auto batches = std::make_shared<std::vector<int>>();
  for (const auto& b : boxes) batches->push_back(b.batch);
  const int os = out_size;
  return make_op<T>(std::move(out), {x}, [x, taps, batches, C, H, W, os](Node<T>& n) {
    if (!x->requires_grad) return;
    const int M = static_cast<int>(batches->size());
    for (int m = 0; m < M; ++m)
      for (int c = 0; c < C; ++c) {
        T* gplane = x->grad.data() + (static_cast<std::int64_t>((*batches)[m]) * C + c) * H * W;
        for (int by = 0; by < os; ++by)
          for (int bx = 0; bx < os; ++bx) {
            const T g = n.grad[((static_cast<std::int64_t>(m) * C + c) * os + by) * os + bx];
            const auto& bin = (*taps)[(static_cast<std::size_t>(m) * os + by) * os + bx];
            for (const Tap& t : bin) gplane[t.off] += t.w * g;
          }
      }
  });
}

// ---- local cross-modal attention ----

// Per position (i,j) and head: softmax over the k x k neighborhood of
// q_ij . k_mn / sqrt(head_dim); out-of-image neighbors are excluded from the
// softmax support. Returns the weighted sum of values, [N,C,H,W].
template <class T>
Var<T> local_cross_attention(const Var<T>& q, const Var<T>& k, const Var<T>& v,
                             int window, int heads) {
  const auto& s = q->value.shape();
  if (!q->value.same_shape(k->value) || !q->value.same_shape(v->value))
    throw std::invalid_argument("local_cross_attention: shape mismatch");
  if (window <= 0 || window % 2 == 0)
    throw std::invalid_argument("local_cross_attention: window must be odd");
  const int N = s[0], C = s[1], H = s[2], W = s[3];
  if (C % heads != 0)
    throw std::invalid_argument("local_cross_attention: channels not divisible by heads");
  const int dh = C / heads;
  const int r = (window - 1) / 2;
  const T inv_sqrt = T(1) / std::sqrt(static_cast<T>(dh));
  const int win2 = window * window;

  // softmax probabilities saved for the backward pass
  auto probs = std::make_shared<Tensor<T>>(
      Tensor<T>({N, heads, H, W, win2}, T(0)));
  Tensor<T> out({N, C, H, W});

  const std::int64_t plane = static_cast<std::int64_t>(H) * W;
  auto chan = [&](const Tensor<T>& t, int n, int c) {
    return t.data() + (static_cast<std::int64_t>(n) * C + c) * plane;
  };
  auto chan_out = [&](Tensor<T>& t, int n, int c) {
    return t.data() + (static_cast<std::int64_t>(n) * C + c) * plane;
  };

  std::vector<T> scores(win2);
  for (int n = 0; n < N; ++n)
    for (int hd = 0; hd < heads; ++hd) {
      const int c0 = hd * dh;
      for (int i = 0; i < H; ++i)
        for (int j = 0; j < W; ++j) {
          int cnt = 0;
          T maxs = -std::numeric_limits<T>::infinity();
          // scores over valid neighbors
          std::vector<int> valid;
          valid.reserve(win2);
          for (int di = -r; di <= r; ++di)
            for (int dj = -r; dj <= r; ++dj) {
              const int mi = i + di, mj = j + dj;
              if (mi < 0 || mi >= H || mj < 0 || mj >= W) continue;
              T dot = T(0);
              for (int c = 0; c < dh; ++c)
                dot += chan(q->value, n, c0 + c)[i * W + j] *
                       chan(k->value, n, c0 + c)[mi * W + mj];
              scores[cnt] = dot * inv_sqrt;
              valid.push_back((di + r) * window + (dj + r));
              maxs = std::max(maxs, scores[cnt]);
              ++cnt;
            }
          T denom = T(0);
          for (int t = 0; t < cnt; ++t) {
            scores[t] = std::exp(scores[t] - maxs);
            denom += scores[t];
          }
          T* prow = probs->data() +
                    (((static_cast<std::int64_t>(n) * heads + hd) * H + i) * W + j) * win2;
          for (int t = 0; t < cnt; ++t) prow[valid[t]] = scores[t] / denom;
          // weighted sum of values
          for (int c = 0; c < dh; ++c) {
            T acc = T(0);
            for (int t = 0; t < cnt; ++t) {
              const int di = valid[t] / window - r, dj = valid[t] % window - r;
              acc += prow[valid[t]] * chan(v->value, n, c0 + c)[(i + di) * W + (j + dj)];
            }
            chan_out(out, n, c0 + c)[i * W + j] = acc;
          }
        }
    }

  return make_op<T>(
      std::move(out), {q, k, v},
      [q, k, v, probs, N, C, H, W, heads, dh, r, window, win2, inv_sqrt,
       plane](Node<T>& node) {
        auto chan = [&](const Tensor<T>& t, int n, int c) {
          return t.data() + (static_cast<std::int64_t>(n) * C + c) * plane;
        };
        auto chan_mut = [&](Tensor<T>& t, int n, int c) {
          return t.data() + (static_cast<std::int64_t>(n) * C + c) * plane;
        };
        std::vector<T> da(win2), ds(win2);
        for (int n = 0; n < N; ++n)
          for (int hd = 0; hd < heads; ++hd) {
            const int c0 = hd * dh;
            for (int i = 0; i < H; ++i)
              for (int j = 0; j < W; ++j) {
                const T* prow =
                    probs->data() +
                    (((static_cast<std::int64_t>(n) * heads + hd) * H + i) * W + j) * win2;
                // da_t = dOut . v_t ; dv_t += a_t dOut
                T dot_a_da = T(0);
                for (int t = 0; t < win2; ++t) {
                  if (prow[t] == T(0)) { da[t] = T(0); continue; }
                  const int di = t / window - r, dj = t % window - r;
                  const int mi = i + di, mj = j + dj;
                  T acc = T(0);
                  for (int c = 0; c < dh; ++c) {
                    const T go = chan(node.grad, n, c0 + c)[i * W + j];
                    acc += go * chan(v->value, n, c0 + c)[mi * W + mj];
                    if (v->requires_grad)
                      chan_mut(v->grad, n, c0 + c)[mi * W + mj] += prow[t] * go;
                  }
                  da[t] = acc;
                  dot_a_da += prow[t] * acc;
                }
                // softmax backward + score gradients
                for (int t = 0; t < win2; ++t) {
                  if (prow[t] == T(0)) continue;
                  ds[t] = prow[t] * (da[t] - dot_a_da) * inv_sqrt;
                  const int di = t / window - r, dj = t % window - r;
                  const int mi = i + di, mj = j + dj;
                  for (int c = 0; c < dh; ++c) {
                    if (q->requires_grad)
                      chan_mut(q->grad, n, c0 + c)[i * W + j] +=
                          ds[t] * chan(k->value, n, c0 + c)[mi * W + mj];
                    if (k->requires_grad)
                      chan_mut(k->grad, n, c0 + c)[mi * W + mj] +=
                          ds[t] * chan(q->value, n, c0 + c)[i * W + j];
                  }
                }
              }
          }
      });
}

// ---- losses ----

// Softmax cross-entropy summed over rows; logits [K, C], labels in [0, C).
template <class T>
Var<T> softmax_ce_sum(const Var<T>& logits, std::vector<int> labels) {
  const int K = logits->value.dim(0), C = logits->value.dim(1);
  if (static_cast<int>(labels.size()) != K)
    throw std::invalid_argument("softmax_ce_sum: label count mismatch");
  auto probs = std::make_shared<Tensor<T>>(logits->value);
  T loss = T(0);
  for (int i = 0; i < K; ++i) {
    T* row = probs->data() + static_cast<std::int64_t>(i) * C;
    T maxv = row[0];
    for (int c = 1; c < C; ++c) maxv = std::max(maxv, row[c]);
    T denom = T(0);
    for (int c = 0; c < C; ++c) {
      row[c] = std::exp(row[c] - maxv);
      denom += row[c];
    }
    for (int c = 0; c < C; ++c) row[c] /= denom;
    loss -= std::log(std::max(row[labels[i]], std::numeric_limits<T>::min()));
  }
  auto lab = std::make_shared<std::vector<int>>(std::move(labels));
  return make_op<T>(Tensor<T>::scalar(loss), {logits}, [logits, probs, lab, K, C](Node<T>& n) {
    if (!logits->requires_grad) return;
    const T g = n.grad[0];
    for (int i = 0; i < K; ++i)
      for (int c = 0; c < C; ++c) {
        const T p = (*probs)[static_cast<std::int64_t>(i) * C + c];
        logits->grad[static_cast<std::int64_t>(i) * C + c] +=
            g * (p - (c == (*lab)[i] ? T(1) : T(0)));
      }
  });
}

// Elementwise smooth-L1 (transition at 1) summed over all entries.
template <class T>
Var<T> smooth_l1_sum(const Var<T>& pred, const Tensor<T>& target) {
  if (!pred->value.same_shape(target))
    throw std::invalid_argument("smooth_l1_sum: shape mismatch");
  T loss = T(0);
  for (std::int64_t i = 0; i < pred->value.size(); ++i) {
    const T d = pred->value[i] - target[i];
    const T a = std::abs(d);
    loss += a < T(1) ? T(0.5) * d * d : a - T(0.5);
  }
  auto tgt = std::make_shared<Tensor<T>>(target);
  return make_op<T>(Tensor<T>::scalar(loss), {pred}, [pred, tgt](Node<T>& n) {
    if (!pred->requires_grad) return;
    const T g = n.grad[0];
    for (std::int64_t i = 0; i < pred->value.size(); ++i) {
      const T d = pred->value[i] - (*tgt)[i];
      pred->grad[i] += g * std::clamp(d, T(-1), T(1));
    }
  });
}

}  // namespace dgcan::net
