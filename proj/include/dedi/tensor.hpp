#pragma once

// Tape-based reverse-mode autodiff over dense row-major tensors. The op set
// is fixed (see op_registry); every op records a backward closure on the
// thread-local active tape when any input requires gradients. Tensors are
// immutable after construction; gradients accumulate in-place until cleared.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "dedi/common.hpp"

namespace dedi {

using Shape = std::vector<int64_t>;

int64_t numel(const Shape& s);
std::string shape_str(const Shape& s);

template <class T>
struct TensorImpl {
  Shape shape;
  std::vector<T> data;
  bool requires_grad = false;
  bool frozen = false;
  std::string name;
  std::vector<T> grad;  // empty until first accumulation

  int64_t size() const { return static_cast<int64_t>(data.size()); }
  std::vector<T>& grad_buf() {
    if (grad.empty()) grad.assign(data.size(), T(0));
    return grad;
  }
};

template <class T>
using Tensor = std::shared_ptr<TensorImpl<T>>;

// ---------------------------------------------------------------------------
// Factories
// ---------------------------------------------------------------------------

template <class T>
Tensor<T> make_tensor(Shape shape) {
  auto t = std::make_shared<TensorImpl<T>>();
  int64_t n = numel(shape);
  t->shape = std::move(shape);
  t->data.assign(static_cast<size_t>(n), T(0));
  return t;
}

template <class T>
Tensor<T> tensor_of(Shape shape, std::vector<T> data) {
  if (numel(shape) != static_cast<int64_t>(data.size()))
    throw std::invalid_argument("tensor_of: shape " + shape_str(shape) +
                                " does not match data length " +
                                std::to_string(data.size()));
  auto t = std::make_shared<TensorImpl<T>>();
  t->shape = std::move(shape);
  t->data = std::move(data);
  return t;
}

template <class T>
Tensor<T> full(Shape shape, T v) {
  auto t = make_tensor<T>(std::move(shape));
  std::fill(t->data.begin(), t->data.end(), v);
  return t;
}

template <class T>
Tensor<T> scalar_tensor(T v) {
  return tensor_of<T>({1}, {v});
}

template <class T>
Tensor<T> randn(Shape shape, Rng& rng, T stddev = T(1)) {
  auto t = make_tensor<T>(std::move(shape));
  for (auto& x : t->data) x = static_cast<T>(rng.normal()) * stddev;
  return t;
}

template <class T>
void set_requires_grad(const Tensor<T>& t, bool v) {
  if (v && t->frozen)
    throw std::runtime_error("cannot attach gradient to frozen tensor '" +
                             t->name + "'");
  t->requires_grad = v;
}

template <class T>
void freeze_tensor(const Tensor<T>& t) {
  t->frozen = true;
  t->requires_grad = false;
}

template <class T>
Tensor<T> param(Shape shape, Rng& rng, T stddev, std::string name) {
  auto t = randn<T>(std::move(shape), rng, stddev);
  t->requires_grad = true;
  t->name = std::move(name);
  return t;
}

// ---------------------------------------------------------------------------
// Tape
// ---------------------------------------------------------------------------

template <class T>
class Tape {
 public:
  struct Record {
    Tensor<T> out;
    std::function<void()> fn;
  };

  void record(Tensor<T> out, std::function<void()> fn) {
    records_.push_back({std::move(out), std::move(fn)});
  }

  // Reverse sweep from a scalar loss. Interior grads are reset per call, so
  // repeated calls accumulate linearly into leaf gradients.
  void backward(const Tensor<T>& loss) {
    if (loss->size() != 1)
      throw std::invalid_argument("backward: loss must be scalar, got shape " +
                                  shape_str(loss->shape));
    bool found = false;
    for (const auto& r : records_)
      if (r.out.get() == loss.get()) found = true;
    if (!found)
      throw std::invalid_argument("backward: loss is not connected to this tape");
    for (auto& r : records_) r.out->grad.assign(r.out->data.size(), T(0));
    loss->grad_buf()[0] = T(1);
    for (auto it = records_.rbegin(); it != records_.rend(); ++it) it->fn();
  }

  size_t size() const { return records_.size(); }
  void clear() { records_.clear(); }

 private:
  std::vector<Record> records_;
};

template <class T>
inline Tape<T>*& active_tape() {
  thread_local Tape<T>* tape = nullptr;
  return tape;
}

template <class T>
struct TapeScope {
  Tape<T>* prev;
  explicit TapeScope(Tape<T>& t) : prev(active_tape<T>()) {
    active_tape<T>() = &t;
  }
  ~TapeScope() { active_tape<T>() = prev; }
};

namespace detail {

template <class T>
bool taping(std::initializer_list<const Tensor<T>*> ins) {
  if (!active_tape<T>()) return false;
  for (auto* p : ins)
    if ((*p)->requires_grad) return true;
  return false;
}

template <class T>
void finish(const Tensor<T>& out, bool taped, std::function<void()> fn,
            const char* op) {
#ifndef NDEBUG
  for (T v : out->data)
    if (!std::isfinite(static_cast<double>(v)))
      throw std::runtime_error(std::string(op) + ": non-finite value in output");
#else
  (void)op;
#endif
  if (taped) {
    out->requires_grad = true;
    active_tape<T>()->record(out, std::move(fn));
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// GEMM (row-major), backed by Eigen. C = op(A)*op(B) + beta*C. Large outputs
// are split into row bands across threads; every element is still produced by
// one worker, keeping results reproducible for a fixed thread count.
// ---------------------------------------------------------------------------

template <class T>
void gemm(bool trans_a, bool trans_b, int64_t m, int64_t n, int64_t k,
          const T* a, int64_t lda, const T* b, int64_t ldb, T beta, T* c,
          int64_t ldc) {
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using CMap = Eigen::Map<Mat, 0, Eigen::OuterStride<>>;
  using KMap = Eigen::Map<const Mat, 0, Eigen::OuterStride<>>;

  auto run = [&](int64_t r0, int64_t r1) {
    int64_t rows = r1 - r0;
    if (rows <= 0) return;
    CMap cm(c + r0 * ldc, rows, n, Eigen::OuterStride<>(ldc));
    if (!trans_a && !trans_b) {
      KMap am(a + r0 * lda, rows, k, Eigen::OuterStride<>(lda));
      KMap bm(b, k, n, Eigen::OuterStride<>(ldb));
      if (beta == T(0)) cm.noalias() = am * bm;
      else cm.noalias() += am * bm;
    } else if (trans_a && !trans_b) {
      KMap am(a, k, m, Eigen::OuterStride<>(lda));  // logical A is am^T
      KMap bm(b, k, n, Eigen::OuterStride<>(ldb));
      if (beta == T(0)) cm.noalias() = am.middleCols(r0, rows).transpose() * bm;
      else cm.noalias() += am.middleCols(r0, rows).transpose() * bm;
    } else if (!trans_a && trans_b) {
      KMap am(a + r0 * lda, rows, k, Eigen::OuterStride<>(lda));
      KMap bm(b, n, k, Eigen::OuterStride<>(ldb));
      if (beta == T(0)) cm.noalias() = am * bm.transpose();
      else cm.noalias() += am * bm.transpose();
    } else {
      KMap am(a, k, m, Eigen::OuterStride<>(lda));
      KMap bm(b, n, k, Eigen::OuterStride<>(ldb));
      if (beta == T(0))
        cm.noalias() = am.middleCols(r0, rows).transpose() * bm.transpose();
      else
        cm.noalias() += am.middleCols(r0, rows).transpose() * bm.transpose();
    }
  };

  if (m * n * k >= (int64_t(1) << 21) && m >= 2 * 64 && thread_count() > 1) {
    parallel_for(m, 64, [&](int64_t lo, int64_t hi) { run(lo, hi); });
  } else {
    run(0, m);
  }
}

// ---------------------------------------------------------------------------
// Elementwise ops with right-aligned broadcasting of the second operand.
// ---------------------------------------------------------------------------

namespace detail {

struct BcastPlan {
  enum Kind { Same, Scalar, OneAxis, General } kind;
  int64_t len = 1, inner = 1;          // OneAxis: b_idx = (i / inner) % len
  std::vector<int64_t> out_dims, b_strides;  // General
};

BcastPlan bcast_plan(const Shape& a, const Shape& b, const char* op);
int64_t bcast_index(const BcastPlan& p, int64_t i);

}  // namespace detail

template <class T>
Tensor<T> add(Tensor<T> a, Tensor<T> b) {
  if (numel(b->shape) > numel(a->shape)) std::swap(a, b);
  auto plan = detail::bcast_plan(a->shape, b->shape, "add");
  auto out = make_tensor<T>(a->shape);
  int64_t n = a->size();
  const T* pa = a->data.data();
  const T* pb = b->data.data();
  T* po = out->data.data();
  if (plan.kind == detail::BcastPlan::Same) {
    for (int64_t i = 0; i < n; ++i) po[i] = pa[i] + pb[i];
  } else if (plan.kind == detail::BcastPlan::Scalar) {
    T v = pb[0];
    for (int64_t i = 0; i < n; ++i) po[i] = pa[i] + v;
  } else {
    for (int64_t i = 0; i < n; ++i) po[i] = pa[i] + pb[detail::bcast_index(plan, i)];
  }
  bool taped = detail::taping<T>({&a, &b});
  detail::finish(out, taped, [a, b, out, plan] {
    const auto& g = out->grad;
    int64_t n = out->size();
    if (a->requires_grad) {
      auto& ga = a->grad_buf();
      for (int64_t i = 0; i < n; ++i) ga[i] += g[i];
    }
    if (b->requires_grad) {
      auto& gb = b->grad_buf();
      if (plan.kind == detail::BcastPlan::Same) {
        for (int64_t i = 0; i < n; ++i) gb[i] += g[i];
      } else {
        for (int64_t i = 0; i < n; ++i) gb[detail::bcast_index(plan, i)] += g[i];
      }
    }
  }, "add");
  return out;
}

template <class T>
Tensor<T> mul(Tensor<T> a, Tensor<T> b) {
  if (numel(b->shape) > numel(a->shape)) std::swap(a, b);
  auto plan = detail::bcast_plan(a->shape, b->shape, "mul");
  auto out = make_tensor<T>(a->shape);
  int64_t n = a->size();
  const T* pa = a->data.data();
  const T* pb = b->data.data();
  T* po = out->data.data();
  if (plan.kind == detail::BcastPlan::Same) {
    for (int64_t i = 0; i < n; ++i) po[i] = pa[i] * pb[i];
  } else if (plan.kind == detail::BcastPlan::Scalar) {
    T v = pb[0];
    for (int64_t i = 0; i < n; ++i) po[i] = pa[i] * v;
  } else {
    for (int64_t i = 0; i < n; ++i) po[i] = pa[i] * pb[detail::bcast_index(plan, i)];
  }
  bool taped = detail::taping<T>({&a, &b});
  detail::finish(out, taped, [a, b, out, plan] {
    const auto& g = out->grad;
    int64_t n = out->size();
    const T* pa = a->data.data();
    const T* pb = b->data.data();
    if (a->requires_grad) {
      auto& ga = a->grad_buf();
      if (plan.kind == detail::BcastPlan::Same) {
        for (int64_t i = 0; i < n; ++i) ga[i] += g[i] * pb[i];
      } else if (plan.kind == detail::BcastPlan::Scalar) {
        T v = pb[0];
        for (int64_t i = 0; i < n; ++i) ga[i] += g[i] * v;
      } else {
        for (int64_t i = 0; i < n; ++i)
          ga[i] += g[i] * pb[detail::bcast_index(plan, i)];
      }
    }
    if (b->requires_grad) {
      auto& gb = b->grad_buf();
      if (plan.kind == detail::BcastPlan::Same) {
        for (int64_t i = 0; i < n; ++i) gb[i] += g[i] * pa[i];
      } else {
        for (int64_t i = 0; i < n; ++i)
          gb[detail::bcast_index(plan, i)] += g[i] * pa[i];
      }
    }
  }, "mul");
  return out;
}

template <class T>
Tensor<T> scale(const Tensor<T>& a, T c) {
  return mul(a, scalar_tensor<T>(c));
}

// ---------------------------------------------------------------------------
// matmul: [*, M, K] x [*, K, N] or [*, M, K] x [K, N] (shared right operand).
// ---------------------------------------------------------------------------

template <class T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  const Shape& sa = a->shape;
  const Shape& sb = b->shape;
  if (sa.size() < 2 || sb.size() < 2)
    throw std::invalid_argument("matmul: need >=2-d operands, got " +
                                shape_str(sa) + " and " + shape_str(sb));
  int64_t m = sa[sa.size() - 2], k = sa[sa.size() - 1];
  int64_t kb = sb[sb.size() - 2], n = sb[sb.size() - 1];
  bool shared_rhs = sb.size() == 2 && sa.size() > 2;
  if (!shared_rhs && sa.size() != sb.size())
    throw std::invalid_argument("matmul: rank mismatch: " + shape_str(sa) +
                                " vs " + shape_str(sb));
  if (k != kb)
    throw std::invalid_argument("matmul: inner dims differ: " + shape_str(sa) +
                                " vs " + shape_str(sb));
  int64_t groups = 1;
  Shape out_shape;
  for (size_t i = 0; i + 2 < sa.size(); ++i) {
    if (!shared_rhs && sb[i] != sa[i])
      throw std::invalid_argument("matmul: batch dims differ: " + shape_str(sa) +
                                  " vs " + shape_str(sb));
    groups *= sa[i];
    out_shape.push_back(sa[i]);
  }
  out_shape.push_back(m);
  out_shape.push_back(n);
  auto out = make_tensor<T>(out_shape);

  const T* pa = a->data.data();
  const T* pb = b->data.data();
  T* po = out->data.data();
  int64_t a_step = m * k, b_step = shared_rhs ? 0 : k * n, o_step = m * n;
  if (groups == 1) {
    gemm<T>(false, false, m, n, k, pa, k, pb, n, T(0), po, n);
  } else {
    parallel_for(groups, 1, [&](int64_t lo, int64_t hi) {
      for (int64_t g = lo; g < hi; ++g)
        gemm<T>(false, false, m, n, k, pa + g * a_step, k, pb + g * b_step, n,
                T(0), po + g * o_step, n);
    });
  }

  bool taped = detail::taping<T>({&a, &b});
  detail::finish(out, taped,
      [a, b, out, m, n, k, groups, a_step, b_step, o_step, shared_rhs] {
        const T* pa = a->data.data();
        const T* pb = b->data.data();
        const T* pg = out->grad.data();
        if (a->requires_grad) {
          T* ga = a->grad_buf().data();
          for (int64_t g = 0; g < groups; ++g)
            gemm<T>(false, true, m, k, n, pg + g * o_step, n, pb + g * b_step, n,
                    T(1), ga + g * a_step, k);
        }
        if (b->requires_grad) {
          T* gb = b->grad_buf().data();
          if (shared_rhs) {
            for (int64_t g = 0; g < groups; ++g)
              gemm<T>(true, false, k, n, m, pa + g * a_step, k, pg + g * o_step,
                      n, T(1), gb, n);
          } else {
            for (int64_t g = 0; g < groups; ++g)
              gemm<T>(true, false, k, n, m, pa + g * a_step, k, pg + g * o_step,
                      n, T(1), gb + g * b_step, n);
          }
        }
      },
      "matmul");
  return out;
}

// ---------------------------------------------------------------------------
// conv2d: x [B,H,W,C], w [kh,kw,C,O], zero padding, square stride. Channels-
// last keeps the lowered GEMM output in the tensor's own layout. The column
// buffer is rebuilt in backward rather than kept alive on the tape.
// ---------------------------------------------------------------------------

namespace detail {

// NHWC im2col: one row per output pixel, laid out (ky, kx, c). For stride 1
// each ky contributes a single contiguous kw*c span of the input row.
template <class T>
void im2col_nhwc(const T* x, int64_t h, int64_t w, int64_t c, int64_t kh,
                 int64_t kw, int64_t stride, int64_t pad, int64_t ho,
                 int64_t wo, T* col) {
  int64_t row_len = kh * kw * c;
  for (int64_t oy = 0; oy < ho; ++oy) {
    for (int64_t ox = 0; ox < wo; ++ox) {
      T* row = col + (oy * wo + ox) * row_len;
      for (int64_t ky = 0; ky < kh; ++ky) {
        int64_t iy = oy * stride + ky - pad;
        T* dst = row + ky * kw * c;
        if (iy < 0 || iy >= h) {
          std::fill(dst, dst + kw * c, T(0));
          continue;
        }
        int64_t ix0 = ox * stride - pad;
        if (ix0 >= 0 && ix0 + kw <= w) {
          std::memcpy(dst, x + (iy * w + ix0) * c,
                      sizeof(T) * static_cast<size_t>(kw * c));
        } else {
          for (int64_t kx = 0; kx < kw; ++kx) {
            int64_t ix = ix0 + kx;
            if (ix >= 0 && ix < w)
              std::memcpy(dst + kx * c, x + (iy * w + ix) * c,
                          sizeof(T) * static_cast<size_t>(c));
            else
              std::fill(dst + kx * c, dst + (kx + 1) * c, T(0));
          }
        }
      }
    }
  }
}

template <class T>
void col2im_nhwc_acc(const T* col, int64_t h, int64_t w, int64_t c, int64_t kh,
                     int64_t kw, int64_t stride, int64_t pad, int64_t ho,
                     int64_t wo, T* gx) {
  int64_t row_len = kh * kw * c;
  for (int64_t oy = 0; oy < ho; ++oy) {
    for (int64_t ox = 0; ox < wo; ++ox) {
      const T* row = col + (oy * wo + ox) * row_len;
      for (int64_t ky = 0; ky < kh; ++ky) {
        int64_t iy = oy * stride + ky - pad;
        if (iy < 0 || iy >= h) continue;
        const T* src = row + ky * kw * c;
        for (int64_t kx = 0; kx < kw; ++kx) {
          int64_t ix = ox * stride + kx - pad;
          if (ix < 0 || ix >= w) continue;
          T* dst = gx + (iy * w + ix) * c;
          const T* s = src + kx * c;
          for (int64_t ch = 0; ch < c; ++ch) dst[ch] += s[ch];
        }
      }
    }
  }
}

}  // namespace detail

template <class T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, int64_t stride = 1,
                 int64_t pad = 0) {
  const Shape& sx = x->shape;
  const Shape& sw = w->shape;
  if (sx.size() != 4 || sw.size() != 4)
    throw std::invalid_argument("conv2d: expected 4-d input and kernel, got " +
                                shape_str(sx) + " and " + shape_str(sw));
  if (sx[3] != sw[2])
    throw std::invalid_argument("conv2d: channel mismatch: input " +
                                shape_str(sx) + " vs kernel " + shape_str(sw));
  if (stride < 1) throw std::invalid_argument("conv2d: stride must be >= 1");
  int64_t batch = sx[0], h = sx[1], wd = sx[2], c = sx[3];
  int64_t kh = sw[0], kw = sw[1], oc = sw[3];
  int64_t ho = (h + 2 * pad - kh) / stride + 1;
  int64_t wo = (wd + 2 * pad - kw) / stride + 1;
  if (ho < 1 || wo < 1)
    throw std::invalid_argument("conv2d: kernel " + shape_str(sw) +
                                " too large for input " + shape_str(sx));
  int64_t ckk = kh * kw * c, hw = ho * wo;
  auto out = make_tensor<T>({batch, ho, wo, oc});

  // col [batch*hw, ckk]; out_flat [batch*hw, oc] = col * w_flat [ckk, oc]
  std::vector<T> col(static_cast<size_t>(batch * hw * ckk));
  const T* px = x->data.data();
  const T* pw = w->data.data();
  parallel_for(batch, 1, [&](int64_t lo, int64_t hi) {
    for (int64_t b = lo; b < hi; ++b)
      detail::im2col_nhwc(px + b * h * wd * c, h, wd, c, kh, kw, stride, pad,
                          ho, wo, col.data() + b * hw * ckk);
  });
  gemm<T>(false, false, batch * hw, oc, ckk, col.data(), ckk, pw, oc, T(0),
          out->data.data(), oc);

  bool taped = detail::taping<T>({&x, &w});
  detail::finish(out, taped,
      [x, w, out, batch, c, h, wd, oc, kh, kw, stride, pad, ho, wo, ckk, hw] {
        int64_t rows = batch * hw;
        const T* pg = out->grad.data();
        const T* px = x->data.data();
        const T* pw = w->data.data();
        if (w->requires_grad) {
          std::vector<T> col(static_cast<size_t>(rows * ckk));
          parallel_for(batch, 1, [&](int64_t lo, int64_t hi) {
            for (int64_t b = lo; b < hi; ++b)
              detail::im2col_nhwc(px + b * h * wd * c, h, wd, c, kh, kw, stride,
                                  pad, ho, wo, col.data() + b * hw * ckk);
          });
          gemm<T>(true, false, ckk, oc, rows, col.data(), ckk, pg, oc, T(1),
                  w->grad_buf().data(), oc);
        }
        if (x->requires_grad) {
          std::vector<T> gcol(static_cast<size_t>(rows * ckk));
          gemm<T>(false, true, rows, ckk, oc, pg, oc, pw, oc, T(0), gcol.data(),
                  ckk);
          T* gx = x->grad_buf().data();
          parallel_for(batch, 1, [&](int64_t lo, int64_t hi) {
            for (int64_t b = lo; b < hi; ++b)
              detail::col2im_nhwc_acc(gcol.data() + b * hw * ckk, h, wd, c, kh,
                                      kw, stride, pad, ho, wo,
                                      gx + b * h * wd * c);
          });
        }
      },
      "conv2d");
  return out;
}

// ---------------------------------------------------------------------------
// Shape ops
// ---------------------------------------------------------------------------

template <class T>
Tensor<T> transpose(const Tensor<T>& x, int64_t dim0, int64_t dim1) {
  int64_t nd = static_cast<int64_t>(x->shape.size());
  if (dim0 < 0) dim0 += nd;
  if (dim1 < 0) dim1 += nd;
  if (dim0 < 0 || dim0 >= nd || dim1 < 0 || dim1 >= nd)
    throw std::invalid_argument("transpose: dims out of range for shape " +
                                shape_str(x->shape));
  Shape os = x->shape;
  std::swap(os[dim0], os[dim1]);
  auto out = make_tensor<T>(os);
  if (dim0 == dim1) {
    out->data = x->data;
  } else {
    if (dim0 > dim1) std::swap(dim0, dim1);
    int64_t outer = 1, mid = 1, inner = 1;
    for (int64_t i = 0; i < dim0; ++i) outer *= x->shape[i];
    for (int64_t i = dim0 + 1; i < dim1; ++i) mid *= x->shape[i];
    for (int64_t i = dim1 + 1; i < nd; ++i) inner *= x->shape[i];
    int64_t d0 = x->shape[dim0], d1 = x->shape[dim1];
    const T* px = x->data.data();
    T* po = out->data.data();
    // out[o][b][m][a][i] = x[o][a][m][b][i]
    parallel_for(outer, 1, [&](int64_t lo, int64_t hi) {
      for (int64_t o = lo; o < hi; ++o)
        for (int64_t b = 0; b < d1; ++b)
          for (int64_t m = 0; m < mid; ++m)
            for (int64_t a = 0; a < d0; ++a) {
              const T* src = px + (((o * d0 + a) * mid + m) * d1 + b) * inner;
              T* dst = po + (((o * d1 + b) * mid + m) * d0 + a) * inner;
              std::memcpy(dst, src, sizeof(T) * static_cast<size_t>(inner));
            }
    });
  }
  bool taped = detail::taping<T>({&x});
  int64_t a0 = dim0, a1 = dim1;
  detail::finish(out, taped, [x, out, a0, a1] {
    if (!x->requires_grad) return;
    // transpose the gradient back
    auto gt = make_tensor<T>(out->shape);
    gt->data = out->grad;
    Tape<T>* saved = active_tape<T>();
    active_tape<T>() = nullptr;
    auto gback = transpose(gt, a0, a1);
    active_tape<T>() = saved;
    auto& gx = x->grad_buf();
    for (int64_t i = 0; i < x->size(); ++i) gx[i] += gback->data[i];
  }, "transpose");
  return out;
}

template <class T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape) {
  if (numel(shape) != x->size())
    throw std::invalid_argument("reshape: cannot view " + shape_str(x->shape) +
                                " as " + shape_str(shape));
  auto out = std::make_shared<TensorImpl<T>>();
  out->shape = std::move(shape);
  out->data = x->data;
  bool taped = detail::taping<T>({&x});
  detail::finish(out, taped, [x, out] {
    if (!x->requires_grad) return;
    auto& gx = x->grad_buf();
    for (int64_t i = 0; i < x->size(); ++i) gx[i] += out->grad[i];
  }, "reshape");
  return out;
}

template <class T>
Tensor<T> slice(const Tensor<T>& x, int64_t dim, int64_t start, int64_t len) {
  int64_t nd = static_cast<int64_t>(x->shape.size());
  if (dim < 0) dim += nd;
  if (dim < 0 || dim >= nd || start < 0 || len < 1 ||
      start + len > x->shape[dim])
    throw std::invalid_argument("slice: range [" + std::to_string(start) + "," +
                                std::to_string(start + len) +
                                ") invalid for dim " + std::to_string(dim) +
                                " of " + shape_str(x->shape));
  Shape os = x->shape;
  os[dim] = len;
  auto out = make_tensor<T>(os);
  int64_t outer = 1, inner = 1;
  for (int64_t i = 0; i < dim; ++i) outer *= x->shape[i];
  for (int64_t i = dim + 1; i < nd; ++i) inner *= x->shape[i];
  int64_t d = x->shape[dim];
  const T* px = x->data.data();
  T* po = out->data.data();
  for (int64_t o = 0; o < outer; ++o)
    std::memcpy(po + o * len * inner, px + (o * d + start) * inner,
                sizeof(T) * static_cast<size_t>(len * inner));
  bool taped = detail::taping<T>({&x});
  detail::finish(out, taped, [x, out, outer, inner, d, start, len] {
    if (!x->requires_grad) return;
    auto& gx = x->grad_buf();
    const T* pg = out->grad.data();
    for (int64_t o = 0; o < outer; ++o) {
      T* dst = gx.data() + (o * d + start) * inner;
      const T* src = pg + o * len * inner;
      for (int64_t i = 0; i < len * inner; ++i) dst[i] += src[i];
    }
  }, "slice");
  return out;
}

template <class T>
Tensor<T> concat(const std::vector<Tensor<T>>& xs, int64_t dim) {
  if (xs.empty()) throw std::invalid_argument("concat: empty input list");
  int64_t nd = static_cast<int64_t>(xs[0]->shape.size());
  if (dim < 0) dim += nd;
  if (dim < 0 || dim >= nd)
    throw std::invalid_argument("concat: dim out of range");
  Shape os = xs[0]->shape;
  int64_t total = 0;
  for (const auto& x : xs) {
    if (static_cast<int64_t>(x->shape.size()) != nd)
      throw std::invalid_argument("concat: rank mismatch: " +
                                  shape_str(xs[0]->shape) + " vs " +
                                  shape_str(x->shape));
    for (int64_t i = 0; i < nd; ++i)
      if (i != dim && x->shape[i] != os[i])
        throw std::invalid_argument("concat: shape mismatch: " +
                                    shape_str(xs[0]->shape) + " vs " +
                                    shape_str(x->shape));
    total += x->shape[dim];
  }
  os[dim] = total;
  auto out = make_tensor<T>(os);
  int64_t outer = 1, inner = 1;
  for (int64_t i = 0; i < dim; ++i) outer *= os[i];
  for (int64_t i = dim + 1; i < nd; ++i) inner *= os[i];
  T* po = out->data.data();
  int64_t off = 0;
  for (const auto& x : xs) {
    int64_t d = x->shape[dim];
    const T* px = x->data.data();
    for (int64_t o = 0; o < outer; ++o)
      std::memcpy(po + (o * total + off) * inner, px + o * d * inner,
                  sizeof(T) * static_cast<size_t>(d * inner));
    off += d;
  }
  bool taped = active_tape<T>() != nullptr &&
               std::any_of(xs.begin(), xs.end(),
                           [](const Tensor<T>& t) { return t->requires_grad; });
  auto parts = xs;
  detail::finish(out, taped, [parts, out, outer, inner, total] {
    const T* pg = out->grad.data();
    int64_t off = 0;
    for (const auto& x : parts) {
      int64_t d = x->size() / (outer * inner);
      if (x->requires_grad) {
        auto& gx = x->grad_buf();
        for (int64_t o = 0; o < outer; ++o) {
          const T* src = pg + (o * total + off) * inner;
          T* dst = gx.data() + o * d * inner;
          for (int64_t i = 0; i < d * inner; ++i) dst[i] += src[i];
        }
      }
      off += d;
    }
  }, "concat");
  return out;
}

// ---------------------------------------------------------------------------
// Row-wise ops over the last dimension
// ---------------------------------------------------------------------------

template <class T>
Tensor<T> softmax(const Tensor<T>& x) {
  if (x->shape.empty())
    throw std::invalid_argument("softmax: scalar input not supported");
  int64_t d = x->shape.back();
  int64_t rows = x->size() / d;
  auto out = make_tensor<T>(x->shape);
  const T* px = x->data.data();
  T* po = out->data.data();
  parallel_for(rows, 64, [&](int64_t lo, int64_t hi) {
    for (int64_t r = lo; r < hi; ++r) {
      const T* xr = px + r * d;
      T* yr = po + r * d;
      T mx = xr[0];
      for (int64_t i = 1; i < d; ++i) mx = std::max(mx, xr[i]);
      T sum = T(0);
      for (int64_t i = 0; i < d; ++i) {
        yr[i] = std::exp(xr[i] - mx);
        sum += yr[i];
      }
      T inv = T(1) / sum;
      for (int64_t i = 0; i < d; ++i) yr[i] *= inv;
    }
  });
  bool taped = detail::taping<T>({&x});
  detail::finish(out, taped, [x, out, rows, d] {
    if (!x->requires_grad) return;
    auto& gx = x->grad_buf();
    const T* y = out->data.data();
    const T* g = out->grad.data();
    for (int64_t r = 0; r < rows; ++r) {
      T dot = T(0);
      for (int64_t i = 0; i < d; ++i) dot += g[r * d + i] * y[r * d + i];
      for (int64_t i = 0; i < d; ++i)
        gx[r * d + i] += y[r * d + i] * (g[r * d + i] - dot);
    }
  }, "softmax");
  return out;
}

template <class T>
Tensor<T> log_softmax(const Tensor<T>& x) {
  if (x->shape.empty())
    throw std::invalid_argument("log_softmax: scalar input not supported");
  int64_t d = x->shape.back();
  int64_t rows = x->size() / d;
  auto out = make_tensor<T>(x->shape);
  const T* px = x->data.data();
  T* po = out->data.data();
  for (int64_t r = 0; r < rows; ++r) {
    const T* xr = px + r * d;
    T* yr = po + r * d;
    T mx = xr[0];
    for (int64_t i = 1; i < d; ++i) mx = std::max(mx, xr[i]);
    T sum = T(0);
    for (int64_t i = 0; i < d; ++i) sum += std::exp(xr[i] - mx);
    T lse = mx + std::log(sum);
    for (int64_t i = 0; i < d; ++i) yr[i] = xr[i] - lse;
  }
  bool taped = detail::taping<T>({&x});
  detail::finish(out, taped, [x, out, rows, d] {
    if (!x->requires_grad) return;
    auto& gx = x->grad_buf();
    const T* y = out->data.data();
    const T* g = out->grad.data();
    for (int64_t r = 0; r < rows; ++r) {
      T gs = T(0);
      for (int64_t i = 0; i < d; ++i) gs += g[r * d + i];
      for (int64_t i = 0; i < d; ++i)
        gx[r * d + i] += g[r * d + i] - std::exp(y[r * d + i]) * gs;
    }
  }, "log_softmax");
  return out;
}

template <class T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gamma,
                     const Tensor<T>& beta, T eps = T(1e-5)) {
  int64_t d = x->shape.back();
  if (gamma->size() != d || beta->size() != d)
    throw std::invalid_argument("layer_norm: affine params " +
                                shape_str(gamma->shape) + "/" +
                                shape_str(beta->shape) + " do not match last dim of " +
                                shape_str(x->shape));
  int64_t rows = x->size() / d;
  auto out = make_tensor<T>(x->shape);
  auto xhat = std::make_shared<std::vector<T>>(x->data.size());
  auto rstd = std::make_shared<std::vector<T>>(static_cast<size_t>(rows));
  const T* px = x->data.data();
  const T* pgm = gamma->data.data();
  const T* pbt = beta->data.data();
  T* po = out->data.data();
  for (int64_t r = 0; r < rows; ++r) {
    const T* xr = px + r * d;
    T mean = T(0);
    for (int64_t i = 0; i < d; ++i) mean += xr[i];
    mean /= static_cast<T>(d);
    T var = T(0);
    for (int64_t i = 0; i < d; ++i) var += (xr[i] - mean) * (xr[i] - mean);
    var /= static_cast<T>(d);
    T rs = T(1) / std::sqrt(var + eps);
    (*rstd)[r] = rs;
    for (int64_t i = 0; i < d; ++i) {
      T xh = (xr[i] - mean) * rs;
      (*xhat)[r * d + i] = xh;
      po[r * d + i] = xh * pgm[i] + pbt[i];
    }
  }
  bool taped = detail::taping<T>({&x, &gamma, &beta});
  detail::finish(out, taped, [x, gamma, beta, out, xhat, rstd, rows, d] {
    const T* g = out->grad.data();
    const T* xh = xhat->data();
    const T* pgm = gamma->data.data();
    if (gamma->requires_grad) {
      auto& gg = gamma->grad_buf();
      for (int64_t r = 0; r < rows; ++r)
        for (int64_t i = 0; i < d; ++i) gg[i] += g[r * d + i] * xh[r * d + i];
    }
    if (beta->requires_grad) {
      auto& gb = beta->grad_buf();
      for (int64_t r = 0; r < rows; ++r)
        for (int64_t i = 0; i < d; ++i) gb[i] += g[r * d + i];
    }
    if (x->requires_grad) {
      auto& gx = x->grad_buf();
      for (int64_t r = 0; r < rows; ++r) {
        T sum_gy = T(0), sum_gyx = T(0);
        for (int64_t i = 0; i < d; ++i) {
          T gy = g[r * d + i] * pgm[i];
          sum_gy += gy;
          sum_gyx += gy * xh[r * d + i];
        }
        T rs = (*rstd)[r];
        for (int64_t i = 0; i < d; ++i) {
          T gy = g[r * d + i] * pgm[i];
          gx[r * d + i] += rs * (gy - (sum_gy + xh[r * d + i] * sum_gyx) /
                                          static_cast<T>(d));
        }
      }
    }
  }, "layer_norm");
  return out;
}

template <class T>
Tensor<T> group_norm(const Tensor<T>& x, int64_t groups, const Tensor<T>& gamma,
                     const Tensor<T>& beta, T eps = T(1e-5)) {
  if (x->shape.size() != 4)
    throw std::invalid_argument("group_norm: expected [B,H,W,C], got " +
                                shape_str(x->shape));
  int64_t b = x->shape[0], hw = x->shape[1] * x->shape[2], c = x->shape[3];
  if (c % groups != 0)
    throw std::invalid_argument("group_norm: channels " + std::to_string(c) +
                                " not divisible by groups " +
                                std::to_string(groups));
  if (gamma->size() != c || beta->size() != c)
    throw std::invalid_argument("group_norm: affine params must have size C=" +
                                std::to_string(c));
  int64_t cg = c / groups;
  T gsz = static_cast<T>(cg * hw);
  auto out = make_tensor<T>(x->shape);
  auto xhat = std::make_shared<std::vector<T>>(x->data.size());
  auto rstd = std::make_shared<std::vector<T>>(static_cast<size_t>(b * groups));
  const T* px = x->data.data();
  const T* pgm = gamma->data.data();
  const T* pbt = beta->data.data();
  T* po = out->data.data();
  T* pxh = xhat->data();
  parallel_for(b, 1, [&](int64_t blo, int64_t bhi) {
    for (int64_t bb = blo; bb < bhi; ++bb) {
      const T* xb = px + bb * hw * c;
      for (int64_t g = 0; g < groups; ++g) {
        T mean = T(0), var = T(0);
        for (int64_t p = 0; p < hw; ++p) {
          const T* xr = xb + p * c + g * cg;
          for (int64_t i = 0; i < cg; ++i) mean += xr[i];
        }
        mean /= gsz;
        for (int64_t p = 0; p < hw; ++p) {
          const T* xr = xb + p * c + g * cg;
          for (int64_t i = 0; i < cg; ++i) var += (xr[i] - mean) * (xr[i] - mean);
        }
        var /= gsz;
        T rs = T(1) / std::sqrt(var + eps);
        (*rstd)[bb * groups + g] = rs;
        for (int64_t p = 0; p < hw; ++p) {
          int64_t base = (bb * hw + p) * c + g * cg;
          for (int64_t i = 0; i < cg; ++i) {
            T xh = (px[base + i] - mean) * rs;
            pxh[base + i] = xh;
            po[base + i] = xh * pgm[g * cg + i] + pbt[g * cg + i];
          }
        }
      }
    }
  });
  bool taped = detail::taping<T>({&x, &gamma, &beta});
  detail::finish(out, taped,
      [x, gamma, beta, out, xhat, rstd, b, groups, cg, hw, c, gsz] {
        const T* g = out->grad.data();
        const T* xh = xhat->data();
        const T* pgm = gamma->data.data();
        if (gamma->requires_grad || beta->requires_grad) {
          auto& gg = gamma->grad_buf();
          auto& gb = beta->grad_buf();
          for (int64_t r = 0; r < b * hw; ++r)
            for (int64_t ch = 0; ch < c; ++ch) {
              if (gamma->requires_grad) gg[ch] += g[r * c + ch] * xh[r * c + ch];
              if (beta->requires_grad) gb[ch] += g[r * c + ch];
            }
        }
        if (x->requires_grad) {
          auto& gx = x->grad_buf();
          parallel_for(b, 1, [&](int64_t blo, int64_t bhi) {
            for (int64_t bb = blo; bb < bhi; ++bb)
              for (int64_t grp = 0; grp < groups; ++grp) {
                T sum_gy = T(0), sum_gyx = T(0);
                for (int64_t p = 0; p < hw; ++p) {
                  int64_t base = (bb * hw + p) * c + grp * cg;
                  for (int64_t i = 0; i < cg; ++i) {
                    T gy = g[base + i] * pgm[grp * cg + i];
                    sum_gy += gy;
                    sum_gyx += gy * xh[base + i];
                  }
                }
                T rs = (*rstd)[bb * groups + grp];
                for (int64_t p = 0; p < hw; ++p) {
                  int64_t base = (bb * hw + p) * c + grp * cg;
                  for (int64_t i = 0; i < cg; ++i) {
                    T gy = g[base + i] * pgm[grp * cg + i];
                    gx[base + i] +=
                        rs * (gy - (sum_gy + xh[base + i] * sum_gyx) / gsz);
                  }
                }
              }
          });
        }
      },
      "group_norm");
  return out;
}

// ---------------------------------------------------------------------------
// Activations
// ---------------------------------------------------------------------------

template <class T>
Tensor<T> gelu(const Tensor<T>& x) {
  auto out = make_tensor<T>(x->shape);
  int64_t n = x->size();
  const T* px = x->data.data();
  T* po = out->data.data();
  const T inv_sqrt2 = T(0.7071067811865475244);
  for (int64_t i = 0; i < n; ++i)
    po[i] = T(0.5) * px[i] * (T(1) + std::erf(px[i] * inv_sqrt2));
  bool taped = detail::taping<T>({&x});
  detail::finish(out, taped, [x, out, n, inv_sqrt2] {
    if (!x->requires_grad) return;
    auto& gx = x->grad_buf();
    const T* px = x->data.data();
    const T* g = out->grad.data();
    const T inv_sqrt2pi = T(0.3989422804014326779);
    for (int64_t i = 0; i < n; ++i) {
      T cdf = T(0.5) * (T(1) + std::erf(px[i] * inv_sqrt2));
      T pdf = inv_sqrt2pi * std::exp(T(-0.5) * px[i] * px[i]);
      gx[i] += g[i] * (cdf + px[i] * pdf);
    }
  }, "gelu");
  return out;
}

template <class T>
Tensor<T> silu(const Tensor<T>& x) {
  auto out = make_tensor<T>(x->shape);
  int64_t n = x->size();
  const T* px = x->data.data();
  T* po = out->data.data();
  for (int64_t i = 0; i < n; ++i) {
    T s = T(1) / (T(1) + std::exp(-px[i]));
    po[i] = px[i] * s;
  }
  bool taped = detail::taping<T>({&x});
  detail::finish(out, taped, [x, out, n] {
    if (!x->requires_grad) return;
    auto& gx = x->grad_buf();
    const T* px = x->data.data();
    const T* g = out->grad.data();
    for (int64_t i = 0; i < n; ++i) {
      T s = T(1) / (T(1) + std::exp(-px[i]));
      gx[i] += g[i] * s * (T(1) + px[i] * (T(1) - s));
    }
  }, "silu");
  return out;
}

// ---------------------------------------------------------------------------
// Embedding lookup and reductions
// ---------------------------------------------------------------------------

template <class T>
Tensor<T> embedding_lookup(const Tensor<T>& table,
                           const std::vector<int64_t>& ids) {
  if (table->shape.size() != 2)
    throw std::invalid_argument("embedding_lookup: table must be 2-d, got " +
                                shape_str(table->shape));
  int64_t v = table->shape[0], d = table->shape[1];
  for (int64_t id : ids)
    if (id < 0 || id >= v)
      throw std::invalid_argument("embedding_lookup: id " + std::to_string(id) +
                                  " out of range [0," + std::to_string(v) + ")");
  auto out = make_tensor<T>({static_cast<int64_t>(ids.size()), d});
  const T* pt = table->data.data();
  T* po = out->data.data();
  for (size_t i = 0; i < ids.size(); ++i)
    std::memcpy(po + i * d, pt + ids[i] * d, sizeof(T) * static_cast<size_t>(d));
  bool taped = detail::taping<T>({&table});
  detail::finish(out, taped, [table, out, ids, d] {
    if (!table->requires_grad) return;
    auto& gt = table->grad_buf();
    const T* g = out->grad.data();
    for (size_t i = 0; i < ids.size(); ++i) {
      T* dst = gt.data() + ids[i] * d;
      const T* src = g + i * d;
      for (int64_t j = 0; j < d; ++j) dst[j] += src[j];
    }
  }, "embedding_lookup");
  return out;
}

template <class T>
Tensor<T> sum_all(const Tensor<T>& x) {
  auto out = make_tensor<T>({1});
  T acc = T(0);
  for (T v : x->data) acc += v;
  out->data[0] = acc;
  bool taped = detail::taping<T>({&x});
  detail::finish(out, taped, [x, out] {
    if (!x->requires_grad) return;
    auto& gx = x->grad_buf();
    T g = out->grad[0];
    for (int64_t i = 0; i < x->size(); ++i) gx[i] += g;
  }, "sum");
  return out;
}

template <class T>
Tensor<T> mean_all(const Tensor<T>& x) {
  auto out = make_tensor<T>({1});
  T acc = T(0);
  for (T v : x->data) acc += v;
  out->data[0] = acc / static_cast<T>(x->size());
  bool taped = detail::taping<T>({&x});
  detail::finish(out, taped, [x, out] {
    if (!x->requires_grad) return;
    auto& gx = x->grad_buf();
    T g = out->grad[0] / static_cast<T>(x->size());
    for (int64_t i = 0; i < x->size(); ++i) gx[i] += g;
  }, "mean");
  return out;
}

template <class T>
Tensor<T> mse(const Tensor<T>& a, const Tensor<T>& b) {
  if (a->shape != b->shape)
    throw std::invalid_argument("mse: shape mismatch: " + shape_str(a->shape) +
                                " vs " + shape_str(b->shape));
  auto out = make_tensor<T>({1});
  int64_t n = a->size();
  const T* pa = a->data.data();
  const T* pb = b->data.data();
  T acc = T(0);
  for (int64_t i = 0; i < n; ++i) {
    T dd = pa[i] - pb[i];
    acc += dd * dd;
  }
  out->data[0] = acc / static_cast<T>(n);
  bool taped = detail::taping<T>({&a, &b});
  detail::finish(out, taped, [a, b, out, n] {
    T g = out->grad[0] * T(2) / static_cast<T>(n);
    const T* pa = a->data.data();
    const T* pb = b->data.data();
    if (a->requires_grad) {
      auto& ga = a->grad_buf();
      for (int64_t i = 0; i < n; ++i) ga[i] += g * (pa[i] - pb[i]);
    }
    if (b->requires_grad) {
      auto& gb = b->grad_buf();
      for (int64_t i = 0; i < n; ++i) gb[i] -= g * (pa[i] - pb[i]);
    }
  }, "mse");
  return out;
}

// ---------------------------------------------------------------------------
// Composite helpers (built from registry ops, no extra backward rules)
// ---------------------------------------------------------------------------

// Nearest-neighbor 2x upsampling of [B,H,W,C] via duplicate-and-interleave.
template <class T>
Tensor<T> upsample2x(const Tensor<T>& x) {
  const Shape& s = x->shape;
  if (s.size() != 4)
    throw std::invalid_argument("upsample2x: expected [B,H,W,C], got " +
                                shape_str(s));
  auto r = reshape(x, {s[0], s[1], 1, s[2], 1, s[3]});
  auto rows = concat<T>({r, r}, 2);
  auto cols = concat<T>({rows, rows}, 4);
  return reshape(cols, {s[0], s[1] * 2, s[2] * 2, s[3]});
}

// ---------------------------------------------------------------------------
// String-dispatched op surface
// ---------------------------------------------------------------------------

using AttrValue = std::variant<int64_t, double, std::vector<int64_t>>;

struct OpAttrs {
  std::map<std::string, AttrValue> kv;

  int64_t get_int(const std::string& k, int64_t dflt) const {
    auto it = kv.find(k);
    if (it == kv.end()) return dflt;
    return std::get<int64_t>(it->second);
  }
  int64_t require_int(const std::string& k) const {
    auto it = kv.find(k);
    if (it == kv.end())
      throw std::invalid_argument("missing required attribute '" + k + "'");
    return std::get<int64_t>(it->second);
  }
  std::vector<int64_t> require_ints(const std::string& k) const {
    auto it = kv.find(k);
    if (it == kv.end())
      throw std::invalid_argument("missing required attribute '" + k + "'");
    return std::get<std::vector<int64_t>>(it->second);
  }
};

const std::vector<std::string>& op_registry();

template <class T>
Tensor<T> forward_op(const std::string& name, const std::vector<Tensor<T>>& in,
                     const OpAttrs& attrs = {}) {
  auto want = [&](size_t k) {
    if (in.size() != k)
      throw std::invalid_argument(name + ": expected " + std::to_string(k) +
                                  " inputs, got " + std::to_string(in.size()));
  };
  if (name == "add") { want(2); return add(in[0], in[1]); }
  if (name == "mul") { want(2); return mul(in[0], in[1]); }
  if (name == "matmul") { want(2); return matmul(in[0], in[1]); }
  if (name == "conv2d") {
    want(2);
    return conv2d(in[0], in[1], attrs.get_int("stride", 1), attrs.get_int("pad", 0));
  }
  if (name == "transpose") {
    want(1);
    return transpose(in[0], attrs.require_int("dim0"), attrs.require_int("dim1"));
  }
  if (name == "reshape") { want(1); return reshape(in[0], attrs.require_ints("shape")); }
  if (name == "slice") {
    want(1);
    return slice(in[0], attrs.require_int("dim"), attrs.require_int("start"),
                 attrs.require_int("len"));
  }
  if (name == "concat") {
    if (in.empty()) throw std::invalid_argument("concat: no inputs");
    return concat(in, attrs.require_int("dim"));
  }
  if (name == "softmax") { want(1); return softmax(in[0]); }
  if (name == "log_softmax") { want(1); return log_softmax(in[0]); }
  if (name == "layer_norm") { want(3); return layer_norm(in[0], in[1], in[2]); }
  if (name == "group_norm") {
    want(3);
    return group_norm(in[0], attrs.require_int("groups"), in[1], in[2]);
  }
  if (name == "gelu") { want(1); return gelu(in[0]); }
  if (name == "silu") { want(1); return silu(in[0]); }
  if (name == "embedding_lookup") {
    want(1);
    return embedding_lookup(in[0], attrs.require_ints("ids"));
  }
  if (name == "mean") { want(1); return mean_all(in[0]); }
  if (name == "sum") { want(1); return sum_all(in[0]); }
  if (name == "mse") { want(2); return mse(in[0], in[1]); }
  throw std::invalid_argument("unknown op '" + name + "'");
}

// Clears accumulated leaf gradients.
template <class T>
void zero_grad(const std::vector<Tensor<T>>& params) {
  for (const auto& p : params) p->grad.clear();
}

}  // namespace dedi
