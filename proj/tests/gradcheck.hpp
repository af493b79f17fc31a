#pragma once

// Central finite-difference gradient checking for every registered op.
// Shared between the unit tests and the acceptance suite. The FD oracle is
// always evaluated in double precision with no tape active; the engine under
// test runs at the requested precision on bit-identical input values.

#include <functional>
#include <string>
#include <vector>

#include "dedi/tensor.hpp"

namespace gradcheck {

using dedi::OpAttrs;
using dedi::Rng;
using dedi::Shape;
using dedi::Tensor;

struct TrialSpec {
  std::string name;
  OpAttrs attrs;
  std::vector<Shape> shapes;
  std::vector<std::vector<double>> values;  // float-representable
  std::vector<double> proj;                 // fixed projection R
};

template <class T>
std::vector<Tensor<T>> materialize(const TrialSpec& spec) {
  std::vector<Tensor<T>> out;
  for (size_t i = 0; i < spec.shapes.size(); ++i) {
    auto t = dedi::make_tensor<T>(spec.shapes[i]);
    for (size_t j = 0; j < spec.values[i].size(); ++j)
      t->data[j] = static_cast<T>(spec.values[i][j]);
    t->requires_grad = true;
    out.push_back(t);
  }
  return out;
}

template <class T>
Tensor<T> run_loss(const TrialSpec& spec, const std::vector<Tensor<T>>& in) {
  auto out = dedi::forward_op<T>(spec.name, in, spec.attrs);
  auto r = dedi::make_tensor<T>(out->shape);
  for (size_t i = 0; i < r->data.size(); ++i)
    r->data[i] = static_cast<T>(spec.proj[i]);
  return dedi::sum_all(dedi::mul(out, r));
}

inline int64_t proj_size(const TrialSpec& spec) {
  auto in = materialize<double>(spec);
  for (auto& t : in) t->requires_grad = false;
  TrialSpec probe = spec;
  probe.proj.clear();
  auto out = dedi::forward_op<double>(spec.name, in, spec.attrs);
  return out->size();
}

// Checks autodiff gradients at precision T against a double-precision central
// FD oracle. Returns the worst |ad - fd| / max(1, |ad|, |fd|).
template <class T>
double check_spec(const TrialSpec& spec, double h) {
  auto in = materialize<T>(spec);
  dedi::Tape<T> tape;
  {
    dedi::TapeScope<T> scope(tape);
    auto loss = run_loss<T>(spec, in);
    tape.backward(loss);
  }
  auto din = materialize<double>(spec);
  for (auto& t : din) t->requires_grad = false;
  double worst = 0.0;
  for (size_t k = 0; k < din.size(); ++k) {
    const auto& ad = in[k]->grad;
    for (size_t i = 0; i < din[k]->data.size(); ++i) {
      double saved = din[k]->data[i];
      din[k]->data[i] = saved + h;
      double fp = run_loss<double>(spec, din)->data[0];
      din[k]->data[i] = saved - h;
      double fm = run_loss<double>(spec, din)->data[0];
      din[k]->data[i] = saved;
      double fd = (fp - fm) / (2.0 * h);
      double a = ad.empty() ? 0.0 : static_cast<double>(ad[i]);
      double err = std::abs(a - fd) / std::max({1.0, std::abs(a), std::abs(fd)});
      worst = std::max(worst, err);
    }
  }
  return worst;
}

// Direct check of an arbitrary scalar-valued function at one precision
// (used by a few targeted tests where double in/out is natural).
template <class T>
using Fn = std::function<Tensor<T>(const std::vector<Tensor<T>>&)>;

template <class T>
double check(const Fn<T>& f, const std::vector<Tensor<T>>& inputs, T h) {
  dedi::Tape<T> tape;
  {
    dedi::TapeScope<T> scope(tape);
    auto loss = f(inputs);
    tape.backward(loss);
  }
  double worst = 0.0;
  for (const auto& in : inputs) {
    if (!in->requires_grad) continue;
    const auto& ad = in->grad;
    for (size_t i = 0; i < in->data.size(); ++i) {
      T saved = in->data[i];
      in->data[i] = saved + h;
      double fp = static_cast<double>(f(inputs)->data[0]);
      in->data[i] = saved - h;
      double fm = static_cast<double>(f(inputs)->data[0]);
      in->data[i] = saved;
      double fd = (fp - fm) / (2.0 * static_cast<double>(h));
      double a = ad.empty() ? 0.0 : static_cast<double>(ad[i]);
      double err = std::abs(a - fd) / std::max({1.0, std::abs(a), std::abs(fd)});
      worst = std::max(worst, err);
    }
  }
  return worst;
}

inline TrialSpec make_trial(const std::string& name, Rng& rng) {
  TrialSpec spec;
  spec.name = name;
  auto dim = [&](int64_t lo, int64_t hi) { return lo + rng.below(hi - lo + 1); };
  auto push = [&](Shape s) {
    spec.shapes.push_back(s);
    std::vector<double> v(static_cast<size_t>(dedi::numel(s)));
    for (auto& x : v) x = static_cast<double>(static_cast<float>(rng.normal()));
    spec.values.push_back(std::move(v));
  };

  if (name == "add" || name == "mul") {
    int64_t b = dim(2, 3), c = dim(2, 4), w = dim(2, 5);
    push({b, c, w});
    switch (rng.below(4)) {
      case 0: push({b, c, w}); break;
      case 1: push({1}); break;
      case 2: push({w}); break;
      default: push({b, 1, 1}); break;
    }
  } else if (name == "matmul") {
    int64_t m = dim(1, 4), k = dim(1, 4), n = dim(1, 4), g = dim(2, 3);
    switch (rng.below(3)) {
      case 0: push({m, k}); push({k, n}); break;
      case 1: push({g, m, k}); push({k, n}); break;
      default: push({g, m, k}); push({g, k, n}); break;
    }
  } else if (name == "conv2d") {
    int64_t b = dim(1, 2), c = dim(1, 3), o = dim(1, 3);
    int64_t hgt = dim(4, 6), wid = dim(4, 6);
    int64_t k = rng.below(2) ? 3 : 1;
    spec.attrs.kv["stride"] = int64_t(dim(1, 2));
    spec.attrs.kv["pad"] = int64_t(k == 3 ? rng.below(2) : 0);
    push({b, hgt, wid, c});
    push({k, k, c, o});
  } else if (name == "transpose") {
    push({dim(2, 3), dim(2, 3), dim(2, 3)});
    spec.attrs.kv["dim0"] = int64_t(rng.below(3));
    spec.attrs.kv["dim1"] = int64_t(rng.below(3));
  } else if (name == "reshape") {
    int64_t a = dim(2, 3), b = dim(2, 3), c = dim(2, 3);
    push({a, b, c});
    spec.attrs.kv["shape"] = std::vector<int64_t>{a * b, c};
  } else if (name == "slice") {
    int64_t a = dim(3, 5), b = dim(3, 5);
    push({a, b});
    int64_t d = rng.below(2);
    int64_t ext = d == 0 ? a : b;
    int64_t start = rng.below(ext - 1);
    spec.attrs.kv["dim"] = d;
    spec.attrs.kv["start"] = start;
    spec.attrs.kv["len"] = int64_t(1 + rng.below(ext - start));
  } else if (name == "concat") {
    int64_t b = dim(2, 3), w = dim(2, 4);
    int64_t d = rng.below(2);
    int64_t parts = dim(2, 3);
    for (int64_t p = 0; p < parts; ++p) {
      Shape s = {b, w};
      s[d] = dim(1, 3);
      push(s);
    }
    spec.attrs.kv["dim"] = d;
  } else if (name == "softmax" || name == "log_softmax" || name == "gelu" ||
             name == "silu") {
    push({dim(2, 4), dim(2, 6)});
  } else if (name == "layer_norm") {
    int64_t d = dim(3, 6);
    push({dim(2, 3), dim(2, 3), d});
    push({d});
    push({d});
  } else if (name == "group_norm") {
    int64_t g = 2 * dim(1, 2), cg = dim(1, 2);
    int64_t c = g * cg;
    push({dim(1, 2), dim(2, 3), dim(2, 3), c});
    push({c});
    push({c});
    spec.attrs.kv["groups"] = g;
  } else if (name == "embedding_lookup") {
    int64_t v = dim(4, 8), d = dim(2, 4);
    push({v, d});
    std::vector<int64_t> ids;
    int64_t len = dim(2, 6);
    for (int64_t i = 0; i < len; ++i) ids.push_back(rng.below(v));
    spec.attrs.kv["ids"] = ids;
  } else if (name == "mean" || name == "sum") {
    push({dim(2, 4), dim(2, 4)});
  } else if (name == "mse") {
    Shape s = {dim(2, 3), dim(2, 4)};
    push(s);
    push(s);
  } else {
    throw std::invalid_argument("make_trial: no generator for op '" + name + "'");
  }

  int64_t psz = proj_size(spec);
  spec.proj.resize(static_cast<size_t>(psz));
  for (auto& x : spec.proj)
    x = static_cast<double>(static_cast<float>(rng.normal()));
  return spec;
}

template <class T>
double op_max_err(const std::string& name, int trials, uint64_t seed, double h) {
  Rng rng(dedi::derive_seed(seed, dedi::fnv1a(name.data(), name.size())));
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    auto spec = make_trial(name, rng);
    worst = std::max(worst, check_spec<T>(spec, h));
  }
  return worst;
}

}  // namespace gradcheck
