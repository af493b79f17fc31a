#include "dedi/optim.hpp"

#include <cmath>

namespace dedi {

double LrSchedule::at(int64_t step) const {
  if (warmup < 0 || total <= warmup)
    throw std::invalid_argument("LrSchedule: need 0 <= warmup < total");
  if (step < 0) throw std::invalid_argument("LrSchedule: negative step");
  if (step >= total) return final_rate;
  if (warmup > 0 && step < warmup)
    return base * static_cast<double>(step) / static_cast<double>(warmup);
  if (step == warmup) return base;
  double frac = static_cast<double>(step - warmup) /
                static_cast<double>(total - warmup);
  return final_rate +
         0.5 * (base - final_rate) * (1.0 + std::cos(3.14159265358979323846 * frac));
}

void Optimizer::step(const std::vector<Tensor<float>>& params, double lr) {
  if (lr <= 0) throw std::invalid_argument("Optimizer::step: lr must be > 0");
  if (states_.empty()) {
    states_.resize(params.size());
    bound_.resize(params.size());
    for (size_t i = 0; i < params.size(); ++i) {
      const auto& p = params[i];
      if (p->frozen)
        throw std::runtime_error("Optimizer: frozen parameter '" + p->name + "'");
      bound_[i] = p.get();
      auto& st = states_[i];
      st.use_factored = cfg_.factored && p->shape.size() == 2 &&
                        p->shape[0] > 1 && p->shape[1] > 1;
      st.m.assign(p->data.size(), 0.0f);
      if (st.use_factored) {
        st.row.assign(static_cast<size_t>(p->shape[0]), 0.0f);
        st.col.assign(static_cast<size_t>(p->shape[1]), 0.0f);
      } else {
        st.v.assign(p->data.size(), 0.0f);
      }
    }
  }
  if (params.size() != states_.size())
    throw std::invalid_argument("Optimizer::step: parameter list changed size");

  for (size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    if (p.get() != bound_[i])
      throw std::invalid_argument("Optimizer::step: parameter list changed identity");
    const auto& g = p->grad;
    if (g.empty())
      throw std::invalid_argument("Optimizer::step: missing gradient for '" +
                                  p->name + "'");
    for (float gv : g)
      if (!std::isfinite(gv))
        throw std::runtime_error("Optimizer::step: non-finite gradient in '" +
                                 p->name + "'");
  }

  ++step_count_;
  double t = static_cast<double>(step_count_);
  double bc1 = 1.0 - std::pow(cfg_.beta1, t);
  double bc2 = 1.0 - std::pow(cfg_.beta2, t);
  float b1 = static_cast<float>(cfg_.beta1);
  float b2 = static_cast<float>(cfg_.beta2);

  for (size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    auto& st = states_[i];
    float* pd = p->data.data();
    const float* g = p->grad.data();
    size_t n = p->data.size();

    if (cfg_.weight_decay != 0.0) {
      float decay = static_cast<float>(lr * cfg_.weight_decay);
      for (size_t j = 0; j < n; ++j) pd[j] -= decay * pd[j];
    }

    float* m = st.m.data();
    for (size_t j = 0; j < n; ++j)
      m[j] = b1 * m[j] + (1.0f - b1) * g[j];

    if (!st.use_factored) {
      float* v = st.v.data();
      for (size_t j = 0; j < n; ++j)
        v[j] = b2 * v[j] + (1.0f - b2) * g[j] * g[j];
      for (size_t j = 0; j < n; ++j) {
        double mh = m[j] / bc1;
        double vh = v[j] / bc2;
        pd[j] -= static_cast<float>(lr * mh / (std::sqrt(vh) + cfg_.eps));
      }
    } else {
      int64_t rows = p->shape[0], cols = p->shape[1];
      // running row/column means of g^2; v_ij ~ row_i * col_j / mean(row)
      for (int64_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (int64_t c = 0; c < cols; ++c) acc += double(g[r * cols + c]) * g[r * cols + c];
        st.row[r] = b2 * st.row[r] + (1.0f - b2) * static_cast<float>(acc / cols);
      }
      for (int64_t c = 0; c < cols; ++c) {
        double acc = 0.0;
        for (int64_t r = 0; r < rows; ++r) acc += double(g[r * cols + c]) * g[r * cols + c];
        st.col[c] = b2 * st.col[c] + (1.0f - b2) * static_cast<float>(acc / rows);
      }
      double row_mean = 0.0;
      for (int64_t r = 0; r < rows; ++r) row_mean += st.row[r];
      row_mean /= rows;
      if (row_mean <= 0.0) row_mean = cfg_.eps;
      for (int64_t r = 0; r < rows; ++r) {
        for (int64_t c = 0; c < cols; ++c) {
          size_t j = static_cast<size_t>(r * cols + c);
          double mh = m[j] / bc1;
          double vh = double(st.row[r]) * st.col[c] / row_mean / bc2;
          pd[j] -= static_cast<float>(lr * mh / (std::sqrt(vh) + cfg_.eps));
        }
      }
    }
  }
}

}  // namespace dedi
