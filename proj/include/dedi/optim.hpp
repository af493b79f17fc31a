#pragma once

// Adaptive optimizer with decoupled weight decay, plus the warmup+cosine
// learning-rate schedule. The default keeps a full second moment; a
// row/column-factored mode for 2-d parameters sits behind a flag.

#include <cstdint>
#include <string>
#include <vector>

#include "dedi/tensor.hpp"

namespace dedi {

struct LrSchedule {
  double base = 3e-4;
  double final_rate = 3e-6;
  int64_t warmup = 500;
  int64_t total = 20000;

  double at(int64_t step) const;
};

struct OptimizerConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
  bool factored = false;
};

class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig cfg = {}) : cfg_(cfg) {}

  // One update over all parameters. Decay is applied before the adaptive
  // update: p <- p - lr*wd*p. Throws on non-finite gradients, naming the
  // parameter.
  void step(const std::vector<Tensor<float>>& params, double lr);

  int64_t step_count() const { return step_count_; }
  const OptimizerConfig& config() const { return cfg_; }

 private:
  struct State {
    std::vector<float> m;
    std::vector<float> v;        // full second moment
    std::vector<float> row, col; // factored second moment (2-d params)
    bool use_factored = false;
  };

  OptimizerConfig cfg_;
  int64_t step_count_ = 0;
  std::vector<State> states_;
  std::vector<const TensorImpl<float>*> bound_;  // state<->param identity check
};

}  // namespace dedi
