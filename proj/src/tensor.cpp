#include "dedi/tensor.hpp"

namespace dedi {

int64_t numel(const Shape& s) {
  int64_t n = 1;
  for (int64_t d : s) {
    if (d < 0) throw std::invalid_argument("negative extent in shape " + shape_str(s));
    n *= d;
  }
  return n;
}

std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

const std::vector<std::string>& op_registry() {
  static const std::vector<std::string> ops = {
      "add",        "mul",       "matmul",     "conv2d",     "transpose",
      "reshape",    "slice",     "concat",     "softmax",    "log_softmax",
      "layer_norm", "group_norm", "gelu",      "silu",       "embedding_lookup",
      "mean",       "sum",       "mse"};
  return ops;
}

namespace detail {

BcastPlan bcast_plan(const Shape& a, const Shape& b, const char* op) {
  BcastPlan plan;
  if (a == b) {
    plan.kind = BcastPlan::Same;
    return plan;
  }
  if (numel(b) == 1) {
    plan.kind = BcastPlan::Scalar;
    return plan;
  }
  if (b.size() > a.size())
    throw std::invalid_argument(std::string(op) + ": cannot broadcast " +
                                shape_str(b) + " onto " + shape_str(a));
  // right-align, validate, and collect strides of b over a's index space
  size_t off = a.size() - b.size();
  std::vector<int64_t> bs(a.size(), 0);
  int64_t stride = 1;
  for (size_t i = a.size(); i-- > 0;) {
    int64_t bd = i >= off ? b[i - off] : 1;
    if (bd != 1 && bd != a[i])
      throw std::invalid_argument(std::string(op) + ": cannot broadcast " +
                                  shape_str(b) + " onto " + shape_str(a));
    bs[i] = bd == 1 ? 0 : stride;
    if (i >= off) stride *= bd;
  }
  // single effective axis? b index = (i / inner) % len
  int active = 0;
  size_t axis = 0;
  for (size_t i = 0; i < a.size(); ++i)
    if (bs[i] != 0 && a[i] > 1) {
      ++active;
      axis = i;
    }
  if (active <= 1) {
    plan.kind = BcastPlan::OneAxis;
    if (active == 0) {
      plan.len = 1;
      plan.inner = 1;
    } else {
      plan.len = a[axis];
      plan.inner = 1;
      for (size_t i = axis + 1; i < a.size(); ++i) plan.inner *= a[i];
    }
    return plan;
  }
  plan.kind = BcastPlan::General;
  plan.out_dims.assign(a.begin(), a.end());
  plan.b_strides = bs;
  return plan;
}

int64_t bcast_index(const BcastPlan& p, int64_t i) {
  if (p.kind == BcastPlan::OneAxis) return (i / p.inner) % p.len;
  int64_t idx = 0;
  for (size_t d = p.out_dims.size(); d-- > 0;) {
    int64_t dim = p.out_dims[d];
    idx += (i % dim) * p.b_strides[d];
    i /= dim;
  }
  return idx;
}

}  // namespace detail
}  // namespace dedi
