#include <cmath>

#include "dedi/tensor.hpp"
#include "doctest.h"
#include "gradcheck.hpp"

using namespace dedi;

namespace {

// Direct convolution reference in NHWC, the oracle for conv2d values.
std::vector<float> conv_ref(const std::vector<float>& x, int64_t h, int64_t w,
                            int64_t c, const std::vector<float>& k, int64_t o,
                            int64_t kh, int64_t kw, int64_t stride, int64_t pad,
                            int64_t ho, int64_t wo) {
  std::vector<float> out(static_cast<size_t>(ho * wo * o), 0.0f);
  for (int64_t oy = 0; oy < ho; ++oy)
    for (int64_t ox = 0; ox < wo; ++ox)
      for (int64_t oc = 0; oc < o; ++oc) {
        float acc = 0.0f;
        for (int64_t ky = 0; ky < kh; ++ky)
          for (int64_t kx = 0; kx < kw; ++kx)
            for (int64_t ch = 0; ch < c; ++ch) {
              int64_t iy = oy * stride + ky - pad;
              int64_t ix = ox * stride + kx - pad;
              if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
              acc += x[(iy * w + ix) * c + ch] *
                     k[((ky * kw + kx) * c + ch) * o + oc];
            }
        out[(oy * wo + ox) * o + oc] = acc;
      }
  return out;
}

}  // namespace

TEST_CASE("matmul identity") {
  Rng rng(1);
  auto m = randn<float>({2, 3}, rng);
  auto eye = tensor_of<float>({2, 2}, {1, 0, 0, 1});
  auto out = matmul(eye, m);
  for (size_t i = 0; i < m->data.size(); ++i)
    CHECK(out->data[i] == doctest::Approx(m->data[i]));
}

TEST_CASE("softmax symmetry and row sums") {
  auto z = tensor_of<float>({3}, {0, 0, 0});
  auto s = softmax(z);
  for (float v : s->data) CHECK(v == doctest::Approx(1.0f / 3.0f));

  Rng rng(2);
  auto x = randn<float>({5, 8}, rng);
  auto sm = softmax(x);
  for (int r = 0; r < 5; ++r) {
    float sum = 0;
    for (int i = 0; i < 8; ++i) sum += sm->data[r * 8 + i];
    CHECK(std::abs(sum - 1.0f) < 1e-6f);
  }
  auto lsm = log_softmax(x);
  for (size_t i = 0; i < sm->data.size(); ++i)
    CHECK(std::abs(lsm->data[i] - std::log(sm->data[i])) < 1e-5f);
}

TEST_CASE("conv2d matches direct convolution oracle") {
  auto x = full<float>({1, 5, 5, 1}, 1.0f);
  auto k = full<float>({3, 3, 1, 1}, 1.0f);
  auto y = conv2d(x, k, 1, 1);
  REQUIRE(y->shape == Shape{1, 5, 5, 1});
  // interior 9, edges 6, corners 4
  CHECK(y->data[2 * 5 + 2] == 9.0f);
  CHECK(y->data[0 * 5 + 2] == 6.0f);
  CHECK(y->data[0] == 4.0f);

  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    int64_t c = 1 + rng.below(3), o = 1 + rng.below(3);
    int64_t h = 4 + rng.below(3), w = 4 + rng.below(3);
    int64_t stride = 1 + rng.below(2), pad = rng.below(2);
    auto xi = randn<float>({2, h, w, c}, rng);
    auto ki = randn<float>({3, 3, c, o}, rng);
    auto out = conv2d(xi, ki, stride, pad);
    int64_t ho = (h + 2 * pad - 3) / stride + 1;
    int64_t wo = (w + 2 * pad - 3) / stride + 1;
    for (int64_t b = 0; b < 2; ++b) {
      std::vector<float> xb(xi->data.begin() + b * h * w * c,
                            xi->data.begin() + (b + 1) * h * w * c);
      auto ref = conv_ref(xb, h, w, c, ki->data, o, 3, 3, stride, pad, ho, wo);
      for (size_t i = 0; i < ref.size(); ++i)
        CHECK(out->data[b * ref.size() + i] == doctest::Approx(ref[i]).epsilon(1e-4));
    }
  }
}

TEST_CASE("backward of sum is ones") {
  auto x = tensor_of<float>({3}, {1, 2, 3});
  x->requires_grad = true;
  Tape<float> tape;
  TapeScope<float> scope(tape);
  auto loss = sum_all(x);
  tape.backward(loss);
  for (float g : x->grad) CHECK(g == 1.0f);
}

TEST_CASE("mse(Wx, y) gradients match finite differences in double") {
  Rng rng(4);
  auto w = randn<double>({3, 2}, rng);
  auto x = randn<double>({2, 4}, rng);
  auto y = randn<double>({3, 4}, rng);
  w->requires_grad = true;
  x->requires_grad = true;
  double err = gradcheck::check<double>(
      [&](const std::vector<Tensor<double>>& in) {
        return mse(matmul(in[0], in[1]), in[2]);
      },
      {w, x, y}, 1e-5);
  CHECK(err <= 1e-5);
}

TEST_CASE("two backward calls without clear double the gradients") {
  auto x = tensor_of<float>({3}, {1, 2, 3});
  x->requires_grad = true;
  Tape<float> tape;
  TapeScope<float> scope(tape);
  auto loss = mean_all(mul(x, x));
  tape.backward(loss);
  auto once = x->grad;
  tape.backward(loss);
  for (size_t i = 0; i < once.size(); ++i) CHECK(x->grad[i] == 2.0f * once[i]);
}

TEST_CASE("non-scalar loss rejected; disconnected loss rejected") {
  auto x = tensor_of<float>({2}, {1, 2});
  x->requires_grad = true;
  Tape<float> tape;
  TapeScope<float> scope(tape);
  auto y = mul(x, x);
  CHECK_THROWS_AS(tape.backward(y), std::invalid_argument);
  auto stray = tensor_of<float>({1}, {0.5f});
  CHECK_THROWS_AS(tape.backward(stray), std::invalid_argument);
}

TEST_CASE("shape mismatch reports both shapes") {
  auto a = make_tensor<float>({2, 3});
  auto b = make_tensor<float>({4, 5});
  try {
    matmul(a, b);
    FAIL("expected throw");
  } catch (const std::invalid_argument& e) {
    std::string msg = e.what();
    CHECK(msg.find("[2,3]") != std::string::npos);
    CHECK(msg.find("[4,5]") != std::string::npos);
  }
}

TEST_CASE("unknown op rejected") {
  CHECK_THROWS_AS(forward_op<float>("det", {}), std::invalid_argument);
}

TEST_CASE("reshape and transpose round-trips are bit-exact") {
  Rng rng(5);
  auto x = randn<float>({3, 4, 5}, rng);
  auto r = reshape(reshape(x, {12, 5}), {3, 4, 5});
  CHECK(r->data == x->data);
  auto t = transpose(transpose(x, 0, 2), 0, 2);
  CHECK(t->data == x->data);
}

TEST_CASE("upsample2x repeats pixels") {
  auto x = tensor_of<float>({1, 2, 2, 1}, {1, 2, 3, 4});
  auto u = upsample2x(x);
  REQUIRE(u->shape == Shape{1, 4, 4, 1});
  std::vector<float> want = {1, 1, 2, 2, 1, 1, 2, 2, 3, 3, 4, 4, 3, 3, 4, 4};
  CHECK(u->data == want);

  // two-channel pixels stay interleaved
  auto x2 = tensor_of<float>({1, 1, 2, 2}, {1, 2, 3, 4});
  auto u2 = upsample2x(x2);
  REQUIRE(u2->shape == Shape{1, 2, 4, 2});
  std::vector<float> want2 = {1, 2, 1, 2, 3, 4, 3, 4, 1, 2, 1, 2, 3, 4, 3, 4};
  CHECK(u2->data == want2);
}

TEST_CASE("frozen tensors refuse gradient attachment") {
  auto x = make_tensor<float>({2});
  freeze_tensor(x);
  CHECK_THROWS_AS(set_requires_grad(x, true), std::runtime_error);
}

TEST_CASE("gradcheck all registry ops (single precision)") {
  for (const auto& op : op_registry()) {
    double err = gradcheck::op_max_err<float>(op, 20, 99, 1e-5);
    INFO("op ", op);
    CHECK(err <= 1e-3);
  }
}

TEST_CASE("gradcheck all registry ops (double precision, spot)") {
  for (const auto& op : op_registry()) {
    double err = gradcheck::op_max_err<double>(op, 10, 7, 1e-5);
    INFO("op ", op);
    CHECK(err <= 1e-5);
  }
}
