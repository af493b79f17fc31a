#include <cmath>

#include "dedi/optim.hpp"
#include "doctest.h"

using namespace dedi;

namespace {

// Scalar reference of the update rule, kept independent of the production
// implementation. State is single precision, matching the trained dtype.
struct ScalarRef {
  double b1 = 0.9, b2 = 0.999, eps = 1e-8, wd = 0.01;
  float m = 0, v = 0;
  int64_t t = 0;
  float apply(float p, float g, double lr) {
    ++t;
    p -= float(lr * wd) * p;
    m = float(b1) * m + (1.0f - float(b1)) * g;
    v = float(b2) * v + (1.0f - float(b2)) * g * g;
    double mh = m / (1 - std::pow(b1, double(t)));
    double vh = v / (1 - std::pow(b2, double(t)));
    return p - float(lr * mh / (std::sqrt(vh) + eps));
  }
};

}  // namespace

TEST_CASE("zero grad with zero decay leaves params unchanged") {
  auto p = tensor_of<float>({3}, {1.0f, -2.0f, 0.5f});
  p->requires_grad = true;
  p->grad_buf();  // zeros
  OptimizerConfig cfg;
  cfg.weight_decay = 0.0;
  Optimizer opt(cfg);
  auto before = p->data;
  opt.step({p}, 0.1);
  CHECK(p->data == before);
  CHECK(opt.step_count() == 1);
}

TEST_CASE("decay only: params scaled by exactly 0.999") {
  auto p = tensor_of<float>({2}, {4.0f, -8.0f});
  p->requires_grad = true;
  p->grad_buf();
  Optimizer opt;  // wd=0.01 default
  opt.step({p}, 0.1);
  CHECK(p->data[0] == doctest::Approx(4.0f * 0.999f).epsilon(1e-7));
  CHECK(p->data[1] == doctest::Approx(-8.0f * 0.999f).epsilon(1e-7));
}

TEST_CASE("constant gradient trajectory matches scalar reference") {
  auto p = tensor_of<float>({1}, {0.7f});
  p->requires_grad = true;
  Optimizer opt;
  ScalarRef ref;
  float rp = 0.7f;
  const float g = 0.3f;
  for (int step = 0; step < 100; ++step) {
    p->grad.assign(1, g);
    opt.step({p}, 0.01);
    rp = ref.apply(rp, g, 0.01);
    CHECK(std::abs(double(p->data[0]) - double(rp)) <= 1e-10);
  }
}

TEST_CASE("NaN gradient aborts with parameter name") {
  auto p = tensor_of<float>({2}, {1.0f, 1.0f});
  p->requires_grad = true;
  p->name = "pooler.query";
  p->grad.assign(2, std::nanf(""));
  Optimizer opt;
  try {
    opt.step({p}, 0.1);
    FAIL("expected throw");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("pooler.query") != std::string::npos);
  }
}

TEST_CASE("factored mode shrinks state and still descends") {
  Rng rng(11);
  auto p = randn<float>({8, 6}, rng);
  p->requires_grad = true;
  OptimizerConfig cfg;
  cfg.factored = true;
  cfg.weight_decay = 0.0;
  Optimizer opt(cfg);
  // minimize 0.5*||p||^2: grad = p
  double before = 0, after = 0;
  for (float v : p->data) before += v * v;
  for (int i = 0; i < 50; ++i) {
    p->grad.assign(p->data.begin(), p->data.end());
    opt.step({p}, 0.05);
  }
  for (float v : p->data) after += v * v;
  CHECK(after < before);
}

TEST_CASE("identical seeds give bit-identical trajectories") {
  auto run = [] {
    Rng rng(42);
    auto p = randn<float>({16}, rng);
    p->requires_grad = true;
    Optimizer opt;
    Rng grads(7);
    for (int i = 0; i < 25; ++i) {
      p->grad.resize(16);
      for (auto& g : p->grad) g = grads.normalf();
      opt.step({p}, 0.003);
    }
    return p->data;
  };
  CHECK(run() == run());
}

TEST_CASE("lr schedule endpoints") {
  LrSchedule s;
  s.base = 3e-4;
  s.final_rate = 3e-6;
  s.warmup = 500;
  s.total = 20000;
  CHECK(s.at(0) == 0.0);
  CHECK(s.at(500) == 3e-4);
  CHECK(s.at(20000) == 3e-6);
  CHECK(s.at(25000) == 3e-6);  // clamps past total
  CHECK(s.at(250) == doctest::Approx(1.5e-4));
  // continuity around warmup
  CHECK(s.at(499) == doctest::Approx(3e-4).epsilon(1e-2));
  CHECK(s.at(501) == doctest::Approx(3e-4).epsilon(1e-2));
  // monotone decreasing after warmup
  double prev = s.at(500);
  for (int64_t t = 600; t <= 20000; t += 100) {
    double cur = s.at(t);
    CHECK(cur <= prev);
    prev = cur;
  }
}
