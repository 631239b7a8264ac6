#include <doctest.h>

#include <cmath>

#include "qmf/autodiff.hpp"

using namespace qmf::ad;

TEST_CASE("loss independent of a parameter gives zero gradient") {
  Parameter used("used", 1, 1), unused("unused", 1, 1);
  used.value[0] = 2.0;
  unused.value[0] = 5.0;
  Tape t;
  NodeId x = t.param_all(used);
  NodeId loss = t.mul(x, x);
  t.backward(loss);
  CHECK(used.grad[0] == doctest::Approx(4.0));
  CHECK(unused.grad[0] == 0.0);
}

TEST_CASE("|ax + b - y| differentiates to sign(ax+b-y) * a") {
  const double a = 3.0, b = -1.0, y = 2.0, x0 = 4.0;
  Parameter x("x", 1, 1);
  x.value[0] = x0;
  Tape t;
  NodeId ax = t.scale(t.param_all(x), a);
  NodeId pred = t.add(ax, t.constant(b));
  NodeId loss = t.abs_(t.sub(pred, t.constant(y)));
  t.backward(loss);
  const double sign = (a * x0 + b - y) > 0 ? 1.0 : -1.0;
  CHECK(x.grad[0] == doctest::Approx(sign * a));
  CHECK(t.val1(loss) == doctest::Approx(std::abs(a * x0 + b - y)));
}

TEST_CASE("softmax matches a straight-line oracle and sums to one") {
  Parameter p("p", 3, 1);
  p.value = {0.7, -1.2, 2.5};
  Tape t;
  NodeId s = t.softmax(t.param_all(p));
  const std::vector<double> v = t.val(s);  // copy: later tape ops may reallocate node storage
  double z = 0.0;
  for (double x : p.value) z += std::exp(x);
  double total = 0.0;
  for (int i = 0; i < 3; ++i) {
    CHECK(v[i] == doctest::Approx(std::exp(p.value[i]) / z).epsilon(1e-12));
    total += v[i];
  }
  CHECK(total == doctest::Approx(1.0));

  // gradient of softmax[0] w.r.t. inputs: s0*(delta - s)
  t.backward(t.slice(s, 0, 1));
  for (int i = 0; i < 3; ++i) {
    const double expect = v[0] * ((i == 0 ? 1.0 : 0.0) - v[i]);
    CHECK(p.grad[i] == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("matvec and kron agree with finite differences") {
  Parameter w("w", 2, 3), x("x", 3, 1);
  w.value = {0.5, -1.0, 2.0, 1.5, 0.25, -0.75};
  x.value = {1.0, -2.0, 0.5};

  auto loss_val = [&]() {
    Tape t;
    NodeId y = t.matvec(t.param_all(w), 2, 3, t.param_all(x));
    NodeId k = t.kron(y, y);  // 4 entries
    return t.val1(t.sum(t.mul(k, k)));
  };

  w.zero_grad();
  x.zero_grad();
  {
    Tape t;
    NodeId y = t.matvec(t.param_all(w), 2, 3, t.param_all(x));
    NodeId k = t.kron(y, y);
    t.backward(t.sum(t.mul(k, k)));
  }

  const double h = 1e-6;
  for (Parameter* p : {&w, &x}) {
    for (size_t j = 0; j < p->value.size(); ++j) {
      const double saved = p->value[j];
      p->value[j] = saved + h;
      const double up = loss_val();
      p->value[j] = saved - h;
      const double down = loss_val();
      p->value[j] = saved;
      CHECK(p->grad[j] ==
            doctest::Approx((up - down) / (2 * h)).epsilon(1e-5));
    }
  }
}

TEST_CASE("max_of routes gradient to the smallest index on ties") {
  Parameter p("p", 3, 1);
  p.value = {2.0, 2.0, 1.0};
  Tape t;
  NodeId all = t.param_all(p);
  NodeId m = t.max_of({t.slice(all, 0, 1), t.slice(all, 1, 1),
                       t.slice(all, 2, 1)});
  t.backward(m);
  CHECK(t.val1(m) == 2.0);
  CHECK(p.grad[0] == 1.0);
  CHECK(p.grad[1] == 0.0);
  CHECK(p.grad[2] == 0.0);
}

TEST_CASE("frozen parameters and frozen rows receive no gradient") {
  Parameter frozen("f", 2, 2, Parameter::Constraint::frozen);
  frozen.value = {1.0, 2.0, 3.0, 4.0};
  Parameter partial("p", 2, 2);
  partial.value = {1.0, 2.0, 3.0, 4.0};
  partial.frozen_rows = {0};

  Tape t;
  NodeId a = t.param_all(frozen);
  NodeId b = t.param_all(partial);
  t.backward(t.sum(t.mul(a, b)));
  CHECK(frozen.grad == std::vector<double>{0, 0, 0, 0});
  CHECK(partial.grad[0] == 0.0);
  CHECK(partial.grad[1] == 0.0);
  CHECK(partial.grad[2] == doctest::Approx(3.0));
  CHECK(partial.grad[3] == doctest::Approx(4.0));
}

TEST_CASE("rmsprop: zero gradient leaves parameters unchanged") {
  Parameter p("p", 1, 1);
  p.value[0] = 1.5;
  p.zero_grad();
  std::vector<Parameter*> ps = {&p};
  rmsprop_step(ps, 0.01);
  CHECK(p.value[0] == 1.5);
}

TEST_CASE("rmsprop single step from zero state") {
  // delta = lr * g / sqrt(0.1 * g^2 + eps)
  const double g = 0.3, lr = 0.01;
  Parameter p("p", 1, 1);
  p.value[0] = 1.0;
  p.grad[0] = g;
  std::vector<Parameter*> ps = {&p};
  rmsprop_step(ps, lr);
  const double expect = lr * g / std::sqrt(0.1 * g * g + 1e-8);
  CHECK(p.value[0] == doctest::Approx(1.0 - expect).epsilon(1e-12));
}

TEST_CASE("rmsprop long-run step magnitude approaches lr") {
  const double g = 0.7, lr = 0.01;
  Parameter p("p", 1, 1);
  p.value[0] = 0.0;
  std::vector<Parameter*> ps = {&p};
  double prev = 0.0;
  double step = 0.0;
  for (int i = 0; i < 200; ++i) {
    p.grad[0] = g;  // constant gradient
    prev = p.value[0];
    rmsprop_step(ps, lr);
    step = prev - p.value[0];
  }
  CHECK(step == doctest::Approx(lr).epsilon(1e-3));
}

TEST_CASE("gradient clipping rescales to the target norm") {
  Parameter a("a", 1, 1), b("b", 1, 1);
  a.grad[0] = 3.0;
  b.grad[0] = 4.0;  // norm 5
  std::vector<Parameter*> ps = {&a, &b};
  CHECK(grad_norm(ps) == doctest::Approx(5.0));
  clip_global_norm(ps, 1.0);
  CHECK(grad_norm(ps) == doctest::Approx(1.0));
  CHECK(a.grad[0] == doctest::Approx(0.6));
  // below the threshold: untouched
  clip_global_norm(ps, 10.0);
  CHECK(a.grad[0] == doctest::Approx(0.6));
}

TEST_CASE("branch hash distinguishes relu activation patterns") {
  Parameter p("p", 1, 1);
  p.value[0] = 0.5;
  uint64_t h1, h2;
  {
    Tape t;
    t.backward(t.relu(t.param_all(p)));
    h1 = t.branch_hash();
  }
  p.value[0] = -0.5;
  {
    Tape t;
    t.backward(t.relu(t.param_all(p)));
    h2 = t.branch_hash();
  }
  CHECK(h1 != h2);
}
