#include <doctest.h>

#include <random>

#include "qmf/fusion.hpp"

using namespace qmf;

namespace {
Ket rand_ket(std::mt19937& rng, int dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd m(dim), a(dim);
  for (int i = 0; i < dim; ++i) {
    m[i] = std::abs(g(rng)) + 1e-3;
    a[i] = g(rng);
  }
  return ket_from_polar(m, a);
}
}  // namespace

TEST_CASE("softmax is a stable convex weighting") {
  Eigen::VectorXd x(3);
  x << 1000.0, 1000.0, 1000.0;  // would overflow without the max shift
  Eigen::VectorXd s = softmax(x);
  CHECK(s.sum() == doctest::Approx(1.0));
  CHECK(s[0] == doctest::Approx(1.0 / 3.0));

  Eigen::VectorXd y(2);
  y << 0.0, std::log(3.0);
  Eigen::VectorXd sy = softmax(y);
  CHECK(sy[0] == doctest::Approx(0.25));
  CHECK(sy[1] == doctest::Approx(0.75));
}

TEST_CASE("global_weights combines unimodal norms with softmax betas") {
  Eigen::VectorXd nt(2), nv(2), na(2);
  nt << 1.0, 2.0;
  nv << 3.0, 4.0;
  na << 5.0, 6.0;
  Eigen::Vector3d beta_params(0.0, 0.0, 0.0);  // uniform betas
  GlobalWeights w = global_weights(nt, nv, na, beta_params);
  CHECK(w.beta.sum() == doctest::Approx(1.0));
  CHECK(w.beta[0] == doctest::Approx(1.0 / 3.0));
  CHECK(w.lambda[0] == doctest::Approx((1.0 + 3.0 + 5.0) / 3.0));
  CHECK(w.lambda[1] == doctest::Approx((2.0 + 4.0 + 6.0) / 3.0));
}

TEST_CASE("window_spans enumerates (length, start) ordered windows") {
  std::vector<bool> mask = {true, true, true, false};
  auto spans = window_spans(mask, {1, 2});
  REQUIRE(spans.size() == 5);  // 3 singletons + 2 pairs
  CHECK(spans[0].length == 1);
  CHECK(spans[0].start == 0);
  CHECK(spans[2].start == 2);
  CHECK(spans[3].length == 2);
  CHECK(spans[3].start == 0);
  CHECK(spans[4].start == 1);
}

TEST_CASE("window_spans falls back to one full span when nothing fits") {
  std::vector<bool> mask = {true, true, false, false};
  auto spans = window_spans(mask, {3});
  REQUIRE(spans.size() == 1);
  CHECK(spans[0].start == 0);
  CHECK(spans[0].length == 2);

  CHECK(window_spans({false, false}, {1}).empty());
}

TEST_CASE("local_contexts builds one valid mixture per window") {
  std::mt19937 rng(31);
  std::vector<Ket> words;
  for (int i = 0; i < 3; ++i) words.push_back(rand_ket(rng, 4));
  std::vector<bool> mask = {true, true, true};
  GlobalWeights w;
  w.lambda = Eigen::Vector3d(0.2, 1.0, 0.5);
  w.beta = Eigen::Vector3d(0.4, 0.3, 0.3);

  ContextSet ctx = local_contexts(words, w, mask, {2}, {2, 2});
  REQUIRE(ctx.size() == 2);
  for (const auto& c : ctx) {
    CHECK(c.span.length == 2);
    c.rho.assert_valid();
    CHECK(c.rho.subsystem_dims == std::vector<int>{2, 2});
  }

  // a window's mixture uses softmax of the window's lambdas
  Eigen::VectorXd lam01(2);
  lam01 << 0.2, 1.0;
  Eigen::VectorXd p = softmax(lam01);
  DensityMatrix expect = mix({words[0], words[1]}, p, {2, 2});
  CHECK((ctx[0].rho.entries - expect.entries).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("global_mixture spans all unmasked words and rejects empty") {
  std::mt19937 rng(77);
  std::vector<Ket> words = {rand_ket(rng, 4), rand_ket(rng, 4),
                            rand_ket(rng, 4)};
  std::vector<bool> mask = {true, false, true};
  GlobalWeights w;
  w.lambda = Eigen::Vector3d(1.0, 9.0, 1.0);
  w.beta = Eigen::Vector3d(1.0 / 3, 1.0 / 3, 1.0 / 3);
  DensityMatrix rho = global_mixture(words, w, mask, {4});
  rho.assert_valid();
  // masked word excluded: equal lambdas -> equal mixture of words 0 and 2
  Eigen::VectorXd half(2);
  half << 0.5, 0.5;
  DensityMatrix expect = mix({words[0], words[2]}, half, {4});
  CHECK((rho.entries - expect.entries).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS(global_mixture(words, w, {false, false, false}, {4}));
}
