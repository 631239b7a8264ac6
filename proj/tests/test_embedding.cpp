#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "qmf/embedding.hpp"

using namespace qmf;

TEST_CASE("vocabulary add/lookup with PAD for unknowns") {
  Vocabulary v;
  CHECK(v.size() == 1);  // <pad>
  const int id = v.add("good");
  CHECK(id == 1);
  CHECK(v.add("good") == 1);  // idempotent
  CHECK(v.lookup("good") == 1);
  CHECK(v.lookup("never-seen") == Vocabulary::kPadId);
}

TEST_CASE("textual arguments from the lexicon: 0 / pi / pi/2") {
  Vocabulary v;
  v.add("great");
  v.add("awful");
  v.add("table");
  SentimentLexicon lex;
  lex.polarity["great"] = 1;
  lex.polarity["awful"] = -1;

  ad::Parameter theta("theta_t", v.size(), 3);
  init_textual_arguments(v, lex, theta);
  CHECK(theta.row(v.lookup("great"))[0] == 0.0);
  CHECK(theta.row(v.lookup("awful"))[1] == doctest::Approx(M_PI));
  CHECK(theta.row(v.lookup("table"))[2] == doctest::Approx(M_PI / 2.0));
  CHECK(theta.row(Vocabulary::kPadId)[0] == doctest::Approx(M_PI / 2.0));
  // cosine of the argument recovers the planted sentiment
  CHECK(std::cos(theta.row(v.lookup("great"))[0]) == doctest::Approx(1.0));
  CHECK(std::cos(theta.row(v.lookup("awful"))[0]) == doctest::Approx(-1.0));
  CHECK(std::cos(theta.row(v.lookup("table"))[0]) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("l2_normalize yields a unit vector and its original norm") {
  ad::Tape t;
  ad::NodeId raw = t.constant({3.0, 0.0, 4.0});
  auto [unit, norm] = l2_normalize(t, raw);
  CHECK(t.val1(norm) == doctest::Approx(5.0));
  CHECK(t.val(unit)[0] == doctest::Approx(0.6));
  CHECK(t.val(unit)[2] == doctest::Approx(0.8));
  double n2 = 0.0;
  for (double x : t.val(unit)) n2 += x * x;
  CHECK(n2 == doctest::Approx(1.0));
}

TEST_CASE("l2_normalize survives an exactly-zero vector") {
  ad::Tape t;
  auto [unit, norm] = l2_normalize(t, t.constant({0.0, 0.0}));
  CHECK(t.val1(norm) == doctest::Approx(0.0));
  CHECK(std::isfinite(t.val(unit)[0]));
  t.backward(norm);  // finite backward at the singular point
}

TEST_CASE("polar_to_rect matches cos/sin") {
  ad::Tape t;
  ad::NodeId m = t.constant({0.5, 0.5});
  ad::NodeId a = t.constant({0.3, -1.2});
  CVec c = polar_to_rect(t, m, a);
  CHECK(t.val(c.re)[0] == doctest::Approx(0.5 * std::cos(0.3)));
  CHECK(t.val(c.im)[1] == doctest::Approx(0.5 * std::sin(-1.2)));
}

TEST_CASE("complex_kron and overlap_sq match complex oracles") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto rand_cvec = [&](ad::Tape& t, int n, std::vector<std::complex<double>>& out) {
    std::vector<double> re(n), im(n);
    for (int i = 0; i < n; ++i) {
      re[i] = u(rng);
      im[i] = u(rng);
      out.emplace_back(re[i], im[i]);
    }
    return CVec{t.constant(re), t.constant(im)};
  };

  ad::Tape t;
  std::vector<std::complex<double>> av, bv;
  CVec a = rand_cvec(t, 2, av), b = rand_cvec(t, 3, bv);
  CVec k = complex_kron(t, a, b);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) {
      const std::complex<double> expect = av[i] * bv[j];
      CHECK(t.val(k.re)[i * 3 + j] == doctest::Approx(expect.real()));
      CHECK(t.val(k.im)[i * 3 + j] == doctest::Approx(expect.imag()));
    }

  std::vector<std::complex<double>> vv, wv;
  CVec v = rand_cvec(t, 4, vv), w = rand_cvec(t, 4, wv);
  std::complex<double> inner = 0.0;
  for (int i = 0; i < 4; ++i) inner += std::conj(vv[i]) * wv[i];
  CHECK(t.val1(overlap_sq(t, v, w)) ==
        doctest::Approx(std::norm(inner)).epsilon(1e-12));
}

TEST_CASE("assemble_word_state is the three-way tensor product") {
  Eigen::VectorXd m1(2), a1(2), m2(2), a2(2);
  m1 << 1.0, 1.0;
  a1 << 0.1, 0.2;
  m2 << 0.6, 0.8;
  a2 << -0.5, 0.25;
  Ket t_state = ket_from_polar(m1, a1);
  Ket v_state = ket_from_polar(m2, a2);
  Ket a_state = basis_ket(2, 1);
  Ket w = assemble_word_state(t_state, v_state, a_state);
  REQUIRE(w.dim() == 8);
  Ket expect = tensor_ket(tensor_ket(t_state, v_state), a_state);
  CHECK((w.amplitudes() - expect.amplitudes()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("reducers produce unit states with the declared shapes") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-0.7, 0.7);

  DenseReducer dv("d_v", 6, 4);
  for (ad::Parameter* p : {&dv.a1.w, &dv.a1.b, &dv.a2.w, &dv.a2.b, &dv.a3.w,
                           &dv.a3.b})
    for (double& x : p->value) x = u(rng);
  CHECK(dv.a1.out == 6);   // hidden width = input dim
  CHECK(dv.a2.out == 8);   // then 2 x output dim
  CHECK(dv.a3.out == 4);

  ad::Tape t;
  std::vector<ad::NodeId> feats = {t.constant({1.0, 0.5, -0.25, 0.8, -1.0, 0.3}),
                                   t.constant({0.2, 0.1, 0.7, -0.3, 0.9, -0.6})};
  UnimodalStates s = reduce_dense(t, dv, feats);
  REQUIRE(s.unit.size() == 2);
  for (ad::NodeId id : s.unit) {
    double n2 = 0.0;
    for (double x : t.val(id)) n2 += x * x;
    CHECK(n2 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(t.val(id).size() == 4);
  }

  TextualReducer dt(5, 3);
  for (ad::Parameter* p : {&dt.lstm.w_ih, &dt.lstm.w_hh, &dt.lstm.b, &dt.fc1.w,
                           &dt.fc1.b, &dt.fc2.w, &dt.fc2.b})
    for (double& x : p->value) x = u(rng);
  std::vector<ad::NodeId> emb = {t.constant(std::vector<double>(5, 0.2)),
                                 t.constant(std::vector<double>(5, -0.4)),
                                 t.constant(std::vector<double>(5, 0.1))};
  UnimodalStates ts = reduce_textual(t, dt, emb);
  REQUIRE(ts.unit.size() == 3);
  for (ad::NodeId id : ts.unit) CHECK(t.val(id).size() == 3);
  // recurrence: permuting the inputs must change the last state
  std::vector<ad::NodeId> emb_rev = {emb[2], emb[1], emb[0]};
  UnimodalStates ts_rev = reduce_textual(t, dt, emb_rev);
  bool differs = false;
  for (size_t i = 0; i < 3; ++i)
    if (std::abs(t.val(ts.unit[2])[i] - t.val(ts_rev.unit[2])[i]) > 1e-9)
      differs = true;
  CHECK(differs);
}
