#include <doctest.h>

#include <cstdio>
#include <random>

#include "qmf/serialize.hpp"
#include "qmf/trainer.hpp"

using namespace qmf;

TEST_CASE("ket JSON round-trip") {
  Eigen::VectorXd m(3), a(3);
  m << 0.5, 0.5, std::sqrt(0.5);
  a << 0.0, 1.25, -2.5;
  Ket k{m, a};
  nlohmann::json j = ket_to_json(k);
  CHECK(j.contains("moduli"));
  CHECK(j.contains("args"));
  Ket back = ket_from_json(j);
  CHECK((back.moduli - k.moduli).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.args - k.args).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("density JSON round-trip preserves dims and planes") {
  std::mt19937 rng(41);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd m(4), a(4);
  for (int i = 0; i < 4; ++i) {
    m[i] = std::abs(g(rng)) + 0.1;
    a[i] = g(rng);
  }
  DensityMatrix rho = pure_density(ket_from_polar(m, a));
  rho.subsystem_dims = {2, 2};
  nlohmann::json j = density_to_json(rho);
  CHECK(j["dims"] == nlohmann::json({2, 2}));
  DensityMatrix back = density_from_json(j);
  CHECK(back.subsystem_dims == rho.subsystem_dims);
  CHECK((back.entries - rho.entries).cwiseAbs().maxCoeff() == 0.0);
  back.assert_valid();
}

TEST_CASE("model save/load reproduces predictions exactly") {
  SyntheticData world = generate_synthetic(30, 61, {});
  TrainInputs in;
  in.data = &world.splits;
  in.vocab = world.vocab;
  in.lexicon = world.lexicon;
  in.schema = world.schema;
  in.embeddings =
      load_embeddings("", world.vocab, world.schema.embedding_dim, 61);
  RunConfig rc;
  rc.t_dim = rc.v_dim = rc.a_dim = 2;
  rc.K = 2;
  rc.hidden = 4;
  rc.batch = 16;
  rc.epochs = 1;
  ModelParams model = train(in, rc).model;

  const std::string path = "qmf_test_model.json";
  save_model(model, path);
  ModelParams back = load_model(path);
  std::remove(path.c_str());

  CHECK(back.cfg.K == model.cfg.K);
  CHECK(back.cfg.variant == model.cfg.variant);
  CHECK(back.vocab.words == model.vocab.words);
  for (const auto& s : world.splits.test)
    CHECK(predict_sentence(back, s) ==
          doctest::Approx(predict_sentence(model, s)).epsilon(1e-15));

  CHECK_THROWS(load_model("no_such_model.json"));
}
