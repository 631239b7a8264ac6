// Microbenchmarks for the hot paths: tensor composition, mixture,
// partial trace and the full training forward/backward pass.

#include <benchmark/benchmark.h>

#include <random>

#include "qmf/model.hpp"
#include "qmf/qcore.hpp"

namespace {

qmf::Ket random_ket(std::mt19937& rng, int dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> phase(-M_PI, M_PI);
  Eigen::VectorXd moduli(dim), args(dim);
  for (int i = 0; i < dim; ++i) {
    moduli[i] = std::abs(gauss(rng)) + 1e-3;
    args[i] = phase(rng);
  }
  return qmf::ket_from_polar(moduli, args);
}

void BM_TensorKet(benchmark::State& state) {
  std::mt19937 rng(1);
  const int d = static_cast<int>(state.range(0));
  qmf::Ket a = random_ket(rng, d), b = random_ket(rng, d), c = random_ket(rng, d);
  for (auto _ : state)
    benchmark::DoNotOptimize(qmf::tensor_ket(qmf::tensor_ket(a, b), c));
}
BENCHMARK(BM_TensorKet)->Arg(5)->Arg(10)->Arg(20);

void BM_Mixture(benchmark::State& state) {
  std::mt19937 rng(2);
  const int d = static_cast<int>(state.range(0));
  std::vector<qmf::Ket> states;
  for (int i = 0; i < 8; ++i) states.push_back(random_ket(rng, d * d * d));
  Eigen::VectorXd w = Eigen::VectorXd::Constant(8, 1.0 / 8.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(qmf::mix(states, w, {d, d, d}));
}
BENCHMARK(BM_Mixture)->Arg(3)->Arg(5);

void BM_PartialTrace(benchmark::State& state) {
  std::mt19937 rng(3);
  const int d = static_cast<int>(state.range(0));
  std::vector<qmf::Ket> states = {random_ket(rng, d * d * d)};
  Eigen::VectorXd w = Eigen::VectorXd::Ones(1);
  qmf::DensityMatrix rho = qmf::mix(states, w, {d, d, d});
  for (auto _ : state)
    benchmark::DoNotOptimize(qmf::partial_trace(rho, qmf::SubsystemCut{{0}}));
}
BENCHMARK(BM_PartialTrace)->Arg(3)->Arg(5);

void BM_ForwardBackward(benchmark::State& state) {
  qmf::SyntheticConfig scfg;
  qmf::SyntheticData world = qmf::generate_synthetic(16, 11, scfg);
  Eigen::MatrixXd emb = qmf::load_embeddings("", world.vocab,
                                             scfg.embedding_dim, 11);
  qmf::ModelConfig cfg;
  cfg.L = scfg.L;
  cfg.e_dim = scfg.embedding_dim;
  cfg.v_in = scfg.visual_dim;
  cfg.a_in = scfg.acoustic_dim;
  cfg.t_dim = cfg.v_dim = cfg.a_dim = 5;
  cfg.K = 10;
  qmf::ModelParams model =
      qmf::init_model(cfg, world.vocab, world.lexicon, emb, 11);
  const qmf::MultimodalSentence& s = world.splits.train.front();
  const std::vector<const qmf::MultimodalSentence*> batch = {&s};
  for (auto _ : state) {
    qmf::ad::Tape tape;
    qmf::ad::NodeId root = qmf::forward_loss(tape, model, batch);
    tape.backward(root);
    benchmark::DoNotOptimize(tape.val1(root));
  }
}
BENCHMARK(BM_ForwardBackward);

}  // namespace

BENCHMARK_MAIN();
