#include "qmf/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace qmf {

using nlohmann::json;

std::vector<std::string> grid_warnings(const RunConfig& rc) {
  std::vector<std::string> w;
  auto check = [&](const char* name, auto value, std::initializer_list<decltype(value)> grid) {
    for (auto g : grid)
      if (g == value) return;
    std::ostringstream ss;
    ss << name << "=" << value << " is outside the published grid";
    w.push_back(ss.str());
  };
  check("t_dim", rc.t_dim, {5, 10, 20});
  check("v_dim", rc.v_dim, {5, 10, 20});
  check("a_dim", rc.a_dim, {5, 10, 20});
  check("K", rc.K, {10, 20, 30, 50, 80});
  check("hidden", rc.hidden, {16, 32, 48, 64, 80});
  check("batch", rc.batch, {32, 64, 96});
  check("lr", rc.lr, {0.001, 0.002, 0.005, 0.008, 0.01});
  for (int l : rc.window_lengths)
    if (l < 1 || l > 4)
      w.push_back("window length " + std::to_string(l) +
                  " is outside the published grid");
  return w;
}

Metrics compute_metrics(const Eigen::VectorXd& predictions,
                        const Eigen::VectorXd& labels) {
  if (predictions.size() == 0 || predictions.size() != labels.size())
    throw std::invalid_argument("compute_metrics: empty or mismatched input");
  const int n = static_cast<int>(predictions.size());
  Metrics m;

  int acc7_hits = 0;
  for (int i = 0; i < n; ++i) {
    const double p = std::clamp(predictions[i], -3.0, 3.0);
    if (std::lround(p) == std::lround(std::clamp(labels[i], -3.0, 3.0)))
      ++acc7_hits;
  }
  m.acc7 = static_cast<double>(acc7_hits) / n;

  // Binary task over samples with nonzero label; positive class = label > 0.
  int nb = 0, hits = 0, tp = 0, fp = 0, fn = 0;
  for (int i = 0; i < n; ++i) {
    if (labels[i] == 0.0) continue;
    ++nb;
    const bool pos_label = labels[i] > 0.0;
    const bool pos_pred = predictions[i] > 0.0;
    if (pos_label == pos_pred) ++hits;
    if (pos_pred && pos_label) ++tp;
    if (pos_pred && !pos_label) ++fp;
    if (!pos_pred && pos_label) ++fn;
  }
  m.acc2 = nb > 0 ? static_cast<double>(hits) / nb : 0.0;
  const double prec = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  const double rec = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  m.f1 = prec + rec > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;

  m.mae = (predictions - labels).cwiseAbs().mean();

  const Eigen::VectorXd dp = predictions.array() - predictions.mean();
  const Eigen::VectorXd dl = labels.array() - labels.mean();
  const double denom = std::sqrt(dp.squaredNorm() * dl.squaredNorm());
  if (denom == 0.0) {
    m.corr = 0.0;
    m.corr_defined = false;
  } else {
    m.corr = dp.dot(dl) / denom;
  }
  return m;
}

ModelConfig make_model_config(const TrainInputs& in, const RunConfig& rc) {
  ModelConfig cfg;
  cfg.L = in.schema.L;
  cfg.e_dim = in.schema.embedding_dim;
  cfg.v_in = in.schema.visual_dim;
  cfg.a_in = in.schema.acoustic_dim;
  cfg.t_dim = rc.t_dim;
  cfg.v_dim = rc.v_dim;
  cfg.a_dim = rc.a_dim;
  cfg.window_lengths = rc.window_lengths;
  cfg.K = rc.K;
  cfg.hidden = rc.hidden;
  cfg.variant = rc.variant;
  return cfg;
}

double split_loss(ModelParams& model,
                  const std::vector<MultimodalSentence>& split) {
  double s = 0.0;
  for (const auto& sent : split)
    s += std::abs(predict_sentence(model, sent) - sent.label);
  return split.empty() ? 0.0 : s / split.size();
}

namespace {

std::string config_echo(const RunConfig& rc) {
  std::ostringstream ss;
  ss << "variant=" << to_string(rc.variant) << " dims=" << rc.t_dim << "/"
     << rc.v_dim << "/" << rc.a_dim << " K=" << rc.K << " h=" << rc.hidden
     << " batch=" << rc.batch << " lr=" << rc.lr << " epochs=" << rc.epochs
     << " seed=" << rc.seed;
  return ss.str();
}

TrainResult train_model(ModelParams model, const DatasetSplits& data,
                        const RunConfig& rc) {
  TrainResult result{std::move(model), {}, 0, 0.0};
  ModelParams& m = result.model;
  auto params = m.all_params();

  const double init_train = split_loss(m, data.train);
  double val = split_loss(m, data.valid);
  result.log.push_back({0, init_train, val});
  result.best_epoch = 0;
  result.best_val_loss = val;
  auto best_snapshot = m.snapshot_values();

  std::mt19937 rng(rc.seed + 1);
  std::vector<int> order(data.train.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= rc.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    int batches = 0;
    for (size_t ofs = 0; ofs < order.size(); ofs += rc.batch) {
      std::vector<const MultimodalSentence*> batch;
      for (size_t j = ofs; j < std::min(order.size(), ofs + rc.batch); ++j)
        batch.push_back(&data.train[order[j]]);

      ad::Tape tape;
      ad::NodeId loss;
      try {
        loss = forward_loss(tape, m, batch);
      } catch (const std::runtime_error& e) {
        throw std::runtime_error(std::string("training diverged (") + e.what() +
                                 ") with " + config_echo(rc));
      }
      for (ad::Parameter* p : params) p->zero_grad();
      tape.backward(loss);
      if (rc.clip_norm > 0.0) ad::clip_global_norm(params, rc.clip_norm);
      ad::rmsprop_step(params, rc.lr);
      project_eigenstates(m.obs_moduli);
      epoch_loss += tape.val1(loss);
      ++batches;
    }
    epoch_loss /= std::max(batches, 1);
    if (!std::isfinite(epoch_loss))
      throw std::runtime_error("training diverged with " + config_echo(rc));

    val = split_loss(m, data.valid);
    result.log.push_back({epoch, epoch_loss, val});
    if (val < result.best_val_loss) {
      result.best_val_loss = val;
      result.best_epoch = epoch;
      best_snapshot = m.snapshot_values();
    }
  }
  m.restore_values(best_snapshot);
  return result;
}

}  // namespace

std::vector<double> pretrain_nontextual(Modality m, const TrainInputs& in,
                                        const RunConfig& rc) {
  if (m == Modality::textual)
    throw std::invalid_argument("pretrain_nontextual: textual modality");
  RunConfig prc = rc;
  prc.variant = Variant::global_mixture;
  ModelConfig cfg = make_model_config(in, prc);
  cfg.active = {m};
  ModelParams model = init_model(cfg, in.vocab, in.lexicon, in.embeddings,
                                 rc.seed + static_cast<int>(m));
  TrainResult r = train_model(std::move(model), *in.data, prc);
  return r.model.theta(m).value;
}

TrainResult train(const TrainInputs& in, const RunConfig& rc,
                  const PretrainedArgs& pretrained) {
  ModelConfig cfg = make_model_config(in, rc);
  ModelParams model =
      init_model(cfg, in.vocab, in.lexicon, in.embeddings, rc.seed);
  if (rc.variant != Variant::real) {
    if (pretrained.theta_v) model.theta_v.value = *pretrained.theta_v;
    if (pretrained.theta_a) model.theta_a.value = *pretrained.theta_a;
  }
  return train_model(std::move(model), *in.data, rc);
}

Metrics evaluate(ModelParams& model,
                 const std::vector<MultimodalSentence>& split) {
  if (split.empty()) throw std::invalid_argument("evaluate: empty split");
  Eigen::VectorXd preds(split.size()), labels(split.size());
  for (size_t i = 0; i < split.size(); ++i) {
    preds[static_cast<int>(i)] = predict_sentence(model, split[i]);
    labels[static_cast<int>(i)] = split[i].label;
  }
  return compute_metrics(preds, labels);
}

namespace {

json metrics_json(const Metrics& m) {
  return json{{"acc7", m.acc7}, {"acc2", m.acc2},       {"f1", m.f1},
              {"mae", m.mae},   {"corr", m.corr},       {"corr_defined", m.corr_defined}};
}

json config_json(const RunConfig& rc) {
  return json{{"t_dim", rc.t_dim},   {"v_dim", rc.v_dim},
              {"a_dim", rc.a_dim},   {"window_lengths", rc.window_lengths},
              {"K", rc.K},           {"hidden", rc.hidden},
              {"batch", rc.batch},   {"lr", rc.lr},
              {"epochs", rc.epochs}, {"seed", rc.seed},
              {"variant", to_string(rc.variant)}};
}

}  // namespace

std::string run_log_string(const TrainResult& result, const Metrics& test_metrics,
                           const RunConfig& rc, bool with_timestamp) {
  std::ostringstream out;
  for (const EpochRecord& r : result.log)
    out << json{{"epoch", r.epoch},
                {"train_loss", r.train_loss},
                {"val_loss", r.val_loss}}
               .dump()
        << "\n";
  json fin{{"metrics", metrics_json(test_metrics)},
           {"config", config_json(rc)},
           {"best_epoch", result.best_epoch},
           {"best_val_loss", result.best_val_loss}};
  if (with_timestamp)
    fin["timestamp"] = std::chrono::duration_cast<std::chrono::seconds>(
                           std::chrono::system_clock::now().time_since_epoch())
                           .count();
  out << fin.dump() << "\n";
  return out.str();
}

void write_run_log(const std::string& path, const TrainResult& result,
                   const Metrics& test_metrics, const RunConfig& rc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write run log: " + path);
  out << run_log_string(result, test_metrics, rc);
}

GridSpec::GridSpec() {
  for (int bits = 1; bits < 16; ++bits) {
    std::set<int> w;
    for (int l = 1; l <= 4; ++l)
      if (bits & (1 << (l - 1))) w.insert(l);
    windows.push_back(std::move(w));
  }
}

long GridSpec::total() const {
  return static_cast<long>(dims.size()) * windows.size() * eigenstates.size() *
         hiddens.size() * batches.size() * lrs.size();
}

RunConfig GridSpec::at(long index, const RunConfig& base) const {
  if (index < 0 || index >= total()) {
    throw std::out_of_range("GridSpec::at: index out of range");
  }
  RunConfig rc = base;
  auto pick = [&index](const auto& v) {
    const auto x = v[index % v.size()];
    index /= static_cast<long>(v.size());
    return x;
  };
  rc.t_dim = rc.v_dim = rc.a_dim = pick(dims);
  rc.window_lengths = pick(windows);
  rc.K = pick(eigenstates);
  rc.hidden = pick(hiddens);
  rc.batch = pick(batches);
  rc.lr = pick(lrs);
  return rc;
}

GridResult grid_search(const TrainInputs& in, const GridSpec& grid, int budget,
                       const RunConfig& base, const std::string& log_path,
                       int jobs) {
  const long total = grid.total();
  std::vector<long> indices;
  if (budget >= total) {
    indices.resize(total);
    std::iota(indices.begin(), indices.end(), 0L);
  } else {
    std::mt19937 rng(base.seed);
    std::set<long> chosen;
    std::uniform_int_distribution<long> dist(0, total - 1);
    while (static_cast<int>(chosen.size()) < budget) chosen.insert(dist(rng));
    indices.assign(chosen.begin(), chosen.end());
    std::shuffle(indices.begin(), indices.end(), rng);
  }

  struct RunOutcome {
    RunConfig rc;
    double val_loss = 0;
    Metrics test;
  };
  std::vector<RunOutcome> outcomes(indices.size());

  std::mutex mu;
  size_t next = 0;
  auto worker = [&]() {
    for (;;) {
      size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= indices.size()) return;
        i = next++;
      }
      RunConfig rc = grid.at(indices[i], base);
      TrainResult r = train(in, rc);
      Metrics test = evaluate(r.model, in.data->test);
      outcomes[i] = {rc, r.best_val_loss, test};
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  GridResult best;
  bool have = false;
  std::ofstream log;
  if (!log_path.empty()) log.open(log_path);
  for (const RunOutcome& o : outcomes) {
    if (log)
      log << json{{"config", config_json(o.rc)},
                  {"val_loss", o.val_loss},
                  {"test_metrics", metrics_json(o.test)}}
                 .dump()
          << "\n";
    if (!have || o.val_loss < best.best_val_loss) {
      best = {o.rc, o.test, o.val_loss};
      have = true;
    }
  }
  if (!have) throw std::invalid_argument("grid_search: zero budget");
  return best;
}

VariantResult run_variant(Variant v, const TrainInputs& in, const RunConfig& rc) {
  RunConfig vrc = rc;
  vrc.variant = v;
  if (v == Variant::real) {
    vrc.t_dim *= 2;
    vrc.v_dim *= 2;
    vrc.a_dim *= 2;
    vrc.K *= 2;
  }
  TrainResult r = train(in, vrc);
  Metrics test = evaluate(r.model, in.data->test);
  return {std::move(r), test};
}

}  // namespace qmf
