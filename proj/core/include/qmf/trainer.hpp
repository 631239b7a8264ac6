// Training orchestration: pretraining of non-textual arguments, the main
// loop with best-validation snapshotting, evaluation metrics, random grid
// search and the ablation variants.
#pragma once

#include <optional>
#include <string>

#include "qmf/data.hpp"
#include "qmf/model.hpp"

namespace qmf {

struct RunConfig {
  int t_dim = 5, v_dim = 5, a_dim = 5;
  std::set<int> window_lengths{1, 2};
  int K = 10;
  int hidden = 32;
  int batch = 32;
  double lr = 0.001;
  int epochs = 100;
  unsigned seed = 42;
  Variant variant = Variant::qmf;
  double clip_norm = 5.0;  // 0 disables gradient clipping
};

/// Warnings for values outside the published hyperparameter grid
/// (free values are allowed).
std::vector<std::string> grid_warnings(const RunConfig& rc);

struct Metrics {
  double acc7 = 0, acc2 = 0, f1 = 0, mae = 0, corr = 0;
  bool corr_defined = true;  // false when labels or predictions are constant
};

/// acc7: rounded 7-bin agreement on clamp(pred); acc2/f1: sign task over
/// nonzero labels; mae: mean |pred - label|; corr: Pearson.
Metrics compute_metrics(const Eigen::VectorXd& predictions,
                        const Eigen::VectorXd& labels);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0, val_loss = 0;
};

struct TrainResult {
  ModelParams model;  // parameters from the epoch with minimal validation loss
  std::vector<EpochRecord> log;  // epoch 0 is the pre-training evaluation
  int best_epoch = 0;
  double best_val_loss = 0;
};

/// Everything a run needs besides hyperparameters.
struct TrainInputs {
  const DatasetSplits* data = nullptr;
  Vocabulary vocab;
  SentimentLexicon lexicon;
  Eigen::MatrixXd embeddings;  // |V| x e_dim
  DataSchema schema;
};

ModelConfig make_model_config(const TrainInputs& in, const RunConfig& rc);

/// Per-modality argument tables learned by unimodal pretraining, handed to
/// the main run as initial values.
struct PretrainedArgs {
  std::optional<std::vector<double>> theta_v;
  std::optional<std::vector<double>> theta_a;
};

/// Trains a unimodal pipeline (reducer, global mixture, measurement, output
/// net) from randomly initialized arguments; returns the learned table.
std::vector<double> pretrain_nontextual(Modality m, const TrainInputs& in,
                                        const RunConfig& rc);

/// Mini-batch RMSprop training with L1 loss; snapshots the parameters at the
/// epoch with the lowest validation loss. Throws on divergence with the
/// config echoed.
TrainResult train(const TrainInputs& in, const RunConfig& rc,
                  const PretrainedArgs& pretrained = {});

Metrics evaluate(ModelParams& model, const std::vector<MultimodalSentence>& split);

/// Validation loss (mean L1) without parameter updates.
double split_loss(ModelParams& model, const std::vector<MultimodalSentence>& split);

/// Writes the JSON-lines run log: one record per epoch and a final record
/// with metrics, config and an isolated timestamp field.
void write_run_log(const std::string& path, const TrainResult& result,
                   const Metrics& test_metrics, const RunConfig& rc);
std::string run_log_string(const TrainResult& result, const Metrics& test_metrics,
                           const RunConfig& rc, bool with_timestamp = true);

struct GridSpec {
  std::vector<int> dims{5, 10, 20};  // applied to t_dim, v_dim, a_dim jointly
  std::vector<std::set<int>> windows;  // defaults to the nonempty powerset of {1,2,3,4}
  std::vector<int> eigenstates{10, 20, 30, 50, 80};
  std::vector<int> hiddens{16, 32, 48, 64, 80};
  std::vector<int> batches{32, 64, 96};
  std::vector<double> lrs{0.001, 0.002, 0.005, 0.008, 0.01};

  GridSpec();
  long total() const;
  RunConfig at(long index, const RunConfig& base) const;
};

struct GridResult {
  RunConfig best_config;
  Metrics best_metrics;
  double best_val_loss = 0;
};

/// Samples `budget` configs uniformly without replacement (exhaustive when
/// budget >= grid size), trains each, selects by validation loss and reports
/// the winner's test metrics. jobs > 1 runs configs concurrently with
/// deterministic output ordering.
GridResult grid_search(const TrainInputs& in, const GridSpec& grid, int budget,
                       const RunConfig& base, const std::string& log_path = "",
                       int jobs = 1);

/// Trains one ablation variant. The real variant doubles the modality dims
/// and K before training.
struct VariantResult {
  TrainResult run;
  Metrics test_metrics;
};
VariantResult run_variant(Variant v, const TrainInputs& in, const RunConfig& rc);

}  // namespace qmf
