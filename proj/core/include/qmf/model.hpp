// Full model: parameter tables, initialization policies, and the
// differentiable forward graph from raw features to the L1 training loss.
#pragma once

#include <array>
#include <set>

#include "qmf/autodiff.hpp"
#include "qmf/data.hpp"
#include "qmf/embedding.hpp"
#include "qmf/fusion.hpp"
#include "qmf/measurement.hpp"

namespace qmf {

enum class Variant { qmf, real, rand_init, global_mixture, average_pool };

Variant variant_from_string(const std::string& s);
std::string to_string(Variant v);

enum class Modality : int { textual = 0, visual = 1, acoustic = 2 };

/// Canonically ordered (t, v, a), non-empty.
using ModalitySubset = std::vector<Modality>;

inline const ModalitySubset kAllModalities{
    Modality::textual, Modality::visual, Modality::acoustic};

struct ModelConfig {
  int L = 50;
  int e_dim = 300, v_in = 35, a_in = 74;
  int t_dim = 5, v_dim = 5, a_dim = 5;
  std::set<int> window_lengths{1, 2};
  int K = 10;
  int hidden = 32;
  Variant variant = Variant::qmf;
  ModalitySubset active = kAllModalities;  // modalities wired into the graph

  int modality_dim(Modality m) const {
    switch (m) {
      case Modality::textual: return t_dim;
      case Modality::visual: return v_dim;
      default: return a_dim;
    }
  }
  /// Product of active modality dims (the measured space).
  int space_dim() const;
  std::vector<int> subsystem_dims() const;
};

struct ModelParams {
  ModelConfig cfg;
  Vocabulary vocab;

  ad::Parameter embedding;                    // |V| x e_dim, PAD row frozen
  ad::Parameter theta_t, theta_v, theta_a;    // |V| x m_dim
  ad::Parameter beta;                         // 3 pre-softmax reals
  TextualReducer d_t;
  DenseReducer d_v, d_a;
  ad::Parameter obs_moduli, obs_args;         // K x space_dim
  OutputNet d_out;

  std::vector<ad::Parameter*> all_params();
  ad::Parameter& theta(Modality m);

  /// Deep copy / restore of parameter values (best-validation snapshots).
  std::vector<std::vector<double>> snapshot_values() const;
  void restore_values(const std::vector<std::vector<double>>& snap);
};

/// Builds a model with the spec initialization policies: lexicon-driven
/// textual arguments (unless the rand-init variant), neutral-pi/2 PAD rows,
/// random-argument observable with unit-norm moduli, Glorot-style reducer
/// weights. The real variant zeroes and freezes all argument tables.
ModelParams init_model(const ModelConfig& cfg, const Vocabulary& vocab,
                       const SentimentLexicon& lexicon,
                       const Eigen::MatrixXd& embedding_table, unsigned seed);

/// Tape handles produced by one sentence forward pass.
struct ForwardResult {
  ad::NodeId prediction = -1;
  std::vector<int> positions;              // unmasked word positions
  std::array<UnimodalStates, 3> uni;       // per modality, active only
  std::array<std::vector<ad::NodeId>, 3> arg_rows;
  std::vector<CVec> word_states;           // per position, measured space
  std::vector<Span> spans;                 // contexts, (length, start) order
  std::vector<std::vector<ad::NodeId>> probmatrix;  // K rows x C columns
  ad::NodeId betas = -1;                   // renormalized active betas
  std::vector<ad::NodeId> lambda;          // global word weights, per position
};

/// Differentiable forward pass for one sentence.
ForwardResult build_forward(ad::Tape& t, ModelParams& model,
                            const MultimodalSentence& s);

/// Mean L1 loss over a batch; aborts with the offending node named when a
/// non-finite intermediate appears.
ad::NodeId forward_loss(ad::Tape& t, ModelParams& model,
                        const std::vector<const MultimodalSentence*>& batch,
                        std::vector<ForwardResult>* results = nullptr);

/// Value-only prediction (forward pass without backward).
double predict_sentence(ModelParams& model, const MultimodalSentence& s);

}  // namespace qmf
