// Interpretation of a trained trimodal model: unimodal/bimodal decisions via
// reduced density matrices of the learned eigenstates, per-fragment
// sentiments, and the per-eigenstate entanglement report.
#pragma once

#include "qmf/model.hpp"

namespace qmf {

/// Value-level unimodal states of one sentence, extracted from the model's
/// forward pass (shared reducers, no re-training).
// Note: a unimodal state can be exactly zero (not unit norm) when the
// reducer's relu layer is inactive for that word; its norm entry is then ~0
// and the word state drops out of every mixture it enters.
struct SentenceStates {
  std::vector<int> positions;             // unmasked word positions
  std::array<std::vector<Ket>, 3> uni;    // per active modality, per position
  std::array<Eigen::VectorXd, 3> norms;   // unimodal weights Lambda^m
  Eigen::Vector3d beta;                   // softmax over all three
};

SentenceStates extract_states(ModelParams& model, const MultimodalSentence& s);

/// Reduced observable: M_k = tr_rest(|v_k><v_k|) over the subset space.
std::vector<DensityMatrix> reduce_observable(const ModelParams& model,
                                             const ModalitySubset& subset);

/// tr(M rho), imaginary residue discarded.
double expectation(const DensityMatrix& m, const DensityMatrix& rho);

/// Sentiment score from the modality subset only: subset word states,
/// beta renormalized over the subset, subset contexts, reduced observable,
/// the model's pooling and learned output net. No re-training anywhere.
double predict_subset(ModelParams& model, const MultimodalSentence& s,
                      const ModalitySubset& subset);

/// Sentiment of a word span (compact positions over the real words):
/// softmax-weighted mixture of the span's full word states, measured by the
/// full observable (C = 1, pooling is identity), scored by the output net.
double predict_fragment(ModelParams& model, const MultimodalSentence& s,
                        int start, int length);

struct EntanglementRow {
  int aspect = 0;              // 1-based eigenstate index
  std::string cut;             // "t|va", "v|ta", "a|tv"
  double reduced_purity = 0;
  bool separable = false;
};

/// Reduced purities of every eigenstate across the three bipartitions.
std::vector<EntanglementRow> entanglement_report(const ModelParams& model,
                                                 double tol = 1e-6);

}  // namespace qmf
