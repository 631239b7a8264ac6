// Global word weighting, sliding-window context extraction and quantum
// mixture of word states into per-context density matrices.
#pragma once

#include <set>
#include <vector>

#include "qmf/qcore.hpp"

namespace qmf {

/// Per-word importance weights Lambda and modality weights beta (convex).
struct GlobalWeights {
  Eigen::VectorXd lambda;
  Eigen::Vector3d beta;  // (t, v, a), sums to 1
};

Eigen::VectorXd softmax(const Eigen::VectorXd& x);

/// beta = softmax(beta_params); Lambda_i = beta_t L_i^t + beta_v L_i^v + beta_a L_i^a.
GlobalWeights global_weights(const Eigen::VectorXd& norms_t,
                             const Eigen::VectorXd& norms_v,
                             const Eigen::VectorXd& norms_a,
                             const Eigen::Vector3d& beta_params);

/// Contiguous word window.
struct Span {
  int start = 0;
  int length = 0;
};

/// All windows of the configured lengths whose positions are all unmasked,
/// ordered by (length, start). Windows overlapping masked positions are
/// dropped. If no configured window fits the unmasked prefix, falls back to
/// a single span covering all real words. Fully masked -> empty.
std::vector<Span> window_spans(const std::vector<bool>& mask,
                               const std::set<int>& window_lengths);

struct Context {
  Span span;
  DensityMatrix rho;
};
using ContextSet = std::vector<Context>;

/// One density matrix per window: mixture of the window's word states with
/// softmax-normalized global weights.
ContextSet local_contexts(const std::vector<Ket>& word_states,
                          const GlobalWeights& weights,
                          const std::vector<bool>& mask,
                          const std::set<int>& window_lengths,
                          const std::vector<int>& subsystem_dims);

/// Single mixture over all unmasked words. Throws on a fully masked sentence.
DensityMatrix global_mixture(const std::vector<Ket>& word_states,
                             const GlobalWeights& weights,
                             const std::vector<bool>& mask,
                             const std::vector<int>& subsystem_dims);

}  // namespace qmf
