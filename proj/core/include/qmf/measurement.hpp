// Learned multimodal observable, Born-rule measurement of context states,
// pooling and the output network producing the scalar sentiment.
#pragma once

#include "qmf/autodiff.hpp"
#include "qmf/embedding.hpp"
#include "qmf/fusion.hpp"
#include "qmf/qcore.hpp"

namespace qmf {

/// K learned eigenstates over the multimodal space. Aspect id k is the
/// 1-based index of the eigenstate; the ids carry no further semantics.
struct Observable {
  std::vector<Ket> eigenstates;
  int aspects() const { return static_cast<int>(eigenstates.size()); }
};

/// entry (k, c) = <v_k| rho_c |v_k>.
Eigen::MatrixXd measure_contexts(const ContextSet& contexts,
                                 const Observable& obs);

/// Row-wise max; ties resolve toward the smallest column index.
Eigen::VectorXd pool_max(const Eigen::MatrixXd& probmatrix);

/// Row-wise mean (the average-pool ablation).
Eigen::VectorXd pool_avg(const Eigen::MatrixXd& probmatrix);

/// D_out: two affine layers with ReLU between, scalar output.
struct OutputNet {
  AffineWeights fc1, fc2;
  OutputNet() = default;
  OutputNet(int k, int hidden)
      : fc1("d_out.fc1", k, hidden), fc2("d_out.fc2", hidden, 1) {}

  /// Value-level forward pass.
  double predict(const Eigen::VectorXd& pooled) const;
};

/// Renormalizes each eigenstate's moduli row to unit L2 norm, leaving the
/// arguments untouched. Applied after every optimizer step.
void project_eigenstates(ad::Parameter& obs_moduli);

/// Builds value-level eigenstate kets from observable parameters without
/// renormalizing (the trainer keeps the moduli rows unit-norm).
Observable observable_from_params(const ad::Parameter& obs_moduli,
                                  const ad::Parameter& obs_args);

}  // namespace qmf
