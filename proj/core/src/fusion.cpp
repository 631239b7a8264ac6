#include "qmf/fusion.hpp"

#include <cmath>

namespace qmf {

Eigen::VectorXd softmax(const Eigen::VectorXd& x) {
  const double m = x.maxCoeff();
  Eigen::VectorXd e = (x.array() - m).exp();
  return e / e.sum();
}

GlobalWeights global_weights(const Eigen::VectorXd& norms_t,
                             const Eigen::VectorXd& norms_v,
                             const Eigen::VectorXd& norms_a,
                             const Eigen::Vector3d& beta_params) {
  if (norms_t.size() != norms_v.size() || norms_t.size() != norms_a.size())
    throw std::invalid_argument("global_weights: length mismatch");
  GlobalWeights gw;
  gw.beta = softmax(beta_params);
  gw.lambda =
      gw.beta[0] * norms_t + gw.beta[1] * norms_v + gw.beta[2] * norms_a;
  return gw;
}

std::vector<Span> window_spans(const std::vector<bool>& mask,
                               const std::set<int>& window_lengths) {
  if (window_lengths.empty())
    throw std::invalid_argument("window_spans: no window lengths configured");
  const int L = static_cast<int>(mask.size());
  std::vector<Span> spans;
  for (int l : window_lengths) {
    for (int s = 0; s + l <= L; ++s) {
      bool ok = true;
      for (int j = s; j < s + l; ++j) ok = ok && mask[j];
      if (ok) spans.push_back({s, l});
    }
  }
  if (spans.empty()) {
    // No configured window fits: one span over the real words, if any.
    int first = -1, last = -1;
    for (int j = 0; j < L; ++j)
      if (mask[j]) {
        if (first < 0) first = j;
        last = j;
      }
    if (first >= 0) spans.push_back({first, last - first + 1});
  }
  return spans;
}

namespace {

DensityMatrix mix_span(const std::vector<Ket>& word_states,
                       const Eigen::VectorXd& lambda, const Span& sp,
                       const std::vector<int>& dims) {
  std::vector<Ket> states(word_states.begin() + sp.start,
                          word_states.begin() + sp.start + sp.length);
  Eigen::VectorXd w = softmax(lambda.segment(sp.start, sp.length));
  return mix(states, w, dims);
}

}  // namespace

ContextSet local_contexts(const std::vector<Ket>& word_states,
                          const GlobalWeights& weights,
                          const std::vector<bool>& mask,
                          const std::set<int>& window_lengths,
                          const std::vector<int>& subsystem_dims) {
  ContextSet out;
  for (const Span& sp : window_spans(mask, window_lengths))
    out.push_back({sp, mix_span(word_states, weights.lambda, sp, subsystem_dims)});
  return out;
}

DensityMatrix global_mixture(const std::vector<Ket>& word_states,
                             const GlobalWeights& weights,
                             const std::vector<bool>& mask,
                             const std::vector<int>& subsystem_dims) {
  std::vector<Ket> states;
  std::vector<double> lam;
  for (size_t j = 0; j < word_states.size(); ++j)
    if (mask[j]) {
      states.push_back(word_states[j]);
      lam.push_back(weights.lambda[static_cast<int>(j)]);
    }
  if (states.empty())
    throw std::invalid_argument("global_mixture: fully masked sentence");
  Eigen::VectorXd l = Eigen::Map<Eigen::VectorXd>(lam.data(), lam.size());
  return mix(states, softmax(l), subsystem_dims);
}

}  // namespace qmf
