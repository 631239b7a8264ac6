#include "qmf/interpret.hpp"

#include <cmath>
#include <numbers>

namespace qmf {

namespace {

/// Builds a Ket from possibly signed moduli by folding the sign into the
/// argument (-r e^{i a} = r e^{i (a+pi)}).
Ket ket_from_signed(const std::vector<double>& moduli,
                    const std::vector<double>& args) {
  const int n = static_cast<int>(moduli.size());
  Eigen::VectorXd m(n), a(n);
  for (int j = 0; j < n; ++j) {
    if (moduli[j] < 0.0) {
      m[j] = -moduli[j];
      a[j] = args[j] + std::numbers::pi;
    } else {
      m[j] = moduli[j];
      a[j] = args[j];
    }
  }
  return Ket{m, a};
}

int subset_position(const ModalitySubset& active, Modality m) {
  for (size_t j = 0; j < active.size(); ++j)
    if (active[j] == m) return static_cast<int>(j);
  return -1;
}

}  // namespace

SentenceStates extract_states(ModelParams& model, const MultimodalSentence& s) {
  ad::Tape t;
  ForwardResult r = build_forward(t, model, s);
  SentenceStates out;
  out.positions = r.positions;
  const int n = static_cast<int>(r.positions.size());
  for (Modality m : model.cfg.active) {
    const int mi = static_cast<int>(m);
    out.norms[mi].resize(n);
    for (int p = 0; p < n; ++p) {
      out.uni[mi].push_back(
          ket_from_signed(t.val(r.uni[mi].unit[p]), t.val(r.arg_rows[mi][p])));
      out.norms[mi][p] = t.val1(r.uni[mi].norm[p]);
    }
  }
  // softmax over all three beta parameters (subsets renormalize later)
  Eigen::Vector3d bp;
  for (int j = 0; j < 3; ++j) bp[j] = model.beta.value[j];
  out.beta = softmax(bp);
  return out;
}

std::vector<DensityMatrix> reduce_observable(const ModelParams& model,
                                             const ModalitySubset& subset) {
  if (subset.empty())
    throw std::invalid_argument("reduce_observable: empty subset");
  const std::vector<int> full_dims = model.cfg.subsystem_dims();
  Observable obs = observable_from_params(model.obs_moduli, model.obs_args);

  SubsystemCut cut;
  for (Modality m : subset) {
    const int pos = subset_position(model.cfg.active, m);
    if (pos < 0)
      throw std::invalid_argument("reduce_observable: modality not active");
    cut.keep.push_back(pos);
  }

  std::vector<DensityMatrix> out;
  for (const Ket& v : obs.eigenstates) {
    DensityMatrix rho = pure_density(v);
    rho.subsystem_dims = full_dims;
    if (cut.keep.size() == full_dims.size())
      out.push_back(std::move(rho));  // trivial trace
    else
      out.push_back(partial_trace(rho, cut));
  }
  return out;
}

double expectation(const DensityMatrix& m, const DensityMatrix& rho) {
  if (m.dim() != rho.dim())
    throw std::invalid_argument("expectation: dimension mismatch");
  return (m.entries * rho.entries).trace().real();
}

namespace {

/// Measurement + pooling + output net over subset contexts.
double score_contexts(ModelParams& model,
                      const std::vector<std::vector<double>>& probmatrix) {
  const int K = model.cfg.K;
  Eigen::VectorXd pooled(K);
  for (int k = 0; k < K; ++k) {
    if (model.cfg.variant == Variant::average_pool) {
      double s = 0.0;
      for (double p : probmatrix[k]) s += p;
      pooled[k] = s / probmatrix[k].size();
    } else {
      double best = probmatrix[k][0];
      for (double p : probmatrix[k]) best = std::max(best, p);
      pooled[k] = best;
    }
  }
  return model.d_out.predict(pooled);
}

}  // namespace

double predict_subset(ModelParams& model, const MultimodalSentence& s,
                      const ModalitySubset& subset) {
  if (subset.empty())
    throw std::invalid_argument("predict_subset: empty subset");
  SentenceStates st = extract_states(model, s);
  const int n = static_cast<int>(st.positions.size());

  // Subset word states and renormalized global weights.
  double beta_sum = 0.0;
  for (Modality m : subset) beta_sum += st.beta[static_cast<int>(m)];
  Eigen::VectorXd lambda =Eigen::VectorXd::Zero(n);
  std::vector<Ket> word_states;
  std::vector<int> sub_dims;
  for (int p = 0; p < n; ++p) {
    Ket w;
    bool first = true;
    for (Modality m : subset) {
      const int mi = static_cast<int>(m);
      w = first ? st.uni[mi][p] : tensor_ket(w, st.uni[mi][p]);
      first = false;
      if (p == 0) sub_dims.push_back(model.cfg.modality_dim(m));
      lambda[p] += st.beta[mi] / beta_sum * st.norms[mi][p];
    }
    word_states.push_back(std::move(w));
  }

  // Subset contexts with the model's window policy.
  std::vector<bool> compact_mask(n, true);
  std::vector<Span> spans =
      model.cfg.variant == Variant::global_mixture
          ? std::vector<Span>{Span{0, n}}
          : window_spans(compact_mask, model.cfg.window_lengths);

  std::vector<DensityMatrix> reduced = reduce_observable(model, subset);

  std::vector<std::vector<double>> probmatrix(model.cfg.K);
  for (const Span& sp : spans) {
    std::vector<Ket> states(word_states.begin() + sp.start,
                            word_states.begin() + sp.start + sp.length);
    Eigen::VectorXd w = softmax(lambda.segment(sp.start, sp.length));
    DensityMatrix rho = mix(states, w, sub_dims);
    for (int k = 0; k < model.cfg.K; ++k)
      probmatrix[k].push_back(expectation(reduced[k], rho));
  }
  return score_contexts(model, probmatrix);
}

double predict_fragment(ModelParams& model, const MultimodalSentence& s,
                        int start, int length) {
  if (length < 1) throw std::invalid_argument("predict_fragment: empty fragment");
  SentenceStates st = extract_states(model, s);
  const int n = static_cast<int>(st.positions.size());
  if (start < 0 || start + length > n)
    throw std::invalid_argument("predict_fragment: span out of range");

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(n);
  std::vector<Ket> word_states;
  for (int p = 0; p < n; ++p) {
    Ket w;
    bool first = true;
    for (Modality m : model.cfg.active) {
      const int mi = static_cast<int>(m);
      w = first ? st.uni[mi][p] : tensor_ket(w, st.uni[mi][p]);
      first = false;
      lambda[p] += st.beta[mi] * st.norms[mi][p];
    }
    word_states.push_back(std::move(w));
  }
  std::vector<Ket> states(word_states.begin() + start,
                          word_states.begin() + start + length);
  Eigen::VectorXd w = softmax(lambda.segment(start, length));
  DensityMatrix rho = mix(states, w, model.cfg.subsystem_dims());

  Observable obs = observable_from_params(model.obs_moduli, model.obs_args);
  std::vector<std::vector<double>> probmatrix(model.cfg.K);
  for (int k = 0; k < model.cfg.K; ++k)
    probmatrix[k].push_back(born_probability(rho, obs.eigenstates[k]));
  return score_contexts(model, probmatrix);
}

std::vector<EntanglementRow> entanglement_report(const ModelParams& model,
                                                 double tol) {
  if (model.cfg.active.size() != 3)
    throw std::invalid_argument("entanglement_report: needs the trimodal model");
  const std::vector<int> dims = model.cfg.subsystem_dims();
  Observable obs = observable_from_params(model.obs_moduli, model.obs_args);
  const std::vector<std::pair<std::string, SubsystemCut>> cuts{
      {"t|va", {{0}}}, {"v|ta", {{1}}}, {"a|tv", {{2}}}};

  std::vector<EntanglementRow> rows;
  for (int k = 0; k < obs.aspects(); ++k) {
    DensityMatrix rho = pure_density(obs.eigenstates[k]);
    rho.subsystem_dims = dims;
    for (const auto& [name, cut] : cuts) {
      const double p = purity(partial_trace(rho, cut));
      rows.push_back({k + 1, name, p, p >= 1.0 - tol});
    }
  }
  return rows;
}

}  // namespace qmf
