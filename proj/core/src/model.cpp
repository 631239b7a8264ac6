#include "qmf/model.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace qmf {

Variant variant_from_string(const std::string& s) {
  if (s == "qmf") return Variant::qmf;
  if (s == "real") return Variant::real;
  if (s == "rand-init") return Variant::rand_init;
  if (s == "global-mixture") return Variant::global_mixture;
  if (s == "average-pool") return Variant::average_pool;
  throw std::invalid_argument("unknown variant: " + s);
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::qmf: return "qmf";
    case Variant::real: return "real";
    case Variant::rand_init: return "rand-init";
    case Variant::global_mixture: return "global-mixture";
    default: return "average-pool";
  }
}

int ModelConfig::space_dim() const {
  int d = 1;
  for (Modality m : active) d *= modality_dim(m);
  return d;
}

std::vector<int> ModelConfig::subsystem_dims() const {
  std::vector<int> dims;
  for (Modality m : active) dims.push_back(modality_dim(m));
  return dims;
}

std::vector<ad::Parameter*> ModelParams::all_params() {
  std::vector<ad::Parameter*> ps{&embedding, &theta_t,          &theta_v,
                                 &theta_a,   &beta,             &d_t.lstm.w_ih,
                                 &d_t.lstm.w_hh, &d_t.lstm.b,   &d_t.fc1.w,
                                 &d_t.fc1.b, &d_t.fc2.w,        &d_t.fc2.b,
                                 &d_v.a1.w,  &d_v.a1.b,         &d_v.a2.w,
                                 &d_v.a2.b,  &d_v.a3.w,         &d_v.a3.b,
                                 &d_a.a1.w,  &d_a.a1.b,         &d_a.a2.w,
                                 &d_a.a2.b,  &d_a.a3.w,         &d_a.a3.b,
                                 &obs_moduli, &obs_args,        &d_out.fc1.w,
                                 &d_out.fc1.b, &d_out.fc2.w,    &d_out.fc2.b};
  return ps;
}

ad::Parameter& ModelParams::theta(Modality m) {
  switch (m) {
    case Modality::textual: return theta_t;
    case Modality::visual: return theta_v;
    default: return theta_a;
  }
}

std::vector<std::vector<double>> ModelParams::snapshot_values() const {
  auto* self = const_cast<ModelParams*>(this);
  std::vector<std::vector<double>> snap;
  for (ad::Parameter* p : self->all_params()) snap.push_back(p->value);
  return snap;
}

void ModelParams::restore_values(const std::vector<std::vector<double>>& snap) {
  auto ps = all_params();
  for (size_t i = 0; i < ps.size(); ++i) ps[i]->value = snap[i];
}

namespace {

void glorot_init(ad::Parameter& p, int fan_in, int fan_out, std::mt19937& rng) {
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> uni(-bound, bound);
  for (double& v : p.value) v = uni(rng);
}

void init_affine(AffineWeights& a, std::mt19937& rng, double bias = 0.0) {
  glorot_init(a.w, a.in, a.out, rng);
  std::fill(a.b.value.begin(), a.b.value.end(), bias);
}

}  // namespace

ModelParams init_model(const ModelConfig& cfg, const Vocabulary& vocab,
                       const SentimentLexicon& lexicon,
                       const Eigen::MatrixXd& embedding_table, unsigned seed) {
  const double pi = std::numbers::pi;
  std::mt19937 rng(seed);

  ModelParams m;
  m.cfg = cfg;
  m.vocab = vocab;
  const int V = vocab.size();
  const int D = cfg.space_dim();

  m.embedding = ad::Parameter("embedding", V, cfg.e_dim);
  m.embedding.frozen_rows = {Vocabulary::kPadId};
  if (embedding_table.rows() != V || embedding_table.cols() != cfg.e_dim)
    throw std::invalid_argument("init_model: embedding table shape mismatch");
  for (int r = 0; r < V; ++r)
    for (int c = 0; c < cfg.e_dim; ++c)
      m.embedding.value[static_cast<size_t>(r) * cfg.e_dim + c] =
          embedding_table(r, c);

  m.theta_t = ad::Parameter("theta_t", V, cfg.t_dim);
  m.theta_v = ad::Parameter("theta_v", V, cfg.v_dim);
  m.theta_a = ad::Parameter("theta_a", V, cfg.a_dim);

  std::uniform_real_distribution<double> arg_uni(-pi, pi);
  if (cfg.variant == Variant::rand_init) {
    for (double& v : m.theta_t.value) v = arg_uni(rng);
  } else {
    init_textual_arguments(vocab, lexicon, m.theta_t);
  }
  for (double& v : m.theta_v.value) v = arg_uni(rng);
  for (double& v : m.theta_a.value) v = arg_uni(rng);
  // PAD / out-of-vocabulary rows: neutral pi/2.
  std::fill_n(m.theta_v.row(Vocabulary::kPadId), cfg.v_dim, pi / 2.0);
  std::fill_n(m.theta_a.row(Vocabulary::kPadId), cfg.a_dim, pi / 2.0);

  m.beta = ad::Parameter("beta", 3, 1);  // softmax of zeros: uniform

  m.d_t = TextualReducer(cfg.e_dim, cfg.t_dim);
  glorot_init(m.d_t.lstm.w_ih, cfg.e_dim, m.d_t.lstm.hidden, rng);
  glorot_init(m.d_t.lstm.w_hh, m.d_t.lstm.hidden, m.d_t.lstm.hidden, rng);
  // forget-gate bias at 1
  std::fill_n(m.d_t.lstm.b.value.begin() + m.d_t.lstm.hidden,
              m.d_t.lstm.hidden, 1.0);
  init_affine(m.d_t.fc1, rng, 0.1);
  init_affine(m.d_t.fc2, rng);

  m.d_v = DenseReducer("d_v", cfg.v_in, cfg.v_dim);
  m.d_a = DenseReducer("d_a", cfg.a_in, cfg.a_dim);
  // Slightly positive hidden biases: a fully dead relu layer would emit an
  // exactly-zero state vector, whose normalization is a gradient singularity.
  for (AffineWeights* a : {&m.d_v.a1, &m.d_v.a2, &m.d_a.a1, &m.d_a.a2})
    init_affine(*a, rng, 0.1);
  init_affine(m.d_v.a3, rng);
  init_affine(m.d_a.a3, rng);

  m.obs_moduli = ad::Parameter("obs_moduli", cfg.K, D,
                               ad::Parameter::Constraint::unit_norm_moduli);
  m.obs_args = ad::Parameter("obs_args", cfg.K, D);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& v : m.obs_moduli.value) v = std::abs(gauss(rng));
  project_eigenstates(m.obs_moduli);
  for (double& v : m.obs_args.value) v = arg_uni(rng);

  m.d_out = OutputNet(cfg.K, cfg.hidden);
  init_affine(m.d_out.fc1, rng);
  init_affine(m.d_out.fc2, rng);

  if (cfg.variant == Variant::real) {
    for (ad::Parameter* p : {&m.theta_t, &m.theta_v, &m.theta_a, &m.obs_args}) {
      std::fill(p->value.begin(), p->value.end(), 0.0);
      p->constraint = ad::Parameter::Constraint::frozen;
    }
  }
  return m;
}

namespace {

bool is_active(const ModalitySubset& active, Modality m) {
  for (Modality x : active)
    if (x == m) return true;
  return false;
}

}  // namespace

ForwardResult build_forward(ad::Tape& t, ModelParams& model,
                            const MultimodalSentence& s) {
  const ModelConfig& cfg = model.cfg;
  ForwardResult r;
  for (int i = 0; i < s.length(); ++i)
    if (s.mask[i]) r.positions.push_back(i);
  if (r.positions.empty())
    throw std::invalid_argument("build_forward: fully masked sentence");
  const int n = static_cast<int>(r.positions.size());

  // Unimodal reducers over the real words (recurrence left-to-right).
  for (Modality m : cfg.active) {
    std::vector<ad::NodeId> inputs;
    for (int i : r.positions) {
      if (m == Modality::textual) {
        inputs.push_back(t.param_row(model.embedding, s.words[i]));
      } else {
        const Eigen::MatrixXd& feat =
            m == Modality::visual ? s.visual : s.acoustic;
        std::vector<double> row(feat.cols());
        for (int c = 0; c < feat.cols(); ++c) row[c] = feat(i, c);
        inputs.push_back(t.constant(std::move(row)));
      }
    }
    const int mi = static_cast<int>(m);
    r.uni[mi] = m == Modality::textual
                    ? reduce_textual(t, model.d_t, inputs)
                    : reduce_dense(t, m == Modality::visual ? model.d_v : model.d_a,
                                   inputs);
    for (int i : r.positions)
      r.arg_rows[mi].push_back(t.param_row(model.theta(m), s.words[i]));
  }

  // Multimodal word states: tensor product of active unimodal states.
  for (int p = 0; p < n; ++p) {
    bool first = true;
    CVec w{};
    for (Modality m : cfg.active) {
      const int mi = static_cast<int>(m);
      CVec u = polar_to_rect(t, r.uni[mi].unit[p], r.arg_rows[mi][p]);
      w = first ? u : complex_kron(t, w, u);
      first = false;
    }
    r.word_states.push_back(w);
  }

  // Global weights: beta renormalized over the active subset.
  ad::NodeId beta_sm = t.softmax(t.param_all(model.beta));
  std::vector<ad::NodeId> active_betas;
  for (Modality m : cfg.active)
    active_betas.push_back(t.slice(beta_sm, static_cast<int>(m), 1));
  ad::NodeId beta_sum = t.sum(t.stack(active_betas));
  r.betas = t.div_by_scalar(t.stack(active_betas), beta_sum);
  for (int p = 0; p < n; ++p) {
    ad::NodeId lam = t.constant(0.0);
    for (size_t j = 0; j < cfg.active.size(); ++j) {
      const int mi = static_cast<int>(cfg.active[j]);
      lam = t.add(lam, t.mul(t.slice(r.betas, static_cast<int>(j), 1),
                             r.uni[mi].norm[p]));
    }
    r.lambda.push_back(lam);
  }

  // Contexts: sliding windows, or one global window for that variant.
  std::vector<bool> compact_mask(n, true);
  if (cfg.variant == Variant::global_mixture) {
    r.spans = {Span{0, n}};
  } else {
    // positions are compact; windows are taken over real words
    r.spans = window_spans(compact_mask, cfg.window_lengths);
  }

  // Eigenstates.
  std::vector<CVec> eig;
  for (int k = 0; k < cfg.K; ++k)
    eig.push_back(polar_to_rect(t, t.param_row(model.obs_moduli, k),
                                t.param_row(model.obs_args, k)));

  // Per-(aspect, word) overlap probabilities, shared across contexts.
  std::vector<std::vector<ad::NodeId>> q(cfg.K, std::vector<ad::NodeId>(n));
  for (int k = 0; k < cfg.K; ++k)
    for (int p = 0; p < n; ++p)
      q[k][p] = overlap_sq(t, eig[k], r.word_states[p]);

  // Context mixtures measured against each aspect:
  // p_kc = sum_i softmax(lambda)_i * |<v_k|w_i>|^2.
  r.probmatrix.assign(cfg.K, {});
  for (const Span& sp : r.spans) {
    std::vector<ad::NodeId> lam(r.lambda.begin() + sp.start,
                                r.lambda.begin() + sp.start + sp.length);
    ad::NodeId weights = t.softmax(t.stack(lam));
    for (int k = 0; k < cfg.K; ++k) {
      std::vector<ad::NodeId> qs(q[k].begin() + sp.start,
                                 q[k].begin() + sp.start + sp.length);
      r.probmatrix[k].push_back(t.dot(weights, t.stack(qs)));
    }
  }

  // Pooling and output network.
  std::vector<ad::NodeId> pooled(cfg.K);
  for (int k = 0; k < cfg.K; ++k)
    pooled[k] = cfg.variant == Variant::average_pool
                    ? t.mean_of(r.probmatrix[k])
                    : t.max_of(r.probmatrix[k]);
  ad::NodeId pv = t.stack(pooled);
  ad::NodeId h = t.relu(t.affine(t.param_all(model.d_out.fc1.w),
                                 t.param_all(model.d_out.fc1.b), cfg.hidden,
                                 cfg.K, pv));
  r.prediction = t.affine(t.param_all(model.d_out.fc2.w),
                          t.param_all(model.d_out.fc2.b), 1, cfg.hidden, h);
  return r;
}

ad::NodeId forward_loss(ad::Tape& t, ModelParams& model,
                        const std::vector<const MultimodalSentence*>& batch,
                        std::vector<ForwardResult>* results) {
  if (batch.empty()) throw std::invalid_argument("forward_loss: empty batch");
  std::vector<ad::NodeId> errors;
  for (const MultimodalSentence* s : batch) {
    ForwardResult r = build_forward(t, model, *s);
    errors.push_back(t.abs_(t.sub(r.prediction, t.constant(s->label))));
    if (results) results->push_back(std::move(r));
  }
  ad::NodeId loss = t.mean_of(errors);
  if (!std::isfinite(t.val1(loss))) {
    for (size_t id = 0; id < t.node_count(); ++id)
      for (double v : t.val(static_cast<ad::NodeId>(id)))
        if (!std::isfinite(v))
          throw std::runtime_error(
              "forward_loss: non-finite value at tape node " +
              std::to_string(id));
    throw std::runtime_error("forward_loss: non-finite loss");
  }
  return loss;
}

double predict_sentence(ModelParams& model, const MultimodalSentence& s) {
  ad::Tape t;
  return t.val1(build_forward(t, model, s).prediction);
}

}  // namespace qmf
