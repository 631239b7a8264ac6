#include "qmf/embedding.hpp"

#include <cmath>
#include <numbers>

namespace qmf {

int Vocabulary::add(const std::string& w) {
  auto it = ids.find(w);
  if (it != ids.end()) return it->second;
  const int id = size();
  ids.emplace(w, id);
  words.push_back(w);
  return id;
}

int Vocabulary::lookup(const std::string& w) const {
  auto it = ids.find(w);
  return it == ids.end() ? kPadId : it->second;
}

void init_textual_arguments(const Vocabulary& vocab, const SentimentLexicon& lex,
                            ad::Parameter& theta_t) {
  const double pi = std::numbers::pi;
  for (int w = 0; w < vocab.size() && w < theta_t.rows; ++w) {
    const int pol = lex.polarity_of(vocab.words[w]);
    const double arg = pol > 0 ? 0.0 : (pol < 0 ? pi : pi / 2.0);
    std::fill_n(theta_t.row(w), theta_t.cols, arg);
  }
}

std::pair<ad::NodeId, ad::NodeId> l2_normalize(ad::Tape& t, ad::NodeId raw) {
  // The epsilon sits under the sqrt so the backward pass stays finite even
  // when a reducer emits an exactly-zero vector (e.g. a fully dead relu
  // layer); gradient clipping bounds the resulting large-but-finite spike.
  ad::NodeId norm =
      t.sqrt_(t.add(t.dot(raw, raw), t.constant(kNormEps * kNormEps)));
  ad::NodeId unit = t.div_by_scalar(raw, norm, kNormEps);
  return {unit, norm};
}

namespace {

ad::NodeId affine_fwd(ad::Tape& t, AffineWeights& a, ad::NodeId x) {
  return t.affine(t.param_all(a.w), t.param_all(a.b), a.out, a.in, x);
}

}  // namespace

UnimodalStates reduce_textual(ad::Tape& t, TextualReducer& net,
                              const std::vector<ad::NodeId>& embedded) {
  const int h = net.lstm.hidden;
  ad::NodeId w_ih = t.param_all(net.lstm.w_ih);
  ad::NodeId w_hh = t.param_all(net.lstm.w_hh);
  ad::NodeId bias = t.param_all(net.lstm.b);
  ad::NodeId hs = t.constant(std::vector<double>(h, 0.0));
  ad::NodeId cs = t.constant(std::vector<double>(h, 0.0));

  UnimodalStates out;
  for (ad::NodeId x : embedded) {
    ad::NodeId z = t.add(t.add(t.matvec(w_ih, 4 * h, net.lstm.input, x),
                               t.matvec(w_hh, 4 * h, h, hs)),
                         bias);
    ad::NodeId gi = t.sigmoid(t.slice(z, 0, h));
    ad::NodeId gf = t.sigmoid(t.slice(z, h, h));
    ad::NodeId gc = t.tanh_(t.slice(z, 2 * h, h));
    ad::NodeId go = t.sigmoid(t.slice(z, 3 * h, h));
    cs = t.add(t.mul(gf, cs), t.mul(gi, gc));
    hs = t.mul(go, t.tanh_(cs));

    ad::NodeId raw = affine_fwd(t, net.fc2, t.relu(affine_fwd(t, net.fc1, hs)));
    auto [unit, norm] = l2_normalize(t, raw);
    out.unit.push_back(unit);
    out.norm.push_back(norm);
  }
  return out;
}

UnimodalStates reduce_dense(ad::Tape& t, DenseReducer& net,
                            const std::vector<ad::NodeId>& features) {
  UnimodalStates out;
  for (ad::NodeId x : features) {
    ad::NodeId raw = affine_fwd(
        t, net.a3,
        t.relu(affine_fwd(t, net.a2, t.relu(affine_fwd(t, net.a1, x)))));
    auto [unit, norm] = l2_normalize(t, raw);
    out.unit.push_back(unit);
    out.norm.push_back(norm);
  }
  return out;
}

CVec polar_to_rect(ad::Tape& t, ad::NodeId moduli, ad::NodeId args) {
  return CVec{t.mul(moduli, t.cos_(args)), t.mul(moduli, t.sin_(args))};
}

CVec complex_kron(ad::Tape& t, const CVec& a, const CVec& b) {
  ad::NodeId rr = t.kron(a.re, b.re);
  ad::NodeId ii = t.kron(a.im, b.im);
  ad::NodeId ri = t.kron(a.re, b.im);
  ad::NodeId ir = t.kron(a.im, b.re);
  return CVec{t.sub(rr, ii), t.add(ri, ir)};
}

ad::NodeId overlap_sq(ad::Tape& t, const CVec& v, const CVec& w) {
  // <v|w> = sum conj(v_j) w_j
  ad::NodeId re = t.add(t.dot(v.re, w.re), t.dot(v.im, w.im));
  ad::NodeId im = t.sub(t.dot(v.re, w.im), t.dot(v.im, w.re));
  return t.add(t.mul(re, re), t.mul(im, im));
}

Ket assemble_word_state(const Ket& t, const Ket& v, const Ket& a) {
  return tensor_ket(tensor_ket(t, v), a);
}

}  // namespace qmf
