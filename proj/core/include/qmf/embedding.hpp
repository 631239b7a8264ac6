// Word-level state preparation: vocabularies, sentiment-based argument
// initialization, dimension-reduction networks producing unit-norm moduli
// and scalar word weights, and tensor assembly of multimodal word states.
#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "qmf/autodiff.hpp"
#include "qmf/qcore.hpp"

namespace qmf {

inline constexpr double kNormEps = 1e-12;  // guards zero-vector normalization

struct Vocabulary {
  static constexpr int kPadId = 0;
  std::vector<std::string> words{"<pad>"};
  std::unordered_map<std::string, int> ids{{"<pad>", 0}};

  int size() const { return static_cast<int>(words.size()); }
  int add(const std::string& w);
  /// kPadId for unknown words.
  int lookup(const std::string& w) const;
};

/// Word polarity lookup; absent words are neutral.
struct SentimentLexicon {
  std::unordered_map<std::string, int> polarity;  // +1 / -1

  int polarity_of(const std::string& w) const {
    auto it = polarity.find(w);
    return it == polarity.end() ? 0 : it->second;
  }
};

/// Fills a |V| x t_dim argument table from word polarity: positive rows are
/// all-zero, negative rows all-pi, neutral/absent rows all-pi/2 (cosine maps
/// those arguments to sentiment +1 / -1 / 0). The table stays trainable.
void init_textual_arguments(const Vocabulary& vocab, const SentimentLexicon& lex,
                            ad::Parameter& theta_t);

// --- reducer networks (tape-based forward passes) ---

struct AffineWeights {
  ad::Parameter w, b;
  int in = 0, out = 0;
  AffineWeights() = default;
  AffineWeights(const std::string& name, int in_dim, int out_dim)
      : w(name + ".w", out_dim, in_dim), b(name + ".b", out_dim, 1),
        in(in_dim), out(out_dim) {}
};

struct LstmWeights {
  ad::Parameter w_ih, w_hh, b;  // gate order: input, forget, cell, output
  int input = 0, hidden = 0;
  LstmWeights() = default;
  LstmWeights(const std::string& name, int input_dim, int hidden_dim)
      : w_ih(name + ".w_ih", 4 * hidden_dim, input_dim),
        w_hh(name + ".w_hh", 4 * hidden_dim, hidden_dim),
        b(name + ".b", 4 * hidden_dim, 1), input(input_dim),
        hidden(hidden_dim) {}
};

/// D_t: one LSTM layer then two affine layers (ReLU on the hidden one).
struct TextualReducer {
  LstmWeights lstm;
  AffineWeights fc1, fc2;
  TextualReducer() = default;
  TextualReducer(int e_dim, int t_dim)
      : lstm("d_t.lstm", e_dim, e_dim),
        fc1("d_t.fc1", e_dim, 2 * t_dim),
        fc2("d_t.fc2", 2 * t_dim, t_dim) {}
};

/// D_v / D_a: three stacked affine layers with ReLU on the hidden ones.
/// Hidden widths: input dim, then twice the output dim.
struct DenseReducer {
  AffineWeights a1, a2, a3;
  DenseReducer() = default;
  DenseReducer(const std::string& name, int in_dim, int out_dim)
      : a1(name + ".a1", in_dim, in_dim),
        a2(name + ".a2", in_dim, 2 * out_dim),
        a3(name + ".a3", 2 * out_dim, out_dim) {}
};

/// Per-word normalized state vectors and their pre-normalization L2 norms
/// (the norms are the unimodal word weights Lambda^m).
struct UnimodalStates {
  std::vector<ad::NodeId> unit;
  std::vector<ad::NodeId> norm;  // scalars
};

/// unit = raw / (||raw|| + eps), norm = ||raw||.
std::pair<ad::NodeId, ad::NodeId> l2_normalize(ad::Tape& t, ad::NodeId raw);

/// Runs the recurrent reducer left-to-right over per-word embedding nodes.
UnimodalStates reduce_textual(ad::Tape& t, TextualReducer& net,
                              const std::vector<ad::NodeId>& embedded);

/// Runs the affine stack per word (no recurrence).
UnimodalStates reduce_dense(ad::Tape& t, DenseReducer& net,
                            const std::vector<ad::NodeId>& features);

// --- complex vectors on the tape (split real/imag planes) ---

struct CVec {
  ad::NodeId re, im;
};

/// (moduli, args) -> (moduli*cos(args), moduli*sin(args)).
CVec polar_to_rect(ad::Tape& t, ad::NodeId moduli, ad::NodeId args);

CVec complex_kron(ad::Tape& t, const CVec& a, const CVec& b);

/// |<v|w>|^2 as a scalar node.
ad::NodeId overlap_sq(ad::Tape& t, const CVec& v, const CVec& w);

/// Value-level word state: |w> = |w_t> (x) |w_v> (x) |w_a>.
Ket assemble_word_state(const Ket& t, const Ket& v, const Ket& a);

}  // namespace qmf
