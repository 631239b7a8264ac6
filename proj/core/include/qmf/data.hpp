// Dataset ingestion (JSON-lines + flat key-value sidecar), padding and
// splits, synthetic data generation, embedding and lexicon file loading.
#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qmf/embedding.hpp"

namespace qmf {

/// Word-aligned feature sequence with mask and sentiment label in [-3, 3].
struct MultimodalSentence {
  std::vector<int> words;     // vocabulary ids, length L
  Eigen::MatrixXd visual;     // L x v_in
  Eigen::MatrixXd acoustic;   // L x a_in
  std::vector<bool> mask;     // false on padded positions
  double label = 0.0;

  int length() const { return static_cast<int>(words.size()); }
  int real_words() const;
};

struct DatasetSplits {
  std::vector<MultimodalSentence> train, valid, test;
};

/// Sidecar schema: sentence length and feature widths.
struct DataSchema {
  int L = 50;
  int visual_dim = 35;
  int acoustic_dim = 74;
  int embedding_dim = 300;
};

/// Flat key-value file ("key value" or "key=value" per line, # comments).
std::map<std::string, std::string> parse_kv_file(const std::string& path);
DataSchema schema_from_kv(const std::map<std::string, std::string>& kv);
void write_schema(const DataSchema& schema, const std::string& path);

struct LoadedDataset {
  DatasetSplits splits;
  Vocabulary vocab;
  DataSchema schema;
};

/// Parses the JSON-lines dataset format: one object per line with keys
/// split, words, visual, acoustic, label. Builds the vocabulary, truncates
/// to L keeping the head, zero-pads at the tail.
LoadedDataset load_dataset(const std::string& path, const DataSchema& schema);

/// Writes splits back to the JSON-lines format.
void write_dataset(const DatasetSplits& splits, const Vocabulary& vocab,
                   const std::string& path);

struct SyntheticData {
  DatasetSplits splits;
  Vocabulary vocab;
  SentimentLexicon lexicon;
  DataSchema schema;
  /// Per-sentence planted latents (z_t, z_v, z_a), train+valid+test order.
  std::vector<std::array<double, 3>> latents;
};

struct SyntheticConfig {
  int L = 12;
  int visual_dim = 6;
  int acoustic_dim = 6;
  int embedding_dim = 16;
  int vocab_words = 40;
};

/// Labels are a smooth function of planted per-modality latents plus noise
/// (sigma = 0.1); the textual channel carries the strongest signal.
/// Splits 70/15/15, deterministic in the seed.
SyntheticData generate_synthetic(int n, unsigned seed,
                                 const SyntheticConfig& cfg = {});

/// Plain-text embeddings, one line per word: token then decimals.
/// Missing words get uniform random rows in [-0.05, 0.05]; row 0 stays zero.
Eigen::MatrixXd load_embeddings(const std::string& path, const Vocabulary& vocab,
                                int e_dim, unsigned seed);

/// One line per word: token, tab, "+1" or "-1". A missing file yields an
/// all-neutral lexicon with a warning on stderr.
SentimentLexicon load_lexicon(const std::string& path);
void write_lexicon(const SentimentLexicon& lex, const std::string& path);

}  // namespace qmf
