#include "qmf/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace qmf {

using nlohmann::json;

int MultimodalSentence::real_words() const {
  int n = 0;
  for (bool m : mask) n += m ? 1 : 0;
  return n;
}

std::map<std::string, std::string> parse_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), '=', ' ');
    std::istringstream ss(line);
    std::string key, value;
    if (ss >> key >> value) kv[key] = value;
  }
  return kv;
}

DataSchema schema_from_kv(const std::map<std::string, std::string>& kv) {
  DataSchema s;
  auto get = [&](const char* k, int& out) {
    auto it = kv.find(k);
    if (it != kv.end()) out = std::stoi(it->second);
  };
  get("L", s.L);
  get("visual_dim", s.visual_dim);
  get("acoustic_dim", s.acoustic_dim);
  get("embedding_dim", s.embedding_dim);
  return s;
}

void write_schema(const DataSchema& schema, const std::string& path) {
  std::ofstream out(path);
  out << "L " << schema.L << "\nvisual_dim " << schema.visual_dim
      << "\nacoustic_dim " << schema.acoustic_dim << "\nembedding_dim "
      << schema.embedding_dim << "\n";
}

namespace {

MultimodalSentence parse_record(const json& j, const DataSchema& schema,
                                Vocabulary& vocab, int line_no) {
  auto fail = [&](const std::string& msg) -> void {
    throw std::runtime_error("dataset line " + std::to_string(line_no) + ": " +
                             msg);
  };
  if (!j.contains("words") || !j.contains("visual") || !j.contains("acoustic") ||
      !j.contains("label") || !j.contains("split"))
    fail("missing field");
  const auto& words = j.at("words");
  const auto& vis = j.at("visual");
  const auto& aco = j.at("acoustic");
  const int n = static_cast<int>(words.size());
  if (n == 0) fail("empty sentence");
  if (static_cast<int>(vis.size()) != n || static_cast<int>(aco.size()) != n)
    fail("feature row count does not match word count");

  MultimodalSentence s;
  const int L = schema.L;
  s.words.assign(L, Vocabulary::kPadId);
  s.visual = Eigen::MatrixXd::Zero(L, schema.visual_dim);
  s.acoustic = Eigen::MatrixXd::Zero(L, schema.acoustic_dim);
  s.mask.assign(L, false);
  s.label = j.at("label").get<double>();

  const int keep = std::min(n, L);  // truncation keeps the sentence head
  for (int i = 0; i < keep; ++i) {
    s.words[i] = vocab.add(words[i].get<std::string>());
    const auto& vrow = vis[i];
    const auto& arow = aco[i];
    if (static_cast<int>(vrow.size()) != schema.visual_dim)
      fail("visual feature width mismatch");
    if (static_cast<int>(arow.size()) != schema.acoustic_dim)
      fail("acoustic feature width mismatch");
    for (int c = 0; c < schema.visual_dim; ++c)
      s.visual(i, c) = vrow[c].get<double>();
    for (int c = 0; c < schema.acoustic_dim; ++c)
      s.acoustic(i, c) = arow[c].get<double>();
    s.mask[i] = true;
  }
  return s;
}

}  // namespace

LoadedDataset load_dataset(const std::string& path, const DataSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  LoadedDataset out;
  out.schema = schema;
  std::string line;
  int line_no = 0, records = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": malformed JSON (" + e.what() + ")");
    }
    MultimodalSentence s = parse_record(j, schema, out.vocab, line_no);
    const std::string split = j.at("split").get<std::string>();
    if (split == "train")
      out.splits.train.push_back(std::move(s));
    else if (split == "valid")
      out.splits.valid.push_back(std::move(s));
    else if (split == "test")
      out.splits.test.push_back(std::move(s));
    else
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": unknown split '" + split + "'");
    ++records;
  }
  if (records == 0) throw std::runtime_error("dataset is empty: " + path);
  return out;
}

namespace {

void write_split(std::ofstream& out, const std::vector<MultimodalSentence>& ss,
                 const char* split, const Vocabulary& vocab) {
  for (const auto& s : ss) {
    json j;
    j["split"] = split;
    json words = json::array(), vis = json::array(), aco = json::array();
    for (int i = 0; i < s.length(); ++i) {
      if (!s.mask[i]) continue;
      words.push_back(vocab.words[s.words[i]]);
      json vrow = json::array(), arow = json::array();
      for (int c = 0; c < s.visual.cols(); ++c) vrow.push_back(s.visual(i, c));
      for (int c = 0; c < s.acoustic.cols(); ++c)
        arow.push_back(s.acoustic(i, c));
      vis.push_back(std::move(vrow));
      aco.push_back(std::move(arow));
    }
    j["words"] = std::move(words);
    j["visual"] = std::move(vis);
    j["acoustic"] = std::move(aco);
    j["label"] = s.label;
    out << j.dump() << "\n";
  }
}

}  // namespace

void write_dataset(const DatasetSplits& splits, const Vocabulary& vocab,
                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset: " + path);
  write_split(out, splits.train, "train", vocab);
  write_split(out, splits.valid, "valid", vocab);
  write_split(out, splits.test, "test", vocab);
}

SyntheticData generate_synthetic(int n, unsigned seed,
                                 const SyntheticConfig& cfg) {
  SyntheticData out;
  out.schema = DataSchema{cfg.L, cfg.visual_dim, cfg.acoustic_dim,
                          cfg.embedding_dim};

  // Content words with planted sentiment values spread over [-1, 1].
  std::vector<double> word_sent(cfg.vocab_words);
  for (int w = 0; w < cfg.vocab_words; ++w) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "w%03d", w);
    out.vocab.add(buf);
    word_sent[w] = -1.0 + 2.0 * w / (cfg.vocab_words - 1);
    if (word_sent[w] > 0.33)
      out.lexicon.polarity[buf] = 1;
    else if (word_sent[w] < -0.33)
      out.lexicon.polarity[buf] = -1;
  }

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> len_dist(std::min(4, cfg.L), cfg.L);

  for (int i = 0; i < n; ++i) {
    const double zt = uni(rng), zv = uni(rng), za = uni(rng);
    out.latents.push_back({zt, zv, za});

    MultimodalSentence s;
    const int len = len_dist(rng);
    s.words.assign(cfg.L, Vocabulary::kPadId);
    s.visual = Eigen::MatrixXd::Zero(cfg.L, cfg.visual_dim);
    s.acoustic = Eigen::MatrixXd::Zero(cfg.L, cfg.acoustic_dim);
    s.mask.assign(cfg.L, false);

    for (int p = 0; p < len; ++p) {
      // Word whose planted sentiment is nearest to a noisy copy of z_t.
      const double target =
          std::clamp(zt + 0.35 * gauss(rng), -1.0, 1.0);
      int best = 0;
      for (int w = 1; w < cfg.vocab_words; ++w)
        if (std::abs(word_sent[w] - target) < std::abs(word_sent[best] - target))
          best = w;
      s.words[p] = best + 1;  // vocab ids start after PAD
      s.mask[p] = true;

      for (int c = 0; c < cfg.visual_dim; ++c)
        s.visual(p, c) = c < 2 ? zv + 0.25 * gauss(rng) : 0.3 * gauss(rng);
      for (int c = 0; c < cfg.acoustic_dim; ++c)
        s.acoustic(p, c) = c < 2 ? za + 0.25 * gauss(rng) : 0.3 * gauss(rng);
    }

    s.label = std::clamp(2.4 * zt + 0.5 * zv + 0.3 * za + 0.1 * gauss(rng),
                         -3.0, 3.0);

    const int cut_train = static_cast<int>(0.70 * n);
    const int cut_valid = static_cast<int>(0.85 * n);
    if (i < cut_train)
      out.splits.train.push_back(std::move(s));
    else if (i < cut_valid)
      out.splits.valid.push_back(std::move(s));
    else
      out.splits.test.push_back(std::move(s));
  }
  return out;
}

Eigen::MatrixXd load_embeddings(const std::string& path, const Vocabulary& vocab,
                                int e_dim, unsigned seed) {
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(vocab.size(), e_dim);
  std::vector<bool> found(vocab.size(), false);
  found[Vocabulary::kPadId] = true;  // PAD stays zero

  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open embeddings: " + path);
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream ss(line);
      std::string token;
      if (!(ss >> token)) continue;
      const int id = vocab.lookup(token);
      if (id == Vocabulary::kPadId) continue;
      std::vector<double> vals;
      double x;
      while (ss >> x) vals.push_back(x);
      if (static_cast<int>(vals.size()) != e_dim)
        throw std::runtime_error("embedding dimension mismatch for '" + token +
                                 "': got " + std::to_string(vals.size()) +
                                 ", expected " + std::to_string(e_dim));
      for (int c = 0; c < e_dim; ++c) table(id, c) = vals[c];
      found[id] = true;
    }
  }

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-0.05, 0.05);
  for (int w = 0; w < vocab.size(); ++w)
    if (!found[w])
      for (int c = 0; c < e_dim; ++c) table(w, c) = uni(rng);
  return table;
}

SentimentLexicon load_lexicon(const std::string& path) {
  SentimentLexicon lex;
  if (path.empty()) return lex;
  std::ifstream in(path);
  if (!in) {
    std::cerr << "warning: lexicon file not found (" << path
              << "); using all-neutral lexicon\n";
    return lex;
  }
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string token, pol;
    if (ss >> token >> pol) lex.polarity[token] = pol == "-1" ? -1 : 1;
  }
  return lex;
}

void write_lexicon(const SentimentLexicon& lex, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write lexicon: " + path);
  std::vector<std::pair<std::string, int>> rows(lex.polarity.begin(),
                                                lex.polarity.end());
  std::sort(rows.begin(), rows.end());
  for (const auto& [w, p] : rows)
    out << w << "\t" << (p > 0 ? "+1" : "-1") << "\n";
}

}  // namespace qmf
