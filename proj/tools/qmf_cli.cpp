// Command-line entry point: training, evaluation, grid search,
// interpretation, synthetic data generation and self-verification.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "qmf/interpret.hpp"
#include "qmf/selfcheck.hpp"
#include "qmf/serialize.hpp"
#include "qmf/trainer.hpp"

namespace {

using nlohmann::json;

constexpr int kOk = 0;
constexpr int kUsageError = 1;
constexpr int kDataError = 2;
constexpr int kNumericalError = 3;

/// Data-shaped failure (missing/malformed files) vs numerical failure.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::set<int> parse_windows(const std::string& csv) {
  std::set<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    size_t pos = 0;
    const int v = std::stoi(item, &pos);
    if (pos != item.size() || v < 1)
      throw CLI::ValidationError("--window-lengths",
                                 "expected comma-separated positive integers");
    out.insert(v);
  }
  if (out.empty())
    throw CLI::ValidationError("--window-lengths", "needs at least one length");
  return out;
}

struct CommonArgs {
  std::string data_path;
  std::string schema_path;     // defaults to <data>.schema when present
  std::string embeddings_path;
  std::string lexicon_path;
  std::string config_path;
  std::string windows_csv;
  std::string variant_name;
  qmf::RunConfig rc;
};

/// Registers the RunConfig flags (1:1 with the config-file keys) on a
/// subcommand and remembers the option handles for override tracking.
void add_run_flags(CLI::App* sub, CommonArgs& a) {
  sub->add_option("--config", a.config_path,
                  "Flat key-value config file; flags override its values");
  sub->add_option("--tdim", a.rc.t_dim, "Textual state dimension")->capture_default_str();
  sub->add_option("--vdim", a.rc.v_dim, "Visual state dimension")->capture_default_str();
  sub->add_option("--adim", a.rc.a_dim, "Acoustic state dimension")->capture_default_str();
  sub->add_option("--window-lengths", a.windows_csv,
                  "Comma-separated context window lengths (default 1,2)");
  sub->add_option("--k", a.rc.K, "Number of observable eigenstates")->capture_default_str();
  sub->add_option("--hidden", a.rc.hidden, "Output-net hidden width")->capture_default_str();
  sub->add_option("--batch", a.rc.batch, "Mini-batch size")->capture_default_str();
  sub->add_option("--lr", a.rc.lr, "RMSprop learning rate")->capture_default_str();
  sub->add_option("--epochs", a.rc.epochs, "Training epochs")->capture_default_str();
  sub->add_option("--seed", a.rc.seed, "Seed determining all randomness")->capture_default_str();
  sub->add_option("--clip-norm", a.rc.clip_norm,
                  "Global gradient-norm clip (0 disables)")->capture_default_str();
  sub->add_option("--variant", a.variant_name,
                  "Model variant: qmf | real | rand-init | global-mixture | average-pool")
      ->capture_default_str();
}

void add_data_flags(CLI::App* sub, CommonArgs& a, bool required = true) {
  auto* opt = sub->add_option("--data", a.data_path, "Dataset (JSON lines)");
  if (required) opt->required();
  sub->add_option("--schema", a.schema_path,
                  "Sidecar schema file (default: <data>.schema if present)");
  sub->add_option("--embeddings", a.embeddings_path,
                  "Word-embedding text file (absent words get random rows)");
  sub->add_option("--lexicon", a.lexicon_path,
                  "Sentiment lexicon (token<TAB>+1/-1 per line)");
}

/// Config-file values apply only where the user passed no flag.
void apply_config_file(CLI::App* sub, CommonArgs& a) {
  if (a.config_path.empty()) return;
  const auto kv = qmf::parse_kv_file(a.config_path);
  auto get = [&](const char* key, auto& field, const char* flag) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    if (sub->count(flag) > 0) return;  // flag wins
    std::stringstream ss(it->second);
    ss >> field;
    if (ss.fail())
      throw DataError(std::string("config key '") + key + "': bad value '" +
                      it->second + "'");
  };
  get("tdim", a.rc.t_dim, "--tdim");
  get("vdim", a.rc.v_dim, "--vdim");
  get("adim", a.rc.a_dim, "--adim");
  get("k", a.rc.K, "--k");
  get("hidden", a.rc.hidden, "--hidden");
  get("batch", a.rc.batch, "--batch");
  get("lr", a.rc.lr, "--lr");
  get("epochs", a.rc.epochs, "--epochs");
  get("seed", a.rc.seed, "--seed");
  get("clip_norm", a.rc.clip_norm, "--clip-norm");
  if (kv.count("window_lengths") && sub->count("--window-lengths") == 0)
    a.windows_csv = kv.at("window_lengths");
  if (kv.count("variant") && sub->count("--variant") == 0)
    a.variant_name = kv.at("variant");
}

void finish_run_config(CLI::App* sub, CommonArgs& a) {
  apply_config_file(sub, a);
  if (!a.windows_csv.empty()) a.rc.window_lengths = parse_windows(a.windows_csv);
  if (!a.variant_name.empty())
    a.rc.variant = qmf::variant_from_string(a.variant_name);
  for (const auto& w : qmf::grid_warnings(a.rc))
    std::cerr << "warning: " << w << "\n";
}

bool file_exists(const std::string& path) {
  std::ifstream f(path);
  return f.good();
}

qmf::DataSchema resolve_schema(const CommonArgs& a) {
  std::string path = a.schema_path;
  if (path.empty() && file_exists(a.data_path + ".schema"))
    path = a.data_path + ".schema";
  if (path.empty()) return {};
  if (!file_exists(path)) throw DataError("schema file not found: " + path);
  return qmf::schema_from_kv(qmf::parse_kv_file(path));
}

struct Loaded {
  qmf::LoadedDataset dataset;
  qmf::TrainInputs inputs;
};

Loaded load_all(const CommonArgs& a) {
  Loaded out;
  try {
    const qmf::DataSchema schema = resolve_schema(a);
    out.dataset = qmf::load_dataset(a.data_path, schema);
    out.inputs.data = &out.dataset.splits;
    out.inputs.vocab = out.dataset.vocab;
    out.inputs.schema = out.dataset.schema;
    out.inputs.lexicon = qmf::load_lexicon(a.lexicon_path);
    out.inputs.embeddings = qmf::load_embeddings(
        a.embeddings_path, out.inputs.vocab, out.dataset.schema.embedding_dim,
        /*seed=*/12345);
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
  return out;
}

json metrics_json(const qmf::Metrics& m) {
  json j{{"acc7", m.acc7}, {"acc2", m.acc2}, {"f1", m.f1},
         {"mae", m.mae},   {"corr", m.corr}};
  if (!m.corr_defined) j["corr_defined"] = false;
  return j;
}

json config_json(const qmf::RunConfig& rc) {
  return json{{"tdim", rc.t_dim},
              {"vdim", rc.v_dim},
              {"adim", rc.a_dim},
              {"window_lengths", std::vector<int>(rc.window_lengths.begin(),
                                                  rc.window_lengths.end())},
              {"k", rc.K},
              {"hidden", rc.hidden},
              {"batch", rc.batch},
              {"lr", rc.lr},
              {"epochs", rc.epochs},
              {"seed", rc.seed},
              {"variant", qmf::to_string(rc.variant)}};
}

qmf::PretrainedArgs load_pretrained(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("pretrained-args file not found: " + path);
  json j;
  f >> j;
  qmf::PretrainedArgs pre;
  if (j.contains("theta_v")) pre.theta_v = j["theta_v"].get<std::vector<double>>();
  if (j.contains("theta_a")) pre.theta_a = j["theta_a"].get<std::vector<double>>();
  return pre;
}

const std::vector<std::pair<std::string, qmf::ModalitySubset>> kSubsets = {
    {"t", {qmf::Modality::textual}},
    {"v", {qmf::Modality::visual}},
    {"a", {qmf::Modality::acoustic}},
    {"tv", {qmf::Modality::textual, qmf::Modality::visual}},
    {"ta", {qmf::Modality::textual, qmf::Modality::acoustic}},
    {"va", {qmf::Modality::visual, qmf::Modality::acoustic}},
    {"tva", {qmf::Modality::textual, qmf::Modality::visual,
             qmf::Modality::acoustic}},
};

int cmd_train(CLI::App* sub, CommonArgs& a, const std::string& out_path,
              const std::string& log_path, bool do_pretrain,
              const std::string& pretrained_path) {
  finish_run_config(sub, a);
  Loaded loaded = load_all(a);

  qmf::PretrainedArgs pre;
  if (!pretrained_path.empty()) pre = load_pretrained(pretrained_path);

  qmf::TrainResult result = [&] {
    if (a.rc.variant != qmf::Variant::qmf)
      return qmf::run_variant(a.rc.variant, loaded.inputs, a.rc).run;
    if (do_pretrain) {
      pre.theta_v = qmf::pretrain_nontextual(qmf::Modality::visual,
                                             loaded.inputs, a.rc);
      pre.theta_a = qmf::pretrain_nontextual(qmf::Modality::acoustic,
                                             loaded.inputs, a.rc);
    }
    return qmf::train(loaded.inputs, a.rc, pre);
  }();

  const qmf::Metrics test = qmf::evaluate(result.model, loaded.dataset.splits.test);
  if (!log_path.empty()) qmf::write_run_log(log_path, result, test, a.rc);
  if (!out_path.empty()) qmf::save_model(result.model, out_path);

  json report{{"best_epoch", result.best_epoch},
              {"best_val_loss", result.best_val_loss},
              {"test", metrics_json(test)},
              {"config", config_json(a.rc)}};
  std::cout << report.dump(2) << "\n";
  return kOk;
}

int cmd_eval(CommonArgs& a, const std::string& model_path,
             const std::string& split_name) {
  qmf::ModelParams model = [&] {
    try {
      return qmf::load_model(model_path);
    } catch (const std::exception& e) {
      throw DataError(e.what());
    }
  }();
  Loaded loaded = load_all(a);
  const auto& splits = loaded.dataset.splits;
  const std::vector<qmf::MultimodalSentence>* split = &splits.test;
  if (split_name == "train") split = &splits.train;
  else if (split_name == "valid") split = &splits.valid;
  else if (split_name != "test")
    throw CLI::ValidationError("--split", "expected train|valid|test");
  if (split->empty()) throw DataError("split '" + split_name + "' is empty");

  const qmf::Metrics m = qmf::evaluate(model, *split);
  std::cout << json{{"split", split_name}, {"metrics", metrics_json(m)}}.dump(2)
            << "\n";
  return kOk;
}

int cmd_pretrain(CLI::App* sub, CommonArgs& a, const std::string& out_path) {
  finish_run_config(sub, a);
  Loaded loaded = load_all(a);
  json j{{"theta_v", qmf::pretrain_nontextual(qmf::Modality::visual,
                                              loaded.inputs, a.rc)},
         {"theta_a", qmf::pretrain_nontextual(qmf::Modality::acoustic,
                                              loaded.inputs, a.rc)}};
  std::ofstream f(out_path);
  if (!f) throw DataError("cannot write " + out_path);
  f << j.dump(2) << "\n";
  std::cout << "wrote " << out_path << "\n";
  return kOk;
}

int cmd_gridsearch(CLI::App* sub, CommonArgs& a, int budget, int jobs,
                   const std::string& log_path) {
  finish_run_config(sub, a);
  Loaded loaded = load_all(a);
  qmf::GridSpec grid;
  const qmf::GridResult best =
      qmf::grid_search(loaded.inputs, grid, budget, a.rc, log_path, jobs);
  json report{{"best_config", config_json(best.best_config)},
              {"best_val_loss", best.best_val_loss},
              {"test", metrics_json(best.best_metrics)}};
  std::cout << report.dump(2) << "\n";
  return kOk;
}

int cmd_interpret(CommonArgs& a, const std::string& model_path,
                  const std::string& split_name, int fragment_index,
                  const std::string& out_path) {
  qmf::ModelParams model = [&] {
    try {
      return qmf::load_model(model_path);
    } catch (const std::exception& e) {
      throw DataError(e.what());
    }
  }();
  Loaded loaded = load_all(a);
  const auto& splits = loaded.dataset.splits;
  const std::vector<qmf::MultimodalSentence>* split = &splits.test;
  if (split_name == "train") split = &splits.train;
  else if (split_name == "valid") split = &splits.valid;
  if (split->empty()) throw DataError("split '" + split_name + "' is empty");

  json report;
  report["split"] = split_name;

  // Per-subset metrics over the split.
  for (const auto& [name, subset] : kSubsets) {
    Eigen::VectorXd preds(split->size()), labels(split->size());
    for (size_t i = 0; i < split->size(); ++i) {
      preds[static_cast<Eigen::Index>(i)] =
          qmf::predict_subset(model, (*split)[i], subset);
      labels[static_cast<Eigen::Index>(i)] = (*split)[i].label;
    }
    report["subsets"][name] = metrics_json(qmf::compute_metrics(preds, labels));
  }

  // Per-fragment scores for one sentence: every single word, then every
  // configured window.
  const qmf::MultimodalSentence& s =
      (*split)[static_cast<size_t>(fragment_index) % split->size()];
  const int n = s.real_words();
  json frags = json::array();
  for (int start = 0; start < n; ++start)
    for (int len : model.cfg.window_lengths)
      if (start + len <= n)
        frags.push_back(json{{"start", start},
                             {"length", len},
                             {"score", qmf::predict_fragment(model, s, start, len)}});
  report["fragments"] = {{"sentence_index", fragment_index % static_cast<int>(split->size())},
                         {"label", s.label},
                         {"scores", frags}};

  // Entanglement table of the learned eigenstates.
  json ent = json::array();
  for (const auto& row : qmf::entanglement_report(model))
    ent.push_back(json{{"aspect", row.aspect},
                       {"cut", row.cut},
                       {"reduced_purity", row.reduced_purity},
                       {"separable", row.separable}});
  report["entanglement"] = ent;

  if (out_path.empty()) {
    std::cout << report.dump(2) << "\n";
  } else {
    std::ofstream f(out_path);
    if (!f) throw DataError("cannot write " + out_path);
    f << report.dump(2) << "\n";
    std::cout << "wrote " << out_path << "\n";
  }
  return kOk;
}

int cmd_synth(int n, unsigned seed, const std::string& out_path,
              const qmf::SyntheticConfig& cfg) {
  qmf::SyntheticData data = qmf::generate_synthetic(n, seed, cfg);
  qmf::write_dataset(data.splits, data.vocab, out_path);
  qmf::write_schema(data.schema, out_path + ".schema");
  qmf::write_lexicon(data.lexicon, out_path + ".lexicon");
  std::cout << "wrote " << out_path << " (+.schema, +.lexicon), " << n
            << " sentences\n";
  return kOk;
}

int cmd_check(int trials, int instances) {
  std::vector<qmf::CheckResult> all;
  for (auto& r : qmf::check_quantum_algebra(trials)) all.push_back(std::move(r));
  for (auto& r : qmf::check_separability()) all.push_back(std::move(r));
  for (auto& r : qmf::check_gradients(instances)) all.push_back(std::move(r));

  bool ok = true;
  for (const auto& r : all) {
    std::printf("%-32s %s  %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL",
                r.detail.c_str());
    ok = ok && r.pass;
  }
  return ok ? kOk : kNumericalError;
}

int cmd_inspect(const std::string& model_path, int sentence_states_index,
                const std::string& data_path, CommonArgs& a) {
  qmf::ModelParams model = [&] {
    try {
      return qmf::load_model(model_path);
    } catch (const std::exception& e) {
      throw DataError(e.what());
    }
  }();

  json report;
  report["config"] = {{"L", model.cfg.L},
                      {"e_dim", model.cfg.e_dim},
                      {"v_in", model.cfg.v_in},
                      {"a_in", model.cfg.a_in},
                      {"tdim", model.cfg.t_dim},
                      {"vdim", model.cfg.v_dim},
                      {"adim", model.cfg.a_dim},
                      {"k", model.cfg.K},
                      {"hidden", model.cfg.hidden},
                      {"variant", qmf::to_string(model.cfg.variant)},
                      {"vocab_size", model.vocab.words.size()}};

  // Learned eigenstates as serialized kets, plus their reduced states per
  // modality.
  const qmf::Observable obs =
      qmf::observable_from_params(model.obs_moduli, model.obs_args);
  json eigen = json::array();
  const std::vector<int> dims = model.cfg.subsystem_dims();
  for (int k = 0; k < obs.aspects(); ++k) {
    json e{{"aspect", k + 1}, {"state", qmf::ket_to_json(obs.eigenstates[k])}};
    if (dims.size() == 3) {
      qmf::DensityMatrix rho = qmf::pure_density(obs.eigenstates[k]);
      rho.subsystem_dims = dims;
      e["reduced_t"] = qmf::density_to_json(
          qmf::partial_trace(rho, qmf::SubsystemCut{{0}}));
      e["reduced_v"] = qmf::density_to_json(
          qmf::partial_trace(rho, qmf::SubsystemCut{{1}}));
      e["reduced_a"] = qmf::density_to_json(
          qmf::partial_trace(rho, qmf::SubsystemCut{{2}}));
    }
    eigen.push_back(std::move(e));
  }
  report["eigenstates"] = eigen;

  // Optional: unimodal word states of one sentence.
  if (!data_path.empty()) {
    a.data_path = data_path;
    Loaded loaded = load_all(a);
    const auto& split = loaded.dataset.splits.test.empty()
                            ? loaded.dataset.splits.train
                            : loaded.dataset.splits.test;
    if (split.empty()) throw DataError("dataset has no sentences");
    const qmf::MultimodalSentence& s =
        split[static_cast<size_t>(sentence_states_index) % split.size()];
    qmf::SentenceStates st = qmf::extract_states(model, s);
    json words = json::array();
    for (size_t i = 0; i < st.positions.size(); ++i) {
      json w{{"position", st.positions[i]}};
      const char* names[3] = {"t", "v", "a"};
      for (int m = 0; m < 3; ++m)
        if (i < st.uni[m].size()) {
          w[names[m]] = qmf::ket_to_json(st.uni[m][i]);
          w[std::string(names[m]) + "_norm"] = st.norms[m][static_cast<int>(i)];
        }
      words.push_back(std::move(w));
    }
    report["sentence_states"] = {{"label", s.label},
                                 {"beta", {st.beta[0], st.beta[1], st.beta[2]}},
                                 {"words", words}};
  }

  std::cout << report.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-inspired multimodal fusion for sentiment analysis"};
  app.require_subcommand(1);

  // train
  CommonArgs train_args;
  std::string train_out, train_log = "run_log.jsonl", train_pretrained;
  bool train_do_pretrain = false;
  auto* train = app.add_subcommand("train", "Train a model and write a run log");
  add_data_flags(train, train_args);
  add_run_flags(train, train_args);
  train->add_option("--out", train_out, "Checkpoint output path");
  train->add_option("--log", train_log, "Run-log path (JSON lines)")
      ->capture_default_str();
  train->add_flag("--pretrain", train_do_pretrain,
                  "Pretrain visual/acoustic argument tables first");
  train->add_option("--pretrained", train_pretrained,
                    "JSON file from the pretrain subcommand");

  // eval
  CommonArgs eval_args;
  std::string eval_model, eval_split = "test";
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a split");
  add_data_flags(eval, eval_args);
  eval->add_option("--model", eval_model, "Checkpoint path")->required();
  eval->add_option("--split", eval_split, "train | valid | test")
      ->capture_default_str();

  // pretrain
  CommonArgs pre_args;
  std::string pre_out = "pretrained_args.json";
  auto* pretrain = app.add_subcommand(
      "pretrain", "Learn visual/acoustic argument tables unimodally");
  add_data_flags(pretrain, pre_args);
  add_run_flags(pretrain, pre_args);
  pretrain->add_option("--out", pre_out, "Output JSON path")->capture_default_str();

  // gridsearch
  CommonArgs grid_args;
  int grid_budget = 10, grid_jobs = 1;
  std::string grid_log;
  auto* gridsearch = app.add_subcommand(
      "gridsearch", "Random search over the hyperparameter grid");
  add_data_flags(gridsearch, grid_args);
  add_run_flags(gridsearch, grid_args);
  gridsearch->add_option("--budget", grid_budget, "Configurations to try")
      ->capture_default_str();
  gridsearch->add_option("--jobs", grid_jobs, "Parallel training jobs")
      ->capture_default_str();
  gridsearch->add_option("--log", grid_log, "Per-config JSON-lines log");

  // interpret
  CommonArgs int_args;
  std::string int_model, int_split = "test", int_out;
  int int_index = 0;
  auto* interpret = app.add_subcommand(
      "interpret", "Subset metrics, fragment scores and entanglement report");
  add_data_flags(interpret, int_args);
  interpret->add_option("--model", int_model, "Checkpoint path")->required();
  interpret->add_option("--split", int_split, "train | valid | test")
      ->capture_default_str();
  interpret->add_option("--index", int_index,
                        "Sentence index for fragment scores")
      ->capture_default_str();
  interpret->add_option("--out", int_out, "Report path (default: stdout)");

  // synth
  int synth_n = 500;
  unsigned synth_seed = 7;
  std::string synth_out = "synthetic.jsonl";
  qmf::SyntheticConfig synth_cfg;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--n", synth_n, "Number of sentences")->capture_default_str();
  synth->add_option("--seed", synth_seed, "Generator seed")->capture_default_str();
  synth->add_option("--out", synth_out, "Output path")->capture_default_str();
  synth->add_option("--length", synth_cfg.L, "Sentence length L")
      ->capture_default_str();
  synth->add_option("--visual-dim", synth_cfg.visual_dim, "Visual feature width")
      ->capture_default_str();
  synth->add_option("--acoustic-dim", synth_cfg.acoustic_dim,
                    "Acoustic feature width")
      ->capture_default_str();
  synth->add_option("--embedding-dim", synth_cfg.embedding_dim,
                    "Embedding width")
      ->capture_default_str();
  synth->add_option("--vocab", synth_cfg.vocab_words, "Vocabulary size")
      ->capture_default_str();

  // check
  int check_trials = 1000, check_instances = 20;
  auto* check = app.add_subcommand(
      "check", "Quantum-algebra property suite and gradient check");
  check->add_option("--trials", check_trials, "Randomized algebra trials")
      ->capture_default_str();
  check->add_option("--instances", check_instances, "Gradient-check models")
      ->capture_default_str();

  // inspect
  CommonArgs inspect_args;
  std::string inspect_model, inspect_data;
  int inspect_index = 0;
  auto* inspect = app.add_subcommand(
      "inspect", "Dump serialized observables (and optional sentence states)");
  inspect->add_option("--model", inspect_model, "Checkpoint path")->required();
  inspect->add_option("--data", inspect_data,
                      "Optional dataset for sentence-state extraction");
  inspect->add_option("--schema", inspect_args.schema_path, "Sidecar schema file");
  inspect->add_option("--index", inspect_index, "Sentence index")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*train)
      return cmd_train(train, train_args, train_out, train_log,
                       train_do_pretrain, train_pretrained);
    if (*eval) return cmd_eval(eval_args, eval_model, eval_split);
    if (*pretrain) return cmd_pretrain(pretrain, pre_args, pre_out);
    if (*gridsearch)
      return cmd_gridsearch(gridsearch, grid_args, grid_budget, grid_jobs,
                            grid_log);
    if (*interpret)
      return cmd_interpret(int_args, int_model, int_split, int_index, int_out);
    if (*synth) return cmd_synth(synth_n, synth_seed, synth_out, synth_cfg);
    if (*check) return cmd_check(check_trials, check_instances);
    if (*inspect)
      return cmd_inspect(inspect_model, inspect_index, inspect_data,
                         inspect_args);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  }
  return kUsageError;
}
