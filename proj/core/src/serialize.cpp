#include "qmf/serialize.hpp"

#include <fstream>

namespace qmf {

using nlohmann::json;

json ket_to_json(const Ket& k) {
  return json{{"moduli", std::vector<double>(k.moduli.begin(), k.moduli.end())},
              {"args", std::vector<double>(k.args.begin(), k.args.end())}};
}

Ket ket_from_json(const json& j) {
  const auto m = j.at("moduli").get<std::vector<double>>();
  const auto a = j.at("args").get<std::vector<double>>();
  Eigen::VectorXd mv = Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
  Eigen::VectorXd av = Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
  return Ket{mv, av};
}

json density_to_json(const DensityMatrix& rho) {
  const int d = rho.dim();
  std::vector<std::vector<double>> re(d, std::vector<double>(d));
  std::vector<std::vector<double>> im(d, std::vector<double>(d));
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      re[r][c] = rho.entries(r, c).real();
      im[r][c] = rho.entries(r, c).imag();
    }
  return json{{"dims", rho.subsystem_dims}, {"re", re}, {"im", im}};
}

DensityMatrix density_from_json(const json& j) {
  const auto re = j.at("re").get<std::vector<std::vector<double>>>();
  const auto im = j.at("im").get<std::vector<std::vector<double>>>();
  const int d = static_cast<int>(re.size());
  Eigen::MatrixXcd m(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) m(r, c) = {re[r][c], im[r][c]};
  return DensityMatrix{std::move(m), j.at("dims").get<std::vector<int>>()};
}

namespace {

json param_to_json(const ad::Parameter& p) {
  return json{{"rows", p.rows},
              {"cols", p.cols},
              {"value", p.value},
              {"constraint", static_cast<int>(p.constraint)},
              {"frozen_rows", p.frozen_rows}};
}

void param_from_json(const json& j, ad::Parameter& p) {
  if (j.at("rows").get<int>() != p.rows || j.at("cols").get<int>() != p.cols)
    throw std::runtime_error("model checkpoint: shape mismatch for " + p.name);
  p.value = j.at("value").get<std::vector<double>>();
  p.constraint =
      static_cast<ad::Parameter::Constraint>(j.at("constraint").get<int>());
  p.frozen_rows = j.at("frozen_rows").get<std::vector<int>>();
}

json config_to_json(const ModelConfig& c) {
  std::vector<int> active;
  for (Modality m : c.active) active.push_back(static_cast<int>(m));
  return json{{"L", c.L},         {"e_dim", c.e_dim},
              {"v_in", c.v_in},   {"a_in", c.a_in},
              {"t_dim", c.t_dim}, {"v_dim", c.v_dim},
              {"a_dim", c.a_dim}, {"window_lengths", c.window_lengths},
              {"K", c.K},         {"hidden", c.hidden},
              {"variant", to_string(c.variant)},
              {"active", active}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.L = j.at("L");
  c.e_dim = j.at("e_dim");
  c.v_in = j.at("v_in");
  c.a_in = j.at("a_in");
  c.t_dim = j.at("t_dim");
  c.v_dim = j.at("v_dim");
  c.a_dim = j.at("a_dim");
  const auto wl = j.at("window_lengths").get<std::vector<int>>();
  c.window_lengths = std::set<int>(wl.begin(), wl.end());
  c.K = j.at("K");
  c.hidden = j.at("hidden");
  c.variant = variant_from_string(j.at("variant"));
  c.active.clear();
  for (int m : j.at("active").get<std::vector<int>>())
    c.active.push_back(static_cast<Modality>(m));
  return c;
}

}  // namespace

void save_model(const ModelParams& model, const std::string& path) {
  json j;
  j["config"] = config_to_json(model.cfg);
  j["vocab"] = model.vocab.words;
  json params = json::object();
  for (ad::Parameter* p : const_cast<ModelParams&>(model).all_params())
    params[p->name] = param_to_json(*p);
  j["params"] = std::move(params);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model: " + path);
  out << j.dump();
}

ModelParams load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model: " + path);
  json j = json::parse(in);

  const ModelConfig cfg = config_from_json(j.at("config"));
  Vocabulary vocab;
  for (const auto& w : j.at("vocab").get<std::vector<std::string>>())
    vocab.add(w);
  Eigen::MatrixXd emb = Eigen::MatrixXd::Zero(vocab.size(), cfg.e_dim);
  ModelParams model = init_model(cfg, vocab, {}, emb, 0);
  for (ad::Parameter* p : model.all_params())
    param_from_json(j.at("params").at(p->name), *p);
  return model;
}

}  // namespace qmf
