#include "qwpde/config_io.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace qwpde::io {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
  throw ConfigError(origin + ": " + msg);
}

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

void reject_unknown_keys(const std::string& origin, const json& obj,
                         const std::string& where, const std::set<std::string>& known) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) {
      fail(origin, where + ": unknown key \"" + key + "\"");
    }
  }
}

template <typename T>
T get_or(const std::string& origin, const json& obj, const std::string& where,
         const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(origin, where + "." + key + ": wrong type");
  }
}

std::vector<int> resolution_set(const std::string& origin, const json& obj,
                                const std::string& where, const std::string& dim,
                                const std::vector<int>& fallback) {
  const std::string range_key = dim + "_resolution_range";
  const std::string list_key = dim + "_resolutions";
  if (obj.contains(range_key) && obj.contains(list_key)) {
    fail(origin, where + ": give either " + range_key + " or " + list_key + ", not both");
  }
  if (obj.contains(range_key)) {
    const auto range = get_or<std::vector<int>>(origin, obj, where, range_key, {});
    if (range.size() != 2 || range[0] > range[1]) {
      fail(origin, where + "." + range_key + ": expected [lo, hi] with lo <= hi");
    }
    std::vector<int> out;
    for (int j = range[0]; j <= range[1]; ++j) out.push_back(j);
    return out;
  }
  if (obj.contains(list_key)) {
    return get_or<std::vector<int>>(origin, obj, where, list_key, {});
  }
  return fallback;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    fail(origin, "line " + std::to_string(line) + ", column " + std::to_string(col) +
                     ": " + e.what());
  }
  if (!root.is_object()) fail(origin, "top level must be a JSON object");
  reject_unknown_keys(origin, root, "config",
                      {"name", "problem", "architecture", "wavelet", "points",
                       "training", "validation", "logging", "seeds"});

  RunConfig rc;
  train::TrainConfig& tc = rc.train;
  rc.name = get_or<std::string>(origin, root, "config", "name", "");

  if (root.contains("problem")) {
    const json& p = root.at("problem");
    if (!p.is_object()) fail(origin, "problem must be an object");
    reject_unknown_keys(origin, p, "problem",
                        {"name", "epsilon", "kappa", "b1", "b2", "a", "alpha", "beta",
                         "gamma", "power", "heterogeneous", "mode_n", "cavity_length"});
    auto& pp = tc.problem;
    pp.name = get_or<std::string>(origin, p, "problem", "name", pp.name);
    pp.epsilon = get_or<double>(origin, p, "problem", "epsilon", pp.epsilon);
    pp.kappa = get_or<double>(origin, p, "problem", "kappa", pp.kappa);
    pp.b1 = get_or<double>(origin, p, "problem", "b1", pp.b1);
    pp.b2 = get_or<double>(origin, p, "problem", "b2", pp.b2);
    pp.a = get_or<double>(origin, p, "problem", "a", pp.a);
    pp.alpha = get_or<double>(origin, p, "problem", "alpha", pp.alpha);
    pp.beta = get_or<double>(origin, p, "problem", "beta", pp.beta);
    pp.gamma = get_or<double>(origin, p, "problem", "gamma", pp.gamma);
    pp.power = get_or<int>(origin, p, "problem", "power", pp.power);
    pp.heterogeneous = get_or<bool>(origin, p, "problem", "heterogeneous", pp.heterogeneous);
    pp.mode_n = get_or<double>(origin, p, "problem", "mode_n", pp.mode_n);
    pp.cavity_length =
        get_or<double>(origin, p, "problem", "cavity_length", pp.cavity_length);
  }

  if (root.contains("architecture")) {
    const json& a = root.at("architecture");
    reject_unknown_keys(origin, a, "architecture",
                        {"qnn1_qubits", "qnn1_layers", "qnn2_qubits", "qnn2_layers",
                         "use_qnn1"});
    tc.qnn1_qubits = get_or<int>(origin, a, "architecture", "qnn1_qubits", tc.qnn1_qubits);
    tc.qnn1_layers = get_or<int>(origin, a, "architecture", "qnn1_layers", tc.qnn1_layers);
    tc.qnn2_qubits = get_or<int>(origin, a, "architecture", "qnn2_qubits", tc.qnn2_qubits);
    tc.qnn2_layers = get_or<int>(origin, a, "architecture", "qnn2_layers", tc.qnn2_layers);
    tc.use_qnn1 = get_or<bool>(origin, a, "architecture", "use_qnn1", tc.use_qnn1);
  }

  if (!root.contains("wavelet")) fail(origin, "wavelet section is required");
  {
    const json& w = root.at("wavelet");
    reject_unknown_keys(origin, w, "wavelet",
                        {"x_resolution_range", "x_resolutions", "t_resolution_range",
                         "t_resolutions", "truncation"});
    tc.x_resolutions = resolution_set(origin, w, "wavelet", "x", {});
    tc.t_resolutions = resolution_set(origin, w, "wavelet", "t", tc.x_resolutions);
    if (tc.x_resolutions.empty()) {
      fail(origin, "wavelet: x_resolution_range or x_resolutions is required");
    }
    tc.basis_truncation = get_or<double>(origin, w, "wavelet", "truncation", 0.0);
  }

  if (root.contains("points")) {
    const json& p = root.at("points");
    reject_unknown_keys(origin, p, "points",
                        {"collocation", "boundary", "initial", "interface", "strategy"});
    tc.n_collocation = get_or<Eigen::Index>(origin, p, "points", "collocation",
                                            tc.n_collocation);
    tc.n_boundary = get_or<Eigen::Index>(origin, p, "points", "boundary", tc.n_boundary);
    tc.n_initial = get_or<Eigen::Index>(origin, p, "points", "initial", tc.n_initial);
    tc.n_interface =
        get_or<Eigen::Index>(origin, p, "points", "interface", tc.n_interface);
    const std::string strat =
        get_or<std::string>(origin, p, "points", "strategy", "uniform");
    if (strat == "uniform") {
      tc.strategy = train::SamplingStrategy::Uniform;
    } else if (strat == "grid") {
      tc.strategy = train::SamplingStrategy::Grid;
    } else {
      fail(origin, "points.strategy: expected \"uniform\" or \"grid\"");
    }
  }

  if (root.contains("training")) {
    const json& t = root.at("training");
    reject_unknown_keys(origin, t, "training",
                        {"epochs", "learning_rate", "lr_milestones", "lr_decay",
                         "min_learning_rate", "coefficient_mode", "hetero_update",
                         "loss_weights"});
    tc.epochs = get_or<long long>(origin, t, "training", "epochs", tc.epochs);
    tc.lr.initial = get_or<double>(origin, t, "training", "learning_rate", tc.lr.initial);
    tc.lr.milestones = get_or<std::vector<long long>>(origin, t, "training",
                                                      "lr_milestones", tc.lr.milestones);
    tc.lr.decay = get_or<double>(origin, t, "training", "lr_decay", tc.lr.decay);
    tc.lr.min_lr =
        get_or<double>(origin, t, "training", "min_learning_rate", tc.lr.min_lr);
    const std::string mode =
        get_or<std::string>(origin, t, "training", "coefficient_mode", "global");
    if (mode == "global") {
      tc.mode = train::CoefficientMode::Global;
    } else if (mode == "per_point") {
      tc.mode = train::CoefficientMode::PerPoint;
    } else {
      fail(origin, "training.coefficient_mode: expected \"global\" or \"per_point\"");
    }
    const std::string hu =
        get_or<std::string>(origin, t, "training", "hetero_update", "joint");
    if (hu == "joint") {
      tc.hetero_update = train::HeteroUpdate::Joint;
    } else if (hu == "alternating") {
      tc.hetero_update = train::HeteroUpdate::Alternating;
    } else {
      fail(origin, "training.hetero_update: expected \"joint\" or \"alternating\"");
    }
    if (t.contains("loss_weights")) {
      const json& lw = t.at("loss_weights");
      reject_unknown_keys(origin, lw, "training.loss_weights",
                          {"pde", "ic", "bc", "interface"});
      tc.weights.pde = get_or<double>(origin, lw, "loss_weights", "pde", 1.0);
      tc.weights.ic = get_or<double>(origin, lw, "loss_weights", "ic", 1.0);
      tc.weights.bc = get_or<double>(origin, lw, "loss_weights", "bc", 1.0);
      tc.weights.interface_ = get_or<double>(origin, lw, "loss_weights", "interface", 1.0);
    }
  }

  if (root.contains("validation")) {
    const json& v = root.at("validation");
    reject_unknown_keys(origin, v, "validation", {"grid", "stride"});
    if (v.contains("grid")) {
      const auto grid = get_or<std::vector<int>>(origin, v, "validation", "grid", {});
      if (grid.size() != 2) fail(origin, "validation.grid: expected [g0, g1]");
      tc.validation_grid0 = grid[0];
      tc.validation_grid1 = grid[1];
    }
    tc.validation_stride =
        get_or<long long>(origin, v, "validation", "stride", tc.validation_stride);
  }

  if (root.contains("logging")) {
    const json& l = root.at("logging");
    reject_unknown_keys(origin, l, "logging", {"history_stride"});
    tc.history_stride =
        get_or<long long>(origin, l, "logging", "history_stride", tc.history_stride);
  }

  if (root.contains("seeds")) {
    tc.seeds = get_or<std::vector<std::uint64_t>>(origin, root, "config", "seeds",
                                                  tc.seeds);
  }

  try {
    tc.validate();
    train::make_problem(tc.problem);
  } catch (const std::invalid_argument& e) {
    fail(origin, e.what());
  }
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

nlohmann::json config_to_json(const RunConfig& rc) {
  const train::TrainConfig& tc = rc.train;
  json j;
  j["name"] = rc.name;
  j["problem"] = {{"name", tc.problem.name},
                  {"epsilon", tc.problem.epsilon},
                  {"kappa", tc.problem.kappa},
                  {"b1", tc.problem.b1},
                  {"b2", tc.problem.b2},
                  {"a", tc.problem.a},
                  {"alpha", tc.problem.alpha},
                  {"beta", tc.problem.beta},
                  {"gamma", tc.problem.gamma},
                  {"power", tc.problem.power},
                  {"heterogeneous", tc.problem.heterogeneous},
                  {"mode_n", tc.problem.mode_n},
                  {"cavity_length", tc.problem.cavity_length}};
  j["architecture"] = {{"qnn1_qubits", tc.qnn1_qubits},
                       {"qnn1_layers", tc.qnn1_layers},
                       {"qnn2_qubits", tc.qnn2_qubits},
                       {"qnn2_layers", tc.qnn2_layers},
                       {"use_qnn1", tc.use_qnn1}};
  j["wavelet"] = {{"x_resolutions", tc.x_resolutions},
                  {"t_resolutions", tc.t_resolutions},
                  {"truncation", tc.basis_truncation}};
  j["points"] = {{"collocation", tc.n_collocation},
                 {"boundary", tc.n_boundary},
                 {"initial", tc.n_initial},
                 {"interface", tc.n_interface},
                 {"strategy",
                  tc.strategy == train::SamplingStrategy::Uniform ? "uniform" : "grid"}};
  j["training"] = {
      {"epochs", tc.epochs},
      {"learning_rate", tc.lr.initial},
      {"lr_milestones", tc.lr.milestones},
      {"lr_decay", tc.lr.decay},
      {"min_learning_rate", tc.lr.min_lr},
      {"coefficient_mode",
       tc.mode == train::CoefficientMode::Global ? "global" : "per_point"},
      {"hetero_update",
       tc.hetero_update == train::HeteroUpdate::Joint ? "joint" : "alternating"},
      {"loss_weights",
       {{"pde", tc.weights.pde},
        {"ic", tc.weights.ic},
        {"bc", tc.weights.bc},
        {"interface", tc.weights.interface_}}}};
  j["validation"] = {{"grid", {tc.validation_grid0, tc.validation_grid1}},
                     {"stride", tc.validation_stride}};
  j["logging"] = {{"history_stride", tc.history_stride}};
  j["seeds"] = tc.seeds;
  return j;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

void atomic_write(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

void save_checkpoint(const std::string& path, const train::Trainer& trainer,
                     std::uint64_t seed) {
  json j;
  j["format_version"] = 1;
  j["kind"] = "checkpoint";
  j["seed"] = seed;
  json models = json::array();
  for (int m = 0; m < trainer.model_count(); ++m) {
    const model::Architecture& a = trainer.architecture(m);
    models.push_back({{"qnn1_qubits", a.qnn1_qubits},
                      {"qnn1_layers", a.qnn1_layers},
                      {"qnn2_qubits", a.qnn2_qubits},
                      {"qnn2_layers", a.qnn2_layers},
                      {"use_qnn1", a.use_qnn1},
                      {"n_fields", a.n_fields},
                      {"n_coefficients", a.n_coefficients},
                      {"x_resolutions", trainer.config().x_resolutions},
                      {"t_resolutions", trainer.config().t_resolutions}});
  }
  j["models"] = std::move(models);
  std::vector<double> params(trainer.params().data(),
                             trainer.params().data() + trainer.params().size());
  j["parameters"] = std::move(params);
  atomic_write(path, j.dump());
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open checkpoint");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  Checkpoint ck;
  try {
    if (j.at("kind").get<std::string>() != "checkpoint") {
      throw ConfigError(path + ": not a checkpoint file");
    }
    ck.seed = j.at("seed").get<std::uint64_t>();
    for (const json& m : j.at("models")) {
      CheckpointModel cm;
      cm.architecture.qnn1_qubits = m.at("qnn1_qubits").get<int>();
      cm.architecture.qnn1_layers = m.at("qnn1_layers").get<int>();
      cm.architecture.qnn2_qubits = m.at("qnn2_qubits").get<int>();
      cm.architecture.qnn2_layers = m.at("qnn2_layers").get<int>();
      cm.architecture.use_qnn1 = m.at("use_qnn1").get<bool>();
      cm.architecture.n_fields = m.at("n_fields").get<int>();
      cm.architecture.n_coefficients = m.at("n_coefficients").get<Eigen::Index>();
      cm.x_resolutions = m.at("x_resolutions").get<std::vector<int>>();
      cm.t_resolutions = m.at("t_resolutions").get<std::vector<int>>();
      ck.models.push_back(std::move(cm));
    }
    const auto params = j.at("parameters").get<std::vector<double>>();
    ck.parameters =
        Eigen::Map<const Eigen::VectorXd>(params.data(), Eigen::Index(params.size()));
  } catch (const json::exception& e) {
    throw ConfigError(path + ": malformed checkpoint: " + e.what());
  }
  return ck;
}

void apply_checkpoint(const Checkpoint& checkpoint, train::Trainer& trainer) {
  if (static_cast<int>(checkpoint.models.size()) != trainer.model_count()) {
    throw ConfigError("checkpoint/config mismatch: model count differs");
  }
  for (int m = 0; m < trainer.model_count(); ++m) {
    const model::Architecture& want = trainer.architecture(m);
    const model::Architecture& have = checkpoint.models[m].architecture;
    const bool same = want.qnn1_qubits == have.qnn1_qubits &&
                      want.qnn1_layers == have.qnn1_layers &&
                      want.qnn2_qubits == have.qnn2_qubits &&
                      want.qnn2_layers == have.qnn2_layers &&
                      want.use_qnn1 == have.use_qnn1 &&
                      want.n_fields == have.n_fields &&
                      want.n_coefficients == have.n_coefficients;
    if (!same) {
      throw ConfigError("checkpoint/config mismatch: architecture of model " +
                        std::to_string(m) + " differs");
    }
    if (checkpoint.models[m].x_resolutions != trainer.config().x_resolutions ||
        checkpoint.models[m].t_resolutions != trainer.config().t_resolutions) {
      throw ConfigError("checkpoint/config mismatch: wavelet resolutions differ");
    }
  }
  if (checkpoint.parameters.size() != trainer.total_parameters()) {
    throw ConfigError("checkpoint/config mismatch: parameter count differs");
  }
  trainer.set_params(checkpoint.parameters);
}

}  // namespace qwpde::io
