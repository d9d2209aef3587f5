#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qwpde/config_io.hpp"
#include "qwpde/gradcheck.hpp"
#include "qwpde/report.hpp"
#include "qwpde/runner.hpp"

namespace {

using namespace qwpde;

std::string default_out_dir() {
  const char* env = std::getenv("QWPDE_OUT_DIR");
  return env != nullptr && *env != '\0' ? env : "runs";
}

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw io::ConfigError("--seeds: empty seed list");
  return seeds;
}

std::pair<int, int> parse_grid(const std::string& spec) {
  const auto x = spec.find('x');
  if (x == std::string::npos) {
    const int g = std::stoi(spec);
    return {g, g};
  }
  return {std::stoi(spec.substr(0, x)), std::stoi(spec.substr(x + 1))};
}

std::vector<double> parse_sections(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

void print_report_summary(const report::RunReport& rep) {
  std::printf("seeds: %zu (%d failed), trainable parameters: %lld\n", rep.seeds.size(),
              rep.n_failed, static_cast<long long>(rep.trainable_parameters));
  for (const train::SeedResult& s : rep.seeds) {
    if (s.failed) {
      std::printf("  seed %llu: FAILED after %lld epochs (%s)\n",
                  static_cast<unsigned long long>(s.seed), s.epochs_run,
                  s.failure.c_str());
      continue;
    }
    std::printf("  seed %llu: ", static_cast<unsigned long long>(s.seed));
    for (std::size_t f = 0; f < rep.field_names.size(); ++f) {
      std::printf("%s rel_l2 %.3e  ", rep.field_names[f].c_str(),
                  s.final_metrics.field_rel_l2[f]);
    }
    std::printf("(%.1fs)\n", s.wall_seconds);
  }
  for (std::size_t f = 0; f < rep.field_names.size(); ++f) {
    std::printf("aggregate %s: rel_l2 %.3e +- %.3e, rel_linf %.3e +- %.3e (n=%d)\n",
                rep.field_names[f].c_str(), rep.per_field[f].rel_l2.mean,
                rep.per_field[f].rel_l2.std, rep.per_field[f].rel_linf.mean,
                rep.per_field[f].rel_linf.std, rep.per_field[f].rel_l2.n);
  }
}

struct CommonOpts {
  std::string out_dir = default_out_dir();
  int threads = 1;
  std::string seeds_csv;
  long long stride = -1;
  std::string grid;
};

void attach_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--out-dir", o.out_dir, "output directory (env QWPDE_OUT_DIR)");
  cmd->add_option("--threads", o.threads, "seed-parallel worker count")
      ->check(CLI::Range(1, 256));
  cmd->add_option("--seeds", o.seeds_csv, "comma-separated seed list override");
  cmd->add_option("--stride", o.stride, "history stride override");
  cmd->add_option("--grid", o.grid, "validation grid override, e.g. 128x128");
}

runner::RunOptions to_run_options(const CommonOpts& o) {
  runner::RunOptions opt;
  opt.out_dir = o.out_dir;
  opt.threads = o.threads;
  if (!o.seeds_csv.empty()) opt.seeds = parse_seed_list(o.seeds_csv);
  if (o.stride > 0) opt.history_stride = o.stride;
  if (!o.grid.empty()) opt.validation_grid = parse_grid(o.grid);
  return opt;
}

int cmd_run(const std::string& config_path, const CommonOpts& opts) {
  const io::RunConfig config = io::load_config(config_path);
  const runner::RunOutcome outcome = runner::run_experiment(config, to_run_options(opts));
  print_report_summary(outcome.report);
  std::printf("report: %s\n", outcome.report_path.c_str());
  return 0;
}

int cmd_validate(const std::string& config_path) {
  const io::RunConfig config = io::load_config(config_path);
  const auto problem = train::make_problem(config.train.problem);
  Eigen::Index members = 0;
  for (int sub = 0; sub < problem->subdomain_count(); ++sub) {
    const prob::Domain2& d = problem->domain(sub);
    members += wave::build_family_2d(d.x, config.train.x_resolutions, d.t,
                                     config.train.t_resolutions)
                   .size();
  }
  std::printf("ok: %s (%s), %d field(s), %d subdomain(s), %lld wavelet members\n",
              config_path.c_str(), config.train.problem.name.c_str(),
              problem->field_count(), problem->subdomain_count(),
              static_cast<long long>(members));
  return 0;
}

int cmd_gradcheck(const std::string& config_path) {
  const io::RunConfig config = io::load_config(config_path);

  bool ok = true;
  const gradcheck::CircuitOracleReport circ = gradcheck::circuit_gradient_oracle(50, 2718);
  std::printf("circuit oracle (%d circuits): adjoint vs shift %.3e, vs fd %.3e  [%s]\n",
              circ.circuits, circ.max_adjoint_vs_shift, circ.max_vs_finite_diff,
              circ.pass() ? "pass" : "FAIL");
  ok = ok && circ.pass();

  // the configured problem, scaled down so a full finite-difference sweep is cheap
  train::TrainConfig toy = config.train;
  toy.qnn1_qubits = 2;
  toy.qnn1_layers = 1;
  toy.qnn2_qubits = std::min(toy.qnn2_qubits, 3);
  toy.qnn2_layers = 1;
  toy.x_resolutions = {-1, 0};
  toy.t_resolutions = {-1, 0};
  toy.n_collocation = 24;
  toy.n_boundary = 8;
  toy.n_initial = toy.n_initial > 0 ? 6 : 0;
  if (toy.n_interface > 0) toy.n_interface = 6;
  toy.epochs = 1;
  const gradcheck::LossGradientReport own = gradcheck::loss_gradient_check(toy, 5);
  std::printf("loss gradient (%s, %lld params): rel %.3e, worst entry %.3e  [%s]\n",
              own.label.c_str(), static_cast<long long>(own.n_params),
              own.vector_rel_error, own.max_entry_error, own.pass() ? "pass" : "FAIL");
  ok = ok && own.pass();

  for (const auto& [label, cfg] : gradcheck::toy_configs()) {
    const gradcheck::LossGradientReport rep = gradcheck::loss_gradient_check(cfg, 5);
    std::printf("loss gradient (%s, %lld params): rel %.3e, worst entry %.3e  [%s]\n",
                label.c_str(), static_cast<long long>(rep.n_params),
                rep.vector_rel_error, rep.max_entry_error, rep.pass() ? "pass" : "FAIL");
    ok = ok && rep.pass();
  }
  if (!ok) {
    std::fprintf(stderr, "gradient oracle suite failed\n");
    return 1;
  }
  return 0;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& config_path,
             const CommonOpts& opts, const std::string& sections_csv) {
  io::RunConfig config = io::load_config(config_path);
  if (!opts.grid.empty()) {
    const auto [g0, g1] = parse_grid(opts.grid);
    config.train.validation_grid0 = g0;
    config.train.validation_grid1 = g1;
  }
  const io::Checkpoint ck = io::load_checkpoint(checkpoint_path);
  train::Trainer trainer(config.train, ck.seed);
  io::apply_checkpoint(ck, trainer);

  const train::ValidationMetrics vm = trainer.validate();
  nlohmann::json j;
  j["kind"] = "eval_report";
  j["checkpoint"] = checkpoint_path;
  j["config"] = io::config_to_json(config);
  for (int f = 0; f < trainer.problem().field_count(); ++f) {
    const std::string& name = trainer.problem().field_name(f);
    std::printf("%s: rel_l2 %.6e, rel_linf %.6e\n", name.c_str(), vm.field_rel_l2[f],
                vm.field_rel_linf[f]);
    j["rel_l2"][name] = vm.field_rel_l2[f];
    j["rel_linf"][name] = vm.field_rel_linf[f];
  }
  std::filesystem::create_directories(opts.out_dir);
  io::atomic_write(opts.out_dir + "/eval_metrics.json", j.dump(2));

  const auto [g0, g1] = opts.grid.empty() ? std::pair<int, int>{64, 64}
                                          : parse_grid(opts.grid);
  std::vector<double> sections = parse_sections(sections_csv);
  if (sections.empty()) {
    sections = {trainer.problem().domain(0).x.midpoint()};
  }
  const runner::FieldFiles files =
      runner::emit_fields(trainer, opts.out_dir, g0, g1, sections);
  std::printf("wrote %zu csv and %zu svg files to %s\n", files.csv.size(),
              files.svg.size(), opts.out_dir.c_str());
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::vector<std::string>& values, const CommonOpts& opts) {
  std::ifstream in(config_path);
  if (!in) throw io::ConfigError(config_path + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw io::ConfigError(config_path + ": " + e.what());
  }

  std::string pointer = "/" + param;
  for (char& c : pointer) {
    if (c == '.') c = '/';
  }

  std::string csv = "value";
  bool head_done = false;
  nlohmann::json rows = nlohmann::json::array();
  for (const std::string& value : values) {
    nlohmann::json patched = root;
    try {
      patched[nlohmann::json::json_pointer(pointer)] = nlohmann::json::parse(value);
    } catch (const nlohmann::json::exception& e) {
      throw io::ConfigError("--param/--values: " + std::string(e.what()));
    }
    io::RunConfig cfg =
        io::parse_config(patched.dump(), config_path + " [" + param + "=" + value + "]");
    if (cfg.name.empty()) cfg.name = cfg.train.problem.name;
    cfg.name += "_" + param + "_" + value;

    const runner::RunOutcome outcome = runner::run_experiment(cfg, to_run_options(opts));
    std::printf("--- %s = %s ---\n", param.c_str(), value.c_str());
    print_report_summary(outcome.report);

    const report::RunReport& rep = outcome.report;
    if (!head_done) {
      for (const std::string& f : rep.field_names) {
        csv += ",rel_l2_mean_" + f + ",rel_l2_std_" + f;
      }
      csv += ",n_collocation,n_boundary,n_initial\n";
      head_done = true;
    }
    csv += value;
    for (std::size_t f = 0; f < rep.field_names.size(); ++f) {
      csv += "," + report::format_number(rep.per_field[f].rel_l2.mean);
      csv += "," + report::format_number(rep.per_field[f].rel_l2.std);
    }
    csv += "," + std::to_string(cfg.train.n_collocation);
    csv += "," + std::to_string(cfg.train.n_boundary);
    csv += "," + std::to_string(cfg.train.n_initial) + "\n";

    nlohmann::json row;
    row["value"] = value;
    row["report"] = report::report_to_json(rep);
    rows.push_back(std::move(row));
  }
  std::filesystem::create_directories(opts.out_dir);
  io::atomic_write(opts.out_dir + "/sweep_" + param + ".csv", csv);
  nlohmann::json sweep_json;
  sweep_json["kind"] = "sweep_report";
  sweep_json["param"] = param;
  sweep_json["rows"] = std::move(rows);
  io::atomic_write(opts.out_dir + "/sweep_" + param + ".json", sweep_json.dump(2));
  std::printf("sweep table: %s\n", (opts.out_dir + "/sweep_" + param + ".csv").c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum-circuit wavelet collocation solver for multiscale PDEs"};
  app.require_subcommand(1);

  std::string config_path, checkpoint_path, param, sections_csv;
  std::vector<std::string> values;
  CommonOpts run_opts, eval_opts, sweep_opts;

  CLI::App* run = app.add_subcommand("run", "train all configured seeds, write report");
  run->add_option("config", config_path, "config JSON")->required();
  attach_common(run, run_opts);

  CLI::App* eval = app.add_subcommand("eval", "recompute metrics, dump fields");
  eval->add_option("checkpoint", checkpoint_path, "checkpoint JSON")->required();
  eval->add_option("config", config_path, "config JSON")->required();
  eval->add_option("--sections", sections_csv, "comma-separated x cross-sections");
  attach_common(eval, eval_opts);

  CLI::App* grad = app.add_subcommand("gradcheck", "run the gradient-oracle suite");
  grad->add_option("config", config_path, "config JSON")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "run the config once per parameter value");
  sweep->add_option("config", config_path, "config JSON")->required();
  sweep->add_option("--param", param, "dotted config path, e.g. problem.epsilon")
      ->required();
  sweep->add_option("--values", values, "values substituted at --param")->required();
  attach_common(sweep, sweep_opts);

  CLI::App* validate = app.add_subcommand("validate", "schema-check a config");
  validate->add_option("config", config_path, "config JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, run_opts);
    if (eval->parsed()) return cmd_eval(checkpoint_path, config_path, eval_opts,
                                        sections_csv);
    if (grad->parsed()) return cmd_gradcheck(config_path);
    if (sweep->parsed()) return cmd_sweep(config_path, param, values, sweep_opts);
    if (validate->parsed()) return cmd_validate(config_path);
  } catch (const qwpde::io::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
