#include "qwpde/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <thread>

#include "qwpde/svg.hpp"

namespace qwpde::runner {

namespace fs = std::filesystem;

namespace {

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-' && c != '_') {
      c = '_';
    }
  }
  return s;
}

}  // namespace

io::RunConfig resolve_config(io::RunConfig config, const RunOptions& options) {
  if (options.seeds) config.train.seeds = *options.seeds;
  if (options.history_stride) config.train.history_stride = *options.history_stride;
  if (options.validation_grid) {
    config.train.validation_grid0 = options.validation_grid->first;
    config.train.validation_grid1 = options.validation_grid->second;
  }
  config.train.validate();
  return config;
}

RunOutcome run_experiment(const io::RunConfig& raw, const RunOptions& options) {
  const io::RunConfig config = resolve_config(raw, options);
  const std::string label =
      sanitize(config.name.empty() ? config.train.problem.name : config.name);
  fs::create_directories(options.out_dir);

  const std::vector<std::uint64_t>& seeds = config.train.seeds;
  std::vector<train::SeedResult> results(seeds.size());
  std::vector<std::string> history_paths(seeds.size()), checkpoint_paths(seeds.size());

  // seed-parallel jobs; each trainer is independent and single-threaded
  const int pool = std::max(1, options.threads);
  std::size_t next = 0;
  while (next < seeds.size()) {
    const std::size_t batch = std::min<std::size_t>(pool, seeds.size() - next);
    std::vector<std::thread> workers;
    for (std::size_t k = 0; k < batch; ++k) {
      const std::size_t idx = next + k;
      workers.emplace_back([&, idx] {
        train::Trainer trainer(config.train, seeds[idx]);
        results[idx] = trainer.run();
        const std::string stem =
            options.out_dir + "/" + label + "_seed" + std::to_string(seeds[idx]);
        io::atomic_write(stem + "_history.csv",
                         report::history_csv(results[idx].history, [&] {
                           std::vector<std::string> names;
                           for (int f = 0; f < trainer.problem().field_count(); ++f) {
                             names.push_back(trainer.problem().field_name(f));
                           }
                           return names;
                         }()));
        io::save_checkpoint(stem + "_checkpoint.json", trainer, seeds[idx]);
        history_paths[idx] = stem + "_history.csv";
        checkpoint_paths[idx] = stem + "_checkpoint.json";
      });
    }
    for (std::thread& w : workers) w.join();
    next += batch;
  }

  std::vector<std::string> field_names;
  {
    const auto problem = train::make_problem(config.train.problem);
    for (int f = 0; f < problem->field_count(); ++f) {
      field_names.push_back(problem->field_name(f));
    }
  }

  RunOutcome outcome;
  outcome.report = report::aggregate(io::config_to_json(config), field_names, results);
  outcome.report_path = options.out_dir + "/" + label + "_report.json";
  io::atomic_write(outcome.report_path, report::report_to_json(outcome.report).dump(2));
  outcome.history_paths = std::move(history_paths);
  outcome.checkpoint_paths = std::move(checkpoint_paths);
  return outcome;
}

namespace {

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ",";
      out += report::format_number(m(i, j));
    }
    out += "\n";
  }
  return out;
}

}  // namespace

FieldFiles emit_fields(train::Trainer& trainer, const std::string& dir, int grid0,
                       int grid1, const std::vector<double>& sections) {
  fs::create_directories(dir);
  const prob::Problem& problem = trainer.problem();
  const int n_sub = problem.subdomain_count();

  // full-domain axes; points are routed to the owning subdomain by x
  double x_lo = problem.domain(0).x.lo, x_hi = problem.domain(0).x.hi;
  for (int s = 1; s < n_sub; ++s) {
    x_lo = std::min(x_lo, problem.domain(s).x.lo);
    x_hi = std::max(x_hi, problem.domain(s).x.hi);
  }
  const wave::Interval t_axis = problem.domain(0).t;
  auto owner = [&](double x) {
    for (int s = 0; s < n_sub; ++s) {
      if (x <= problem.domain(s).x.hi || s == n_sub - 1) return s;
    }
    return n_sub - 1;
  };

  Eigen::VectorXd xs(grid0), ts(grid1);
  for (int i = 0; i < grid0; ++i) {
    xs[i] = x_lo + double(i) / double(grid0 - 1) * (x_hi - x_lo);
  }
  for (int j = 0; j < grid1; ++j) {
    ts[j] = t_axis.lo + double(j) / double(grid1 - 1) * t_axis.length();
  }

  FieldFiles files;
  auto save = [&](const std::string& name, const std::string& text, bool is_svg) {
    const std::string path = dir + "/" + name;
    io::atomic_write(path, text);
    (is_svg ? files.svg : files.csv).push_back(path);
  };
  save("grid_x.csv", matrix_csv(xs), false);
  save("grid_t.csv", matrix_csv(ts), false);

  for (int f = 0; f < problem.field_count(); ++f) {
    const std::string& fname = problem.field_name(f);
    Eigen::MatrixXd exact(grid0, grid1), pred(grid0, grid1);

    // batch prediction per subdomain row-block (rows share the x coordinate)
    for (int i = 0; i < grid0; ++i) {
      const int sub = owner(xs[i]);
      train::Points pts(grid1, 2);
      for (int j = 0; j < grid1; ++j) {
        pts(j, 0) = xs[i];
        pts(j, 1) = ts[j];
        exact(i, j) = problem.exact(sub, f, xs[i], ts[j]);
      }
      pred.row(i) = trainer.predict_field(sub, f, pts).transpose();
    }
    const Eigen::MatrixXd err = (pred - exact).cwiseAbs();

    save("exact_" + fname + ".csv", matrix_csv(exact), false);
    save("pred_" + fname + ".csv", matrix_csv(pred), false);
    save("error_" + fname + ".csv", matrix_csv(err), false);
    save("exact_" + fname + ".svg", svg::heatmap(exact, "exact " + fname), true);
    save("pred_" + fname + ".svg", svg::heatmap(pred, "predicted " + fname), true);
    save("error_" + fname + ".svg", svg::heatmap(err, "|error| " + fname), true);

    for (double section : sections) {
      const double x = std::clamp(section, x_lo, x_hi);
      const int sub = owner(x);
      train::Points pts(grid1, 2);
      Eigen::VectorXd ex(grid1);
      for (int j = 0; j < grid1; ++j) {
        pts(j, 0) = x;
        pts(j, 1) = ts[j];
        ex[j] = problem.exact(sub, f, x, ts[j]);
      }
      const Eigen::VectorXd pr = trainer.predict_field(sub, f, pts);
      Eigen::MatrixXd table(grid1, 3);
      table.col(0) = ts;
      table.col(1) = ex;
      table.col(2) = pr;
      const std::string tag = fname + "_x" + report::format_number(x);
      save("section_" + tag + ".csv", matrix_csv(table), false);
      save("section_" + tag + ".svg",
           svg::line_chart({{"exact", ts, ex, "#1f77b4", false},
                            {"predicted", ts, pr, "#d62728", true}},
                           fname + " at x = " + report::format_number(x)),
           true);
    }
  }
  return files;
}

}  // namespace qwpde::runner
