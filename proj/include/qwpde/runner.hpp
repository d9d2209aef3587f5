#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qwpde/config_io.hpp"
#include "qwpde/report.hpp"

namespace qwpde::runner {

struct RunOptions {
  std::string out_dir = "runs";
  int threads = 1;
  std::optional<std::vector<std::uint64_t>> seeds;        // overrides config
  std::optional<long long> history_stride;                // overrides config
  std::optional<std::pair<int, int>> validation_grid;     // overrides config
};

struct RunOutcome {
  report::RunReport report;
  std::string report_path;
  std::vector<std::string> history_paths;     // per seed
  std::vector<std::string> checkpoint_paths;  // per seed
};

/// Trains every seed (a pool of `threads` seed-parallel jobs; each job is
/// single-threaded and deterministic), writes per-seed history CSVs and
/// checkpoints plus the aggregate report under out_dir.
RunOutcome run_experiment(const io::RunConfig& config, const RunOptions& options);

/// Applies the option overrides to a copy of the config.
io::RunConfig resolve_config(io::RunConfig config, const RunOptions& options);

struct FieldFiles {
  std::vector<std::string> csv;
  std::vector<std::string> svg;
};

/// Exact, predicted and |error| fields of every output field on a grid0 x
/// grid1 grid over the full domain, as CSV matrices (rows along x) and SVG
/// heatmaps, plus cross-sections u(x=section, .) as CSV + line charts.
FieldFiles emit_fields(train::Trainer& trainer, const std::string& dir, int grid0,
                       int grid1, const std::vector<double>& sections);

}  // namespace qwpde::runner
