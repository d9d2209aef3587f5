#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "qwpde/metrics.hpp"
#include "qwpde/training.hpp"

namespace qwpde::report {

struct AggregateMetric {
  metrics::MeanStd rel_l2;
  metrics::MeanStd rel_linf;
};

/// Multi-seed experiment summary: the resolved config, per-seed outcomes and
/// mean +- sample-std aggregates over the non-failed seeds. Self-describing
/// (the config echo reproduces the run).
struct RunReport {
  nlohmann::json config_echo;
  std::vector<std::string> field_names;
  Eigen::Index trainable_parameters = 0;
  std::vector<train::SeedResult> seeds;
  int n_failed = 0;
  std::vector<AggregateMetric> per_field;  // over non-failed seeds
  AggregateMetric pooled;
  metrics::MeanStd wall_seconds;
};

/// Mean and sample standard deviation (n-1) per metric over the non-failed
/// seeds; failed seeds are excluded and counted. Throws std::runtime_error
/// when no seed succeeded. Permutation-invariant in seed order.
RunReport aggregate(nlohmann::json config_echo, std::vector<std::string> field_names,
                    std::vector<train::SeedResult> seed_results);

nlohmann::json report_to_json(const RunReport& report);

/// Loss-history CSV: epoch, lr, loss_total, loss_pde, loss_ic, loss_bc,
/// loss_interface, val_rel_l2, val_rel_linf, plus per-field validation
/// columns when the problem has more than one output field. Numeric cells
/// carry 17 significant digits; validation cells are empty on epochs where
/// it was not evaluated.
std::string history_csv(const std::vector<train::HistoryRow>& history,
                        const std::vector<std::string>& field_names);

/// One CSV cell with 17 significant digits.
std::string format_number(double v);

}  // namespace qwpde::report
