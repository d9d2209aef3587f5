#include "qwpde/report.hpp"

#include <cstdio>
#include <stdexcept>

namespace qwpde::report {

using nlohmann::json;

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

RunReport aggregate(json config_echo, std::vector<std::string> field_names,
                    std::vector<train::SeedResult> seed_results) {
  if (seed_results.empty()) {
    throw std::runtime_error("aggregate needs at least one seed result");
  }
  RunReport rep;
  rep.config_echo = std::move(config_echo);
  rep.field_names = std::move(field_names);
  rep.seeds = std::move(seed_results);
  rep.trainable_parameters = rep.seeds.front().trainable_parameters;

  const std::size_t n_fields = rep.field_names.size();
  std::vector<std::vector<double>> l2(n_fields), linf(n_fields);
  std::vector<double> pooled_l2, pooled_linf, wall;
  for (const train::SeedResult& s : rep.seeds) {
    if (s.failed) {
      ++rep.n_failed;
      continue;
    }
    for (std::size_t f = 0; f < n_fields; ++f) {
      l2[f].push_back(s.final_metrics.field_rel_l2.at(f));
      linf[f].push_back(s.final_metrics.field_rel_linf.at(f));
    }
    pooled_l2.push_back(s.final_metrics.rel_l2);
    pooled_linf.push_back(s.final_metrics.rel_linf);
    wall.push_back(s.wall_seconds);
  }
  if (pooled_l2.empty()) {
    throw std::runtime_error("aggregate: every seed failed");
  }
  for (std::size_t f = 0; f < n_fields; ++f) {
    rep.per_field.push_back({metrics::mean_std(l2[f]), metrics::mean_std(linf[f])});
  }
  rep.pooled = {metrics::mean_std(pooled_l2), metrics::mean_std(pooled_linf)};
  rep.wall_seconds = metrics::mean_std(wall);
  return rep;
}

namespace {

json mean_std_json(const metrics::MeanStd& ms) {
  return {{"mean", ms.mean}, {"std", ms.std}, {"n", ms.n}};
}

json loss_json(const train::LossBreakdown& lb) {
  return {{"total", lb.total}, {"pde", lb.pde},       {"ic", lb.ic},
          {"bc", lb.bc},       {"interface", lb.interface_}};
}

}  // namespace

json report_to_json(const RunReport& rep) {
  json j;
  j["format_version"] = 1;
  j["kind"] = "run_report";
  j["config"] = rep.config_echo;
  j["conventions"] = {
      {"angle_rescale",
       "coordinates are affinely rescaled per dimension from the problem domain "
       "onto [0, pi] before angle encoding"},
      {"bit_ordering", "qubit 0 is the most significant bit of the basis index"},
      {"global_probe", "global coefficient mode probes the domain midpoint"}};
  j["field_names"] = rep.field_names;
  j["trainable_parameters"] = rep.trainable_parameters;

  json seeds = json::array();
  for (const train::SeedResult& s : rep.seeds) {
    json e;
    e["seed"] = s.seed;
    e["failed"] = s.failed;
    if (s.failed) e["failure"] = s.failure;
    e["epochs_run"] = s.epochs_run;
    e["wall_seconds"] = s.wall_seconds;
    e["final_loss"] = loss_json(s.final_loss);
    if (!s.failed) {
      e["rel_l2"] = s.final_metrics.field_rel_l2;
      e["rel_linf"] = s.final_metrics.field_rel_linf;
      e["pooled_rel_l2"] = s.final_metrics.rel_l2;
      e["pooled_rel_linf"] = s.final_metrics.rel_linf;
    }
    seeds.push_back(std::move(e));
  }
  j["seeds"] = std::move(seeds);

  json agg;
  agg["n_seeds"] = rep.seeds.size();
  agg["n_failed"] = rep.n_failed;
  json per_field = json::array();
  for (const AggregateMetric& m : rep.per_field) {
    per_field.push_back(
        {{"rel_l2", mean_std_json(m.rel_l2)}, {"rel_linf", mean_std_json(m.rel_linf)}});
  }
  agg["per_field"] = std::move(per_field);
  agg["pooled"] = {{"rel_l2", mean_std_json(rep.pooled.rel_l2)},
                   {"rel_linf", mean_std_json(rep.pooled.rel_linf)}};
  agg["wall_seconds"] = mean_std_json(rep.wall_seconds);
  j["aggregate"] = std::move(agg);
  return j;
}

std::string history_csv(const std::vector<train::HistoryRow>& history,
                        const std::vector<std::string>& field_names) {
  std::string out =
      "epoch,lr,loss_total,loss_pde,loss_ic,loss_bc,loss_interface,val_rel_l2,"
      "val_rel_linf";
  if (field_names.size() > 1) {
    for (const std::string& f : field_names) out += ",val_rel_l2_" + f;
    for (const std::string& f : field_names) out += ",val_rel_linf_" + f;
  }
  out += "\n";
  for (const train::HistoryRow& row : history) {
    out += std::to_string(row.epoch);
    out += "," + format_number(row.lr);
    out += "," + format_number(row.loss.total);
    out += "," + format_number(row.loss.pde);
    out += "," + format_number(row.loss.ic);
    out += "," + format_number(row.loss.bc);
    out += "," + format_number(row.loss.interface_);
    if (row.has_validation) {
      out += "," + format_number(row.validation.rel_l2);
      out += "," + format_number(row.validation.rel_linf);
      if (field_names.size() > 1) {
        for (double v : row.validation.field_rel_l2) out += "," + format_number(v);
        for (double v : row.validation.field_rel_linf) out += "," + format_number(v);
      }
    } else {
      out += ",,";
      if (field_names.size() > 1) {
        for (std::size_t k = 0; k < 2 * field_names.size(); ++k) out += ",";
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace qwpde::report
