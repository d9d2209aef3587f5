#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "qwpde/training.hpp"

namespace qwpde::io {

/// Raised for malformed or invalid configuration input; the message carries
/// the file, line/column (for parse errors) or the offending field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string name;  // label used for output files
  train::TrainConfig train;
};

/// Parses and schema-checks a config. Unknown keys are rejected; all limits
/// of TrainConfig::validate() apply.
RunConfig parse_config(const std::string& text, const std::string& origin);
RunConfig load_config(const std::string& path);

/// Fully resolved config echo (every field explicit), embedded in reports
/// and checkpoints; parse_config(round trip) reproduces the same TrainConfig.
nlohmann::json config_to_json(const RunConfig& config);

// ---------------------------------------------------------------------------
// Parameter checkpoints
// ---------------------------------------------------------------------------

struct CheckpointModel {
  model::Architecture architecture;
  std::vector<int> x_resolutions, t_resolutions;
};

struct Checkpoint {
  std::uint64_t seed = 0;
  std::vector<CheckpointModel> models;
  Eigen::VectorXd parameters;  // all models, concatenated
};

/// Versioned JSON checkpoint; doubles serialise shortest-round-trip, so
/// save followed by load is bit-exact.
void save_checkpoint(const std::string& path, const train::Trainer& trainer,
                     std::uint64_t seed);
Checkpoint load_checkpoint(const std::string& path);

/// Installs checkpoint parameters into a trainer built from the matching
/// config; throws ConfigError when the architectures disagree.
void apply_checkpoint(const Checkpoint& checkpoint, train::Trainer& trainer);

/// Writes text to path atomically (temp file + rename).
void atomic_write(const std::string& path, const std::string& text);

}  // namespace qwpde::io
