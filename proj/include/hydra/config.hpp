#pragma once

// Experiment configuration. The on-disk format is JSON; every key is
// optional and unknown keys are rejected. See README.md for the key list.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hydra/cam.hpp"
#include "hydra/cost.hpp"
#include "hydra/dataset.hpp"
#include "hydra/encoder.hpp"
#include "hydra/learner.hpp"
#include "hydra/lta.hpp"

namespace hydra {

enum class BackendChoice { ideal, analog };
enum class ProfileChoice { uniform, calibrated };

std::string_view to_string(BackendChoice b) noexcept;
std::string_view to_string(ProfileChoice p) noexcept;
BackendChoice parse_backend(std::string_view name);
ProfileChoice parse_profile(std::string_view name);

struct ClusterConfig {
  std::size_t k = 2;
  std::size_t threshold = 16;
  std::size_t max_epochs = 20;
  // Independent random initializations; the lowest final objective wins.
  std::size_t restarts = 4;
};

struct SyntheticConfig {
  RecordSpec records;
  LanguageSpec language;
  BlobSpec blobs;  // blobs.dim follows ExperimentConfig::dim
};

struct ExperimentConfig {
  std::size_t dim = 2048;
  HvMode mode = HvMode::binary;
  BackendChoice backend = BackendChoice::ideal;
  ProfileChoice profile = ProfileChoice::calibrated;
  EncodingConfig encoding;  // scheme follows the dataset kind
  std::size_t retrain_epochs = 0;
  double train_fraction = 0.8;
  ClusterConfig cluster;
  std::vector<std::size_t> dims{512, 1024, 2048};
  AnalogParams analog;
  SensingSpec sensing;
  CalibrationOptions calibration;
  Placement placement = Placement::random_seeded;
  std::string cost_table_path;  // empty: built-in table
  CostTable cost_table = CostTable::defaults();
  SyntheticConfig synthetic;
  std::uint64_t seed = 1;

  // Throws Errc::configuration / Errc::alignment.
  void validate() const;
};

nlohmann::ordered_json to_json(const ExperimentConfig& cfg);
nlohmann::ordered_json to_json(const AnalogParams& p);
nlohmann::ordered_json to_json(const VoltageProfile& p);
nlohmann::ordered_json to_json(const CostTable& t);

// Overlays `j` onto defaults. Malformed or unknown keys raise
// Errc::configuration. A cost_table path is loaded relative to `base_dir`.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
AnalogParams analog_params_from_json(const nlohmann::json& j, AnalogParams base = {});
VoltageProfile profile_from_json(const nlohmann::json& j);
CostTable cost_table_from_json(const nlohmann::json& j, CostTable base = CostTable::defaults());

ExperimentConfig load_config(const std::string& path);

}  // namespace hydra
