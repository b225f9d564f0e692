#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hamred/integrators.hpp"
#include "hamred/models.hpp"
#include "hamred/psd.hpp"

namespace hamred {

inline constexpr int kConfigVersion = 1;

// Parsed experiment file. The on-disk format is JSON; see configs/ and the
// README for the schema.
struct ExperimentConfig {
  std::string model_name = "linear_wave";
  WaveOptions wave;
  std::vector<Vector> samples;
  TimeGrid grid;
  Scheme scheme = Scheme::Midpoint;
  std::string basis_method = "complexsvd";
  Index k = 10;
  ComplexOrder complex_order = ComplexOrder::Paper;
  GreedyIndicator greedy_indicator = GreedyIndicator::Projection;
  double greedy_tol = 1e-10;
  bool require_vertical = true;
  std::optional<Vector> rom_parameter;  // defaults to the first sample
  std::vector<std::string> compare_methods = {"pod", "cotangent", "complexsvd"};
  Index dlr_k = 4;
  std::string output_dir = "out";
  std::uint64_t seed = 1;

  std::shared_ptr<const HamiltonianModel> build() const;
  ParameterSet parameter_set() const { return {samples, grid}; }
  Vector rom_mu() const { return rom_parameter ? *rom_parameter : samples.front(); }
  std::string output_path(const std::string& file) const;
};

/// Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

}  // namespace hamred
