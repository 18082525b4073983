#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gbeam/medium.hpp"
#include "gbeam/source.hpp"

namespace gbeam {

struct TraceConfig {
  int rays = 25;        // rays dumped to CSV
  int samples = 200;    // non-trapping sample count
  double s_max = 6.0;
  std::uint64_t seed = kDefaultProbeSeed;
};

struct ExperimentConfig {
  MediumModel medium;
  std::optional<SourceSpec> source;
  std::vector<double> k_list;
  double alpha = 0.0;
  double eta = -1.0;       // <= 0: default 0.3 R
  int n_quad = 12;
  double ray_step = 1e-3;
  double ball_radius = -1.0;  // <= 0: default R
  int points_per_wavelength = 10;
  bool dump_fields = false;
  TraceConfig trace;
  std::string out_dir = "out";
  std::uint64_t hash = 0;  // FNV-1a of the config file bytes

  double norm_radius() const {
    return ball_radius > 0.0 ? ball_radius : medium.support_radius;
  }
};

// FNV-1a 64-bit over raw bytes; embedded in every output file header.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hash_string(std::uint64_t h);

// Throws SchemaError with a field-level message on any violation; malformed
// JSON raises nlohmann's parse_error (with line/column) to the caller.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::string& path);

}  // namespace gbeam
