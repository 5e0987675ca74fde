#pragma once

// Scenario files (JSON, versioned) and heterogeneous parameter sampling.
//
// Every section except "schema_version" is optional; missing values fall
// back to the defaults below. Unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tclsim/aggregator.hpp"
#include "tclsim/outdoor.hpp"
#include "tclsim/thermal.hpp"

namespace tclsim {

inline constexpr int kScenarioSchemaVersion = 1;

class ScenarioError : public ConfigError {
public:
  using ConfigError::ConfigError;
};

struct UniformRange {
  double low = 0.0;
  double high = 0.0;

  bool operator==(const UniformRange&) const = default;
};

/// Per-field uniform ranges; defaults are the reference AC fleet.
struct ParameterDistributions {
  UniformRange ra{2.5, 3.5};             // degC/kW
  UniformRange ca{1.5, 2.5};             // kWh/degC
  UniformRange p_rate{2.5, 3.0};         // kW
  UniformRange cop{2.5, 3.0};
  UniformRange t_lock{180.0, 180.0};     // s
  UniformRange t_min_comfort{23.0, 23.0};  // degC
  UniformRange t_max_comfort{27.0, 27.0};  // degC

  bool operator==(const ParameterDistributions&) const = default;
};

/// Throws ScenarioError on an inverted range or one that can yield invalid ThermalParams.
void validate(const ParameterDistributions& dists);

enum class OutputFormat { Csv, Json };

struct OutputSpec {
  std::filesystem::path directory = "out";
  std::vector<OutputFormat> formats{OutputFormat::Csv};
};

struct ScenarioFile {
  ClusterConfig cluster;
  ParameterDistributions parameters;
  OutdoorProfile outdoor{32.0};
  OutputSpec output;
};

/// n independent draws; device i uses its own parameter substream.
std::vector<ThermalParams> sample_population(const ParameterDistributions& dists, std::size_t n, std::uint64_t seed);

ScenarioFile parse_scenario(const nlohmann::json& doc);
ScenarioFile load_scenario(const std::filesystem::path& path);

/// Normalized form with every default filled in; parse_scenario(to_json(s)) == s.
nlohmann::json to_json(const ScenarioFile& scenario);

}  // namespace tclsim
