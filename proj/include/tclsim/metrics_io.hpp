#pragma once

// Result files. Column order is fixed:
//
//   occupancy.csv  tick,p1,p2,p3,p4
//                  (p1..p4 = On, Off, OnLock, OffLock fractions after the tick)
//   power.csv      tick,period,aggregate_kw,target_kw,actual_kw,error
//                  (one row per tick; the last three columns repeat the
//                   values of the tick's control period)
//   soa_hist.csv   bin_low,bin_high,density
//   metrics.json   the same tables plus raw SOA counts
//
// Floating-point values are written with 17 significant digits.

#include <array>
#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "tclsim/aggregator.hpp"
#include "tclsim/scenario.hpp"

namespace tclsim {

inline constexpr const char* kOccupancyHeader = "tick,p1,p2,p3,p4";
inline constexpr const char* kPowerHeader = "tick,period,aggregate_kw,target_kw,actual_kw,error";
inline constexpr const char* kSoaHeader = "bin_low,bin_high,density";

/// Writes the requested formats into `directory` (created if missing).
/// Throws std::runtime_error on I/O failure.
void write_metrics(const ClusterMetrics& metrics, const std::filesystem::path& directory,
                   std::span<const OutputFormat> formats);

/// Tables recovered from the CSV files.
struct CsvMetrics {
  std::vector<std::array<double, 4>> occupancy;
  std::vector<double> aggregate_power;
  std::vector<PeriodMetrics> periods;  // target_kw, actual_kw and error only
  std::vector<std::array<double, 3>> soa_bins;
};

CsvMetrics read_metrics_csv(const std::filesystem::path& directory);

nlohmann::json metrics_to_json(const ClusterMetrics& metrics);
ClusterMetrics metrics_from_json(const nlohmann::json& doc);

}  // namespace tclsim
