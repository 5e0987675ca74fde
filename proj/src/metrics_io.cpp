#include "tclsim/metrics_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace tclsim {

using nlohmann::json;

namespace {

std::string fmt17(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path)
{
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_occupancy_csv(const ClusterMetrics& m, const std::filesystem::path& path)
{
  auto out = open_out(path);
  out << kOccupancyHeader << '\n';
  for (std::size_t t = 0; t < m.occupancy.size(); ++t) {
    out << t + 1;
    for (double p : m.occupancy[t]) out << ',' << fmt17(p);
    out << '\n';
  }
  finish(out, path);
}

void write_power_csv(const ClusterMetrics& m, const std::filesystem::path& path)
{
  auto out = open_out(path);
  out << kPowerHeader << '\n';
  const auto tpp = static_cast<std::size_t>(m.ticks_per_period);
  for (std::size_t t = 0; t < m.aggregate_power.size(); ++t) {
    const std::size_t k = t / tpp;
    const PeriodMetrics& p = m.periods.at(k);
    out << t + 1 << ',' << k << ',' << fmt17(m.aggregate_power[t]) << ',' << fmt17(p.target_kw) << ','
        << fmt17(p.actual_kw) << ',' << fmt17(p.error) << '\n';
  }
  finish(out, path);
}

void write_soa_csv(const ClusterMetrics& m, const std::filesystem::path& path)
{
  auto out = open_out(path);
  out << kSoaHeader << '\n';
  if (m.soa.total > 0) {
    const auto density = m.soa.density();
    const double w = m.soa.bin_width();
    for (std::size_t b = 0; b < density.size(); ++b) {
      const double lo = m.soa.low + w * static_cast<double>(b);
      out << fmt17(lo) << ',' << fmt17(lo + w) << ',' << fmt17(density[b]) << '\n';
    }
  }
  finish(out, path);
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path, const char* header)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != header) throw std::runtime_error(path.string() + ": unexpected header");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

double to_double(const std::string& s) { return std::stod(s); }

}  // namespace

void write_metrics(const ClusterMetrics& metrics, const std::filesystem::path& directory,
                   std::span<const OutputFormat> formats)
{
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw std::runtime_error("cannot create " + directory.string() + ": " + ec.message());

  for (auto format : formats) {
    if (format == OutputFormat::Csv) {
      write_occupancy_csv(metrics, directory / "occupancy.csv");
      write_power_csv(metrics, directory / "power.csv");
      write_soa_csv(metrics, directory / "soa_hist.csv");
    } else {
      const auto path = directory / "metrics.json";
      auto out = open_out(path);
      out << metrics_to_json(metrics).dump(1) << '\n';
      finish(out, path);
    }
  }
}

CsvMetrics read_metrics_csv(const std::filesystem::path& directory)
{
  CsvMetrics out;
  for (const auto& row : read_csv(directory / "occupancy.csv", kOccupancyHeader)) {
    if (row.size() != 5) throw std::runtime_error("occupancy.csv: bad row");
    out.occupancy.push_back({to_double(row[1]), to_double(row[2]), to_double(row[3]), to_double(row[4])});
  }
  long last_period = -1;
  for (const auto& row : read_csv(directory / "power.csv", kPowerHeader)) {
    if (row.size() != 6) throw std::runtime_error("power.csv: bad row");
    out.aggregate_power.push_back(to_double(row[2]));
    const long period = std::stol(row[1]);
    if (period != last_period) {
      PeriodMetrics p;
      p.target_kw = to_double(row[3]);
      p.actual_kw = to_double(row[4]);
      p.error = to_double(row[5]);
      out.periods.push_back(p);
      last_period = period;
    }
  }
  for (const auto& row : read_csv(directory / "soa_hist.csv", kSoaHeader)) {
    if (row.size() != 3) throw std::runtime_error("soa_hist.csv: bad row");
    out.soa_bins.push_back({to_double(row[0]), to_double(row[1]), to_double(row[2])});
  }
  return out;
}

json metrics_to_json(const ClusterMetrics& m)
{
  json occupancy = json::array();
  for (std::size_t t = 0; t < m.occupancy.size(); ++t) {
    const auto& o = m.occupancy[t];
    occupancy.push_back({t + 1, o[0], o[1], o[2], o[3]});
  }
  json power = json::array();
  for (std::size_t t = 0; t < m.aggregate_power.size(); ++t) power.push_back({t + 1, m.aggregate_power[t]});
  json periods = json::array();
  for (std::size_t k = 0; k < m.periods.size(); ++k) {
    const auto& p = m.periods[k];
    periods.push_back({{"period", k},
                       {"target_kw", p.target_kw},
                       {"actual_kw", p.actual_kw},
                       {"error", p.error},
                       {"error_sigma", p.error_sigma},
                       {"infeasible_envelopes", p.infeasible_envelopes},
                       {"targets_outside_envelope", p.targets_outside_envelope},
                       {"clamped_controls", p.clamped_controls}});
  }
  json soa{{"low", m.soa.low},
           {"high", m.soa.high},
           {"counts", m.soa.counts},
           {"density", m.soa.density()},
           {"below", m.soa.below},
           {"above", m.soa.above},
           {"total", m.soa.total},
           {"inside_unit", m.soa.inside_unit},
           {"beyond_margin", m.soa.beyond_margin}};

  return json{{"dt_tick", m.dt_tick},
              {"ticks_per_period", m.ticks_per_period},
              {"n_devices", m.n_devices},
              {"rated_total_kw", m.rated_total},
              {"occupancy", {{"columns", {"tick", "p1", "p2", "p3", "p4"}}, {"rows", occupancy}}},
              {"power", {{"columns", {"tick", "aggregate_kw"}}, {"rows", power}}},
              {"periods", periods},
              {"soa", soa}};
}

ClusterMetrics metrics_from_json(const json& doc)
{
  ClusterMetrics m;
  try {
    m.dt_tick = doc.at("dt_tick").get<double>();
    m.ticks_per_period = doc.at("ticks_per_period").get<std::int64_t>();
    m.n_devices = doc.at("n_devices").get<std::size_t>();
    m.rated_total = doc.at("rated_total_kw").get<double>();
    for (const auto& row : doc.at("occupancy").at("rows"))
      m.occupancy.push_back({row.at(1).get<double>(), row.at(2).get<double>(), row.at(3).get<double>(),
                             row.at(4).get<double>()});
    for (const auto& row : doc.at("power").at("rows")) m.aggregate_power.push_back(row.at(1).get<double>());
    for (const auto& p : doc.at("periods")) {
      PeriodMetrics pm;
      pm.target_kw = p.at("target_kw").get<double>();
      pm.actual_kw = p.at("actual_kw").get<double>();
      pm.error = p.at("error").get<double>();
      pm.error_sigma = p.at("error_sigma").get<double>();
      pm.infeasible_envelopes = p.at("infeasible_envelopes").get<std::size_t>();
      pm.targets_outside_envelope = p.at("targets_outside_envelope").get<std::size_t>();
      pm.clamped_controls = p.at("clamped_controls").get<std::size_t>();
      m.periods.push_back(pm);
    }
    const auto& s = doc.at("soa");
    m.soa.low = s.at("low").get<double>();
    m.soa.high = s.at("high").get<double>();
    m.soa.counts = s.at("counts").get<std::vector<std::uint64_t>>();
    m.soa.below = s.at("below").get<std::uint64_t>();
    m.soa.above = s.at("above").get<std::uint64_t>();
    m.soa.total = s.at("total").get<std::uint64_t>();
    m.soa.inside_unit = s.at("inside_unit").get<std::uint64_t>();
    m.soa.beyond_margin = s.at("beyond_margin").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("metrics.json: ") + e.what());
  }
  return m;
}

}  // namespace tclsim
