#include "tclsim/scenario.hpp"

#include <fstream>
#include <initializer_list>
#include <string_view>

#include "tclsim/rng.hpp"

namespace tclsim {

using nlohmann::json;

namespace {

void require_object(const json& j, const std::string& where)
{
  if (!j.is_object()) throw ScenarioError(where + ": expected an object");
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where)
{
  require_object(obj, where);
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ScenarioError(where + ": unknown key '" + key + "'");
  }
}

double get_number(const json& obj, const char* key, double fallback, const std::string& where)
{
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ScenarioError(where + "." + key + ": expected a number");
  return v.get<double>();
}

std::uint64_t get_unsigned(const json& obj, const char* key, std::uint64_t fallback, const std::string& where)
{
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned()) throw ScenarioError(where + "." + key + ": expected a non-negative integer");
  return v.get<std::uint64_t>();
}

bool get_bool(const json& obj, const char* key, bool fallback, const std::string& where)
{
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) throw ScenarioError(where + "." + key + ": expected true or false");
  return v.get<bool>();
}

std::string get_string(const json& obj, const char* key, const std::string& where)
{
  if (!obj.contains(key)) throw ScenarioError(where + ": missing '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ScenarioError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

// A bare number is a degenerate range.
UniformRange parse_range(const json& v, const std::string& where)
{
  if (v.is_number()) return {v.get<double>(), v.get<double>()};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  if (v.is_object()) {
    check_keys(v, {"low", "high"}, where);
    if (!v.contains("low") || !v.contains("high")) throw ScenarioError(where + ": range needs low and high");
    return {get_number(v, "low", 0.0, where), get_number(v, "high", 0.0, where)};
  }
  throw ScenarioError(where + ": expected a number, [low, high] or {\"low\", \"high\"}");
}

json range_to_json(const UniformRange& r)
{
  if (r.low == r.high) return r.low;
  return json{{"low", r.low}, {"high", r.high}};
}

DispatchMode parse_dispatch(const json& j)
{
  const std::string where = "cluster.dispatch";
  require_object(j, where);
  const std::string mode = get_string(j, "mode", where);
  if (mode == "random_envelope") {
    check_keys(j, {"mode"}, where);
    return RandomEnvelope{};
  }
  if (mode == "fixed_controls") {
    check_keys(j, {"mode", "u0", "u1"}, where);
    FixedControls f;
    f.u0 = get_number(j, "u0", f.u0, where);
    f.u1 = get_number(j, "u1", f.u1, where);
    return f;
  }
  if (mode == "target_trace") {
    check_keys(j, {"mode", "targets_kw"}, where);
    if (!j.contains("targets_kw") || !j.at("targets_kw").is_array())
      throw ScenarioError(where + ".targets_kw: expected an array of numbers");
    TargetTrace t;
    for (const auto& v : j.at("targets_kw")) {
      if (!v.is_number()) throw ScenarioError(where + ".targets_kw: expected an array of numbers");
      t.targets_kw.push_back(v.get<double>());
    }
    return t;
  }
  throw ScenarioError(where + ".mode: unknown mode '" + mode + "'");
}

json dispatch_to_json(const DispatchMode& mode)
{
  if (const auto* f = std::get_if<FixedControls>(&mode))
    return json{{"mode", "fixed_controls"}, {"u0", f->u0}, {"u1", f->u1}};
  if (const auto* t = std::get_if<TargetTrace>(&mode)) return json{{"mode", "target_trace"}, {"targets_kw", t->targets_kw}};
  return json{{"mode", "random_envelope"}};
}

ClusterConfig parse_cluster(const json& j)
{
  const std::string where = "cluster";
  check_keys(j, {"n_devices", "dt_tick", "dt_period", "horizon", "seed", "t_min", "threads", "thermostat_override",
                 "dispatch", "soa_bins"},
             where);
  ClusterConfig c;
  c.n_devices = static_cast<std::size_t>(get_unsigned(j, "n_devices", c.n_devices, where));
  c.dt_tick = get_number(j, "dt_tick", c.dt_tick, where);
  c.dt_period = get_number(j, "dt_period", c.dt_period, where);
  c.horizon = get_number(j, "horizon", c.horizon, where);
  c.seed = get_unsigned(j, "seed", c.seed, where);
  c.t_min = get_number(j, "t_min", c.t_min, where);
  c.threads = static_cast<unsigned>(get_unsigned(j, "threads", c.threads, where));
  c.thermostat_override = get_bool(j, "thermostat_override", c.thermostat_override, where);
  if (j.contains("dispatch")) c.dispatch = parse_dispatch(j.at("dispatch"));
  if (j.contains("soa_bins")) {
    const auto& b = j.at("soa_bins");
    check_keys(b, {"low", "high", "count"}, "cluster.soa_bins");
    c.soa_binning.low = get_number(b, "low", c.soa_binning.low, "cluster.soa_bins");
    c.soa_binning.high = get_number(b, "high", c.soa_binning.high, "cluster.soa_bins");
    c.soa_binning.bins = static_cast<std::size_t>(get_unsigned(b, "count", c.soa_binning.bins, "cluster.soa_bins"));
  }
  return c;
}

ParameterDistributions parse_parameters(const json& j)
{
  const std::string where = "parameters";
  check_keys(j, {"ra", "ca", "p_rate", "cop", "t_lock", "t_min_comfort", "t_max_comfort"}, where);
  ParameterDistributions d;
  auto field = [&](const char* key, UniformRange& out) {
    if (j.contains(key)) out = parse_range(j.at(key), where + "." + key);
  };
  field("ra", d.ra);
  field("ca", d.ca);
  field("p_rate", d.p_rate);
  field("cop", d.cop);
  field("t_lock", d.t_lock);
  field("t_min_comfort", d.t_min_comfort);
  field("t_max_comfort", d.t_max_comfort);
  return d;
}

InitialStatePolicy parse_initial(const json& j)
{
  const std::string where = "initial_state";
  require_object(j, where);
  InitialStatePolicy p;
  const std::string policy = get_string(j, "policy", where);
  if (policy == "uniform") {
    check_keys(j, {"policy"}, where);
    p.kind = InitialStatePolicy::Kind::Uniform;
    return p;
  }
  if (policy != "fixed") throw ScenarioError(where + ".policy: expected 'fixed' or 'uniform'");
  check_keys(j, {"policy", "switch", "ta"}, where);
  if (j.contains("switch")) {
    try {
      p.switch_state = parse_switch_state(get_string(j, "switch", where));
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(where + ".switch: " + e.what());
    }
  }
  if (j.contains("ta")) p.ta = get_number(j, "ta", 0.0, where);
  return p;
}

OutdoorProfile parse_outdoor(const json& j)
{
  const std::string where = "outdoor";
  check_keys(j, {"constant", "points"}, where);
  if (j.contains("constant") == j.contains("points"))
    throw ScenarioError(where + ": give exactly one of 'constant' or 'points'");
  if (j.contains("constant")) return OutdoorProfile(get_number(j, "constant", 0.0, where));
  const auto& pts = j.at("points");
  if (!pts.is_array() || pts.empty()) throw ScenarioError(where + ".points: expected a non-empty array");
  std::vector<std::pair<double, double>> points;
  for (const auto& p : pts) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw ScenarioError(where + ".points: each point is [time_s, degC]");
    points.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  try {
    return OutdoorProfile(std::move(points));
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(where + ".points: " + e.what());
  }
}

OutputSpec parse_output(const json& j)
{
  const std::string where = "output";
  check_keys(j, {"directory", "formats"}, where);
  OutputSpec o;
  if (j.contains("directory")) o.directory = get_string(j, "directory", where);
  if (j.contains("formats")) {
    const auto& f = j.at("formats");
    if (!f.is_array()) throw ScenarioError(where + ".formats: expected an array");
    o.formats.clear();
    for (const auto& v : f) {
      if (v == "csv")
        o.formats.push_back(OutputFormat::Csv);
      else if (v == "json")
        o.formats.push_back(OutputFormat::Json);
      else
        throw ScenarioError(where + ".formats: expected \"csv\" or \"json\"");
    }
  }
  return o;
}

}  // namespace

void validate(const ParameterDistributions& d)
{
  auto check = [](const UniformRange& r, const char* name, bool strictly_positive) {
    if (!(r.low <= r.high)) throw ScenarioError(std::string("parameters.") + name + ": low must not exceed high");
    if (strictly_positive ? !(r.low > 0.0) : !(r.low >= 0.0))
      throw ScenarioError(std::string("parameters.") + name + ": out of range");
  };
  check(d.ra, "ra", true);
  check(d.ca, "ca", true);
  check(d.p_rate, "p_rate", true);
  check(d.cop, "cop", true);
  check(d.t_lock, "t_lock", false);
  if (!(d.t_min_comfort.low <= d.t_min_comfort.high) || !(d.t_max_comfort.low <= d.t_max_comfort.high))
    throw ScenarioError("parameters: comfort band range has low above high");
  if (!(d.t_min_comfort.high < d.t_max_comfort.low))
    throw ScenarioError("parameters: t_min_comfort range must lie below t_max_comfort range");
}

std::vector<ThermalParams> sample_population(const ParameterDistributions& d, std::size_t n, std::uint64_t seed)
{
  validate(d);
  std::vector<ThermalParams> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const CounterStream s(seed, StreamDomain::Parameters, i);
    auto& p = out[i];
    p.ra = s.uniform(0, d.ra.low, d.ra.high);
    p.ca = s.uniform(1, d.ca.low, d.ca.high);
    p.p_rate = s.uniform(2, d.p_rate.low, d.p_rate.high);
    p.cop = s.uniform(3, d.cop.low, d.cop.high);
    p.t_lock = s.uniform(4, d.t_lock.low, d.t_lock.high);
    p.t_min_comfort = s.uniform(5, d.t_min_comfort.low, d.t_min_comfort.high);
    p.t_max_comfort = s.uniform(6, d.t_max_comfort.low, d.t_max_comfort.high);
  }
  return out;
}

ScenarioFile parse_scenario(const json& doc)
{
  check_keys(doc, {"schema_version", "cluster", "parameters", "initial_state", "outdoor", "output"}, "scenario");
  if (!doc.contains("schema_version")) throw ScenarioError("scenario: missing schema_version");
  if (!doc.at("schema_version").is_number_integer() || doc.at("schema_version").get<int>() != kScenarioSchemaVersion)
    throw ScenarioError("scenario: unsupported schema_version (expected " + std::to_string(kScenarioSchemaVersion) +
                        ")");

  ScenarioFile s;
  if (doc.contains("cluster")) s.cluster = parse_cluster(doc.at("cluster"));
  if (doc.contains("parameters")) s.parameters = parse_parameters(doc.at("parameters"));
  if (doc.contains("initial_state")) s.cluster.initial = parse_initial(doc.at("initial_state"));
  if (doc.contains("outdoor")) s.outdoor = parse_outdoor(doc.at("outdoor"));
  if (doc.contains("output")) s.output = parse_output(doc.at("output"));

  validate(s.cluster);
  validate(s.parameters);
  return s;
}

ScenarioFile load_scenario(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
  return parse_scenario(doc);
}

json to_json(const ScenarioFile& s)
{
  const auto& c = s.cluster;
  json cluster{{"n_devices", c.n_devices},
               {"dt_tick", c.dt_tick},
               {"dt_period", c.dt_period},
               {"horizon", c.horizon},
               {"seed", c.seed},
               {"t_min", c.t_min},
               {"threads", c.threads},
               {"thermostat_override", c.thermostat_override},
               {"dispatch", dispatch_to_json(c.dispatch)},
               {"soa_bins", {{"low", c.soa_binning.low}, {"high", c.soa_binning.high}, {"count", c.soa_binning.bins}}}};

  const auto& d = s.parameters;
  json params{{"ra", range_to_json(d.ra)},
              {"ca", range_to_json(d.ca)},
              {"p_rate", range_to_json(d.p_rate)},
              {"cop", range_to_json(d.cop)},
              {"t_lock", range_to_json(d.t_lock)},
              {"t_min_comfort", range_to_json(d.t_min_comfort)},
              {"t_max_comfort", range_to_json(d.t_max_comfort)}};

  json initial;
  if (c.initial.kind == InitialStatePolicy::Kind::Uniform) {
    initial = {{"policy", "uniform"}};
  } else {
    initial = {{"policy", "fixed"}, {"switch", std::string(to_string(c.initial.switch_state))}};
    if (c.initial.ta) initial["ta"] = *c.initial.ta;
  }

  json outdoor;
  if (s.outdoor.is_constant()) {
    outdoor = {{"constant", s.outdoor.points().front().second}};
  } else {
    json pts = json::array();
    for (const auto& [t, v] : s.outdoor.points()) pts.push_back({t, v});
    outdoor = {{"points", pts}};
  }

  json formats = json::array();
  for (auto f : s.output.formats) formats.push_back(f == OutputFormat::Csv ? "csv" : "json");

  return json{{"schema_version", kScenarioSchemaVersion},
              {"cluster", cluster},
              {"parameters", params},
              {"initial_state", initial},
              {"outdoor", outdoor},
              {"output", {{"directory", s.output.directory.string()}, {"formats", formats}}}};
}

}  // namespace tclsim
