#include "sboi/errors.hpp"
#include "sboi/scan.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace sboi::scan {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

std::string join(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> known) {
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) fail(where.empty() ? key : join(where, key), "unknown key");
  }
}

const json& object_at(const json& doc, const char* key, const std::string& where) {
  const json& v = doc.at(key);
  if (!v.is_object()) fail(where, "expected an object");
  return v;
}

double number(const json& obj, const char* key, const std::string& where, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(join(where, key), "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(join(where, key), "must be finite");
  return x;
}

std::int64_t integer(const json& obj, const char* key, const std::string& where,
                     std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9.0e15) return static_cast<std::int64_t>(x);
  }
  fail(join(where, key), "expected an integer");
}

bool boolean(const json& obj, const char* key, const std::string& where, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(join(where, key), "expected true or false");
  return v.get<bool>();
}

Protocol parse_protocol(const json& v, const std::string& where) {
  if (v.is_string()) {
    const auto name = v.get<std::string>();
    for (Protocol p : {Protocol::qfi, Protocol::ml, Protocol::width}) {
      if (name == protocol_name(p)) return p;
    }
  }
  fail(where, "expected one of \"qfi\", \"ml\", \"width\"");
}

WidthVarianceMode parse_width_mode(const json& v) {
  if (v.is_string()) {
    const auto name = v.get<std::string>();
    for (auto m : {WidthVarianceMode::approximate, WidthVarianceMode::exact_multinomial}) {
      if (name == width_mode_name(m)) return m;
    }
  }
  fail("width_variance_mode", "expected \"approximate\" or \"exact_multinomial\"");
}

std::vector<double> linspace(double start, double stop, int points) {
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    out[static_cast<std::size_t>(i)] =
        i == points - 1 ? stop : start + (stop - start) * static_cast<double>(i) / (points - 1);
  }
  return out;
}

}  // namespace

std::vector<double> TimeGrid::times() const {
  std::vector<double> out = linspace(start, stop, points);
  if (!refine_revivals || points < 2) return out;
  const double fine = (stop - start) / (points - 1) / 5.0;
  constexpr double kReach = 0.05;
  for (double n = std::ceil(start - kReach); n <= std::floor(stop + kReach); n += 1.0) {
    const double lo = std::max(start, n - kReach);
    const double hi = std::min(stop, n + kReach);
    if (!(hi > lo)) continue;
    // Anchor the fine grid on the revival itself.
    for (double m = std::ceil((lo - n) / fine - 1e-9); n + m * fine <= hi + 1e-12; m += 1.0) {
      out.push_back(n + m * fine);
    }
  }
  std::sort(out.begin(), out.end());
  std::vector<double> merged;
  for (double t : out) {
    if (merged.empty() || t - merged.back() > 1e-9 * fine) merged.push_back(t);
  }
  return merged;
}

std::vector<double> SigmaGrid::values() const { return linspace(start, stop, points); }

LatticeParams ScenarioSpec::lattice() const {
  if (!physical) return LatticeParams::from_ratio(hopping_ratio, atom_number);
  const double mass = physical->mass_u * constants::atomic_mass_unit;
  const double tilt = mass * physical->acceleration * physical->spacing;
  return LatticeParams::from_physical(mass, physical->acceleration, physical->spacing,
                                      hopping_ratio * tilt, atom_number);
}

void ScanConfig::validate() const {
  if (!(scenario.hopping_ratio >= 0.0) || !std::isfinite(scenario.hopping_ratio)) {
    fail("scenario.hopping_ratio", "must be finite and >= 0");
  }
  if (scenario.atom_number < 1) fail("scenario.atom_number", "must be >= 1");
  if (scenario.physical) {
    const auto& ph = *scenario.physical;
    if (!(ph.mass_u > 0.0)) fail("scenario.mass_u", "must be > 0");
    if (!(ph.acceleration > 0.0)) fail("scenario.acceleration", "must be > 0");
    if (!(ph.spacing > 0.0)) fail("scenario.spacing", "must be > 0");
  }
  if (!(initial_sigma >= 0.0)) fail("initial_state.sigma", "must be >= 0");
  if (time_grid.points < 2) fail("time_grid.points", "must be >= 2");
  if (!(time_grid.start >= 0.0)) fail("time_grid.start", "must be >= 0");
  if (!(time_grid.stop > time_grid.start)) fail("time_grid.stop", "must exceed time_grid.start");
  if (protocols.empty()) fail("protocols", "select at least one protocol");
  for (std::size_t i = 0; i < protocols.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (protocols[i] == protocols[j]) fail("protocols", "duplicate entry");
    }
  }
  if (nu < 1) fail("nu", "must be >= 1");
  if (quadrature_order < 5 || quadrature_order > 128) {
    fail("noise.quadrature_order", "must lie in [5, 128]");
  }
  for (std::size_t i = 0; i < noise_cases.size(); ++i) {
    const std::string where = "noise.cases[" + std::to_string(i) + "]";
    const auto& c = noise_cases[i];
    if (!(c.relative_sigma >= 0.0) || !(c.relative_sigma < 1.0 / 3.0)) {
      fail(where + ".relative_sigma", "must lie in [0, 1/3)");
    }
    if (!(c.lambda >= 0.0) || !std::isfinite(c.lambda)) fail(where + ".lambda", "must be finite and >= 0");
  }
  if (!(sigma_grid.start > 0.0)) fail("sigma_grid.start", "must be > 0");
  if (sigma_grid.points < 2) fail("sigma_grid.points", "must be >= 2");
  if (!(sigma_grid.stop > sigma_grid.start)) fail("sigma_grid.stop", "must exceed sigma_grid.start");
  if (!(sigma_grid.time >= 0.0)) fail("sigma_grid.time", "must be >= 0");
  if (!(design.tau > 0.0)) fail("design.tau", "must be > 0");
  if (!(design.mass_u > 0.0)) fail("design.mass_u", "must be > 0");
  if (design.atom_number < 1) fail("design.atom_number", "must be >= 1");
}

ScanConfig ScanConfig::from_json(const json& doc) {
  if (!doc.is_object()) fail("<root>", "expected a JSON object");
  reject_unknown(doc, "", {"schema_version", "scenario", "initial_state", "time_grid", "protocols",
                           "width_variance_mode", "nu", "noise", "sigma_grid", "design"});
  if (!doc.contains("schema_version")) fail("schema_version", "missing");
  if (integer(doc, "schema_version", "", 0) != kSchemaVersion) {
    fail("schema_version", "unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
  }

  ScanConfig c;
  if (doc.contains("scenario")) {
    const json& s = object_at(doc, "scenario", "scenario");
    reject_unknown(s, "scenario", {"hopping_ratio", "atom_number", "mass_u", "acceleration", "spacing"});
    c.scenario.hopping_ratio = number(s, "hopping_ratio", "scenario", c.scenario.hopping_ratio);
    c.scenario.atom_number = integer(s, "atom_number", "scenario", c.scenario.atom_number);
    if (s.contains("mass_u") || s.contains("acceleration") || s.contains("spacing")) {
      PhysicalInputs ph;
      ph.mass_u = number(s, "mass_u", "scenario", ph.mass_u);
      ph.acceleration = number(s, "acceleration", "scenario", ph.acceleration);
      ph.spacing = number(s, "spacing", "scenario", ph.spacing);
      c.scenario.physical = ph;
    }
  }
  if (doc.contains("initial_state")) {
    const json& s = object_at(doc, "initial_state", "initial_state");
    reject_unknown(s, "initial_state", {"kind", "sigma"});
    const std::string kind = s.value("kind", std::string("single_site"));
    if (kind == "single_site") {
      if (s.contains("sigma")) fail("initial_state.sigma", "only valid for kind \"gaussian\"");
    } else if (kind == "gaussian") {
      if (!s.contains("sigma")) fail("initial_state.sigma", "required for kind \"gaussian\"");
      c.initial_sigma = number(s, "sigma", "initial_state", 0.0);
      if (!(c.initial_sigma > 0.0)) fail("initial_state.sigma", "must be > 0");
    } else {
      fail("initial_state.kind", "expected \"single_site\" or \"gaussian\"");
    }
  }
  if (doc.contains("time_grid")) {
    const json& s = object_at(doc, "time_grid", "time_grid");
    reject_unknown(s, "time_grid", {"start", "stop", "points", "refine_revivals"});
    c.time_grid.start = number(s, "start", "time_grid", c.time_grid.start);
    c.time_grid.stop = number(s, "stop", "time_grid", c.time_grid.stop);
    c.time_grid.points = static_cast<int>(
        std::clamp<std::int64_t>(integer(s, "points", "time_grid", c.time_grid.points), -1, 10'000'000));
    c.time_grid.refine_revivals = boolean(s, "refine_revivals", "time_grid", false);
  }
  if (doc.contains("protocols")) {
    const json& v = doc.at("protocols");
    if (!v.is_array()) fail("protocols", "expected an array");
    c.protocols.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      c.protocols.push_back(parse_protocol(v[i], "protocols[" + std::to_string(i) + "]"));
    }
  }
  if (doc.contains("width_variance_mode")) c.width_mode = parse_width_mode(doc.at("width_variance_mode"));
  c.nu = static_cast<int>(std::clamp<std::int64_t>(integer(doc, "nu", "", c.nu), 0, 1'000'000'000));
  if (doc.contains("noise")) {
    const json& s = object_at(doc, "noise", "noise");
    reject_unknown(s, "noise", {"quadrature_order", "cases"});
    c.quadrature_order = static_cast<int>(
        std::clamp<std::int64_t>(integer(s, "quadrature_order", "noise", c.quadrature_order), 0, 1000));
    if (s.contains("cases")) {
      const json& cases = s.at("cases");
      if (!cases.is_array()) fail("noise.cases", "expected an array");
      for (std::size_t i = 0; i < cases.size(); ++i) {
        const std::string where = "noise.cases[" + std::to_string(i) + "]";
        if (!cases[i].is_object()) fail(where, "expected an object");
        reject_unknown(cases[i], where, {"relative_sigma", "lambda"});
        c.noise_cases.push_back({number(cases[i], "relative_sigma", where, 0.0),
                                 number(cases[i], "lambda", where, 0.0)});
      }
    }
  }
  if (doc.contains("sigma_grid")) {
    const json& s = object_at(doc, "sigma_grid", "sigma_grid");
    reject_unknown(s, "sigma_grid", {"time", "start", "stop", "points"});
    c.sigma_grid.time = number(s, "time", "sigma_grid", c.sigma_grid.time);
    c.sigma_grid.start = number(s, "start", "sigma_grid", c.sigma_grid.start);
    c.sigma_grid.stop = number(s, "stop", "sigma_grid", c.sigma_grid.stop);
    c.sigma_grid.points = static_cast<int>(
        std::clamp<std::int64_t>(integer(s, "points", "sigma_grid", c.sigma_grid.points), -1, 10'000'000));
  }
  if (doc.contains("design")) {
    const json& s = object_at(doc, "design", "design");
    reject_unknown(s, "design", {"tau", "mass_u", "atom_number"});
    c.design.tau = number(s, "tau", "design", c.design.tau);
    c.design.mass_u = number(s, "mass_u", "design", c.design.mass_u);
    c.design.atom_number = integer(s, "atom_number", "design", c.design.atom_number);
  }
  c.validate();
  return c;
}

json ScanConfig::to_json() const {
  json scen{{"hopping_ratio", scenario.hopping_ratio}, {"atom_number", scenario.atom_number}};
  if (scenario.physical) {
    scen["mass_u"] = scenario.physical->mass_u;
    scen["acceleration"] = scenario.physical->acceleration;
    scen["spacing"] = scenario.physical->spacing;
  }
  json initial = initial_sigma > 0.0 ? json{{"kind", "gaussian"}, {"sigma", initial_sigma}}
                                     : json{{"kind", "single_site"}};
  json protos = json::array();
  for (Protocol p : protocols) protos.push_back(std::string(protocol_name(p)));
  json cases = json::array();
  for (const auto& nc : noise_cases) cases.push_back({{"relative_sigma", nc.relative_sigma}, {"lambda", nc.lambda}});
  return json{
      {"schema_version", kSchemaVersion},
      {"scenario", scen},
      {"initial_state", initial},
      {"time_grid",
       {{"start", time_grid.start},
        {"stop", time_grid.stop},
        {"points", time_grid.points},
        {"refine_revivals", time_grid.refine_revivals}}},
      {"protocols", protos},
      {"width_variance_mode", std::string(width_mode_name(width_mode))},
      {"nu", nu},
      {"noise", {{"quadrature_order", quadrature_order}, {"cases", cases}}},
      {"sigma_grid",
       {{"time", sigma_grid.time},
        {"start", sigma_grid.start},
        {"stop", sigma_grid.stop},
        {"points", sigma_grid.points}}},
      {"design",
       {{"tau", design.tau}, {"mass_u", design.mass_u}, {"atom_number", design.atom_number}}},
  };
}

ScanConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("failed reading config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path.string() + "': malformed JSON: " + e.what());
  }
  return ScanConfig::from_json(doc);
}

}  // namespace sboi::scan
