#include "sboi/errors.hpp"
#include "sboi/scan.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

using namespace sboi;
using namespace sboi::scan;
using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config_error(const json& doc) {
  try {
    ScanConfig::from_json(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

ScanConfig short_scan() {
  ScanConfig c;
  c.time_grid = {6.8, 7.2, 9, false};
  return c;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("defaults describe the reference time scan") {
  const auto c = ScanConfig::from_json(json{{"schema_version", 1}});
  CHECK(c.scenario.hopping_ratio == 1.0);
  CHECK(c.scenario.atom_number == 40000);
  CHECK(c.time_grid.start == 5.5);
  CHECK(c.time_grid.stop == 7.5);
  CHECK(c.time_grid.points == 201);
  CHECK(c.protocols.size() == 3);
  CHECK(c.initial_sigma == 0.0);
  CHECK(c.nu == 1);
}

TEST_CASE("configuration round-trips through JSON") {
  const json doc = json::parse(R"({
    "schema_version": 1,
    "scenario": {"hopping_ratio": 0.8, "atom_number": 1000, "mass_u": 87, "spacing": 5.32e-7},
    "initial_state": {"kind": "gaussian", "sigma": 1.5},
    "time_grid": {"start": 1, "stop": 2, "points": 11, "refine_revivals": true},
    "protocols": ["width", "qfi"],
    "width_variance_mode": "exact_multinomial",
    "nu": 3,
    "noise": {"quadrature_order": 30, "cases": [{"relative_sigma": 0.02, "lambda": 0.5}]},
    "sigma_grid": {"time": 6, "start": 0.5, "stop": 1, "points": 3},
    "design": {"tau": 2, "mass_u": 7, "atom_number": 500}
  })");
  const auto c = ScanConfig::from_json(doc);
  CHECK(c.scenario.physical.has_value());
  CHECK(c.scenario.physical->acceleration == constants::standard_gravity);
  CHECK(c.initial_sigma == 1.5);
  CHECK(c.protocols == std::vector<Protocol>{Protocol::width, Protocol::qfi});
  CHECK(c.width_mode == WidthVarianceMode::exact_multinomial);
  CHECK(c.noise_cases.size() == 1);
  CHECK(ScanConfig::from_json(c.to_json()).to_json() == c.to_json());
  const auto p = c.scenario.lattice();
  CHECK(p.hopping_ratio() == doctest::Approx(0.8));
  CHECK(p.tilt == doctest::Approx(87 * constants::atomic_mass_unit * constants::standard_gravity * 5.32e-7));
}

TEST_CASE("validation errors name the field") {
  CHECK(config_error(json::object()).find("schema_version") == 0);
  CHECK(config_error(json{{"schema_version", 2}}).find("schema_version") == 0);
  CHECK(config_error(json{{"schema_version", 1}, {"protocols", json::array()}}).find("protocols") == 0);
  CHECK(config_error(json{{"schema_version", 1}, {"protocols", {"qfi", "fit"}}}).find("protocols[1]") == 0);
  CHECK(config_error(json{{"schema_version", 1}, {"time_grid", {{"start", 7}, {"stop", 6}}}})
            .find("time_grid.stop") == 0);
  CHECK(config_error(json{{"schema_version", 1}, {"time_grid", {{"points", 1}}}}).find("time_grid.points") == 0);
  CHECK(config_error(json{{"schema_version", 1}, {"scenario", {{"atom_number", 0}}}})
            .find("scenario.atom_number") == 0);
  CHECK(config_error(json{{"schema_version", 1}, {"scenario", {{"tunnelling", 1}}}})
            .find("scenario.tunnelling: unknown key") == 0);
  CHECK(config_error(json{{"schema_version", 1}, {"initial_state", {{"kind", "gaussian"}}}})
            .find("initial_state.sigma") == 0);
  CHECK(config_error(json{{"schema_version", 1}, {"nu", 0}}).find("nu") == 0);
  CHECK(config_error(json{{"schema_version", 1}, {"noise", {{"cases", {{{"relative_sigma", 0.5}}}}}}})
            .find("noise.cases[0].relative_sigma") == 0);
  CHECK(config_error(json{{"schema_version", 1}, {"width_variance_mode", "rough"}}).find("width_variance_mode") == 0);
}

TEST_CASE("config files") {
  CHECK_THROWS_AS(load_config("/nonexistent-dir/none.json"), IoError);
  const auto path = std::filesystem::temp_directory_path() / "sboi_malformed.json";
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS(load_config(path), ConfigError);
  std::filesystem::remove(path);
  for (const char* name : {"reference_time_scan.json", "sigma_scan.json", "tunneling_noise_scan.json",
                           "resolution_scan.json", "design.json", "physical_time_scan.json"}) {
    CHECK_NOTHROW(load_config(std::filesystem::path(SBOI_CONFIG_DIR) / name));
  }
}

TEST_CASE("time grids") {
  const TimeGrid plain{5.5, 7.5, 201, false};
  const auto t = plain.times();
  REQUIRE(t.size() == 201);
  CHECK(t.front() == 5.5);
  CHECK(t.back() == 7.5);
  CHECK(t[150] == 7.0);

  const TimeGrid refined{5.5, 7.5, 201, true};
  const auto r = refined.times();
  CHECK(std::is_sorted(r.begin(), r.end()));
  CHECK(std::adjacent_find(r.begin(), r.end()) == r.end());
  CHECK(std::find(r.begin(), r.end(), 7.0) != r.end());
  std::size_t near7 = 0;
  for (double x : r) near7 += std::abs(x - 7.0) <= 0.05 + 1e-12;
  CHECK(near7 == 51);  // five times the 11 base points in [6.95, 7.05]
  CHECK(r.front() == 5.5);
  CHECK(r.back() == 7.5);
}

TEST_CASE("time scan table") {
  const auto table = run_time_scan(short_scan());
  CHECK(table.columns == std::vector<std::string>{"t_over_TB", "dg_over_g_qfi", "dg_over_g_ml", "dg_over_g_width"});
  REQUIRE(table.rows.size() == 9);
  for (const auto& row : table.rows) {
    CHECK(row.size() == 4);
    for (double v : row) CHECK(v > 0.0);
  }
  CHECK(table.rows[4][0] == doctest::Approx(7.0));
  CHECK(table.rows[4][2] == doctest::Approx(4.019e-5).epsilon(1e-3));
  CHECK(table.scenario.at("window").at("k_max").get<int>() > 0);
  CHECK(table.scenario.at("config") == short_scan().to_json());

  ScanConfig only_ml = short_scan();
  only_ml.protocols = {Protocol::ml};
  const auto one = run_time_scan(only_ml);
  CHECK(one.columns == std::vector<std::string>{"t_over_TB", "dg_over_g_ml"});
  const auto csv = lines(render(one, Format::csv));
  CHECK(csv[2] == "t_over_TB,dg_over_g_ml");
  CHECK(std::count(csv[3].begin(), csv[3].end(), ',') == 1);
}

TEST_CASE("physical inputs add SI columns") {
  ScanConfig c = short_scan();
  c.scenario.physical = PhysicalInputs{};
  c.protocols = {Protocol::qfi};
  const auto table = run_time_scan(c);
  CHECK(table.columns == std::vector<std::string>{"t_over_TB", "dg_over_g_qfi", "dg_qfi_m_s2"});
  CHECK(table.rows[0][2] == doctest::Approx(table.rows[0][1] * constants::standard_gravity));
}

TEST_CASE("a frozen lattice gives infinite population-based columns") {
  ScanConfig c = short_scan();
  c.scenario.hopping_ratio = 0.0;
  const auto table = run_time_scan(c);
  for (const auto& row : table.rows) {
    CHECK(std::isinf(row[2]));
    CHECK(std::isinf(row[3]));
  }
  const std::string csv = render(table, Format::csv);
  CHECK(csv.find(",inf") != std::string::npos);
  const json doc = json::parse(render(table, Format::json));
  CHECK(doc.at("rows")[0][2] == "inf");
}

TEST_CASE("sigma scan") {
  ScanConfig c;
  const SigmaGrid grid{7.0, 0.1, 3.0, 30};
  const auto table = run_sigma_scan(c, grid);
  CHECK(table.columns == std::vector<std::string>{"sigma", "dg_over_g_qfi", "dg_over_g_ml", "dg_over_g_width"});
  REQUIRE(table.rows.size() == 30);
  const auto& first = table.rows.front();
  const auto& last = table.rows.back();
  CHECK(last[1] < first[1]);
  CHECK(last[2] > first[2]);
  CHECK(first[2] == doctest::Approx(first[1]).epsilon(5e-3));
  // Narrow Gaussian against the single-site value.
  const auto single = run_time_scan(short_scan());
  CHECK(first[1] == doctest::Approx(single.rows[4][1]).epsilon(1e-6));
  CHECK(first[2] == doctest::Approx(single.rows[4][2]).epsilon(1e-6));
}

TEST_CASE("noise scan") {
  ScanConfig c = short_scan();
  CHECK_THROWS_AS(run_noise_scan(c), ConfigError);
  c.noise_cases = {{0.0, 0.0}, {0.01, 0.0}, {0.0, 1.0}};
  const auto table = run_noise_scan(c);
  CHECK(table.columns == std::vector<std::string>{"t_over_TB", "dg_over_g_width_sj0_lam0",
                                                  "dg_over_g_width_sj0.01_lam0", "dg_over_g_width_sj0_lam1"});
  CHECK(table.rows[4][3] / table.rows[4][1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));

  ScanConfig pure = short_scan();
  pure.noise_cases = {{0.0, 0.0}};
  const auto zero = run_noise_scan(pure);
  const auto reference = run_time_scan(short_scan());
  for (std::size_t i = 0; i < zero.rows.size(); ++i) CHECK(zero.rows[i][1] == reference.rows[i][3]);
}

TEST_CASE("design report table") {
  const auto table = run_design_report(DesignInputs{});
  REQUIRE(table.rows.size() == 1);
  CHECK(table.columns.size() == table.rows[0].size());
  CHECK(table.rows[0][5] == doctest::Approx(17.88e-6).epsilon(1e-3));
  CHECK_THROWS_AS(run_design_report(DesignInputs{-1.0, 39, 100}), ConfigError);
}

TEST_CASE("JSON output round-trips bit for bit") {
  ResultTable t;
  t.columns = {"t_over_TB", "x"};
  t.rows = {{0.1, 1.0 / 3.0}, {5e-324, 1.7976931348623157e308}, {-2.5e-17, std::numeric_limits<double>::infinity()}};
  t.scenario = json{{"note", "unit"}};
  const json doc = json::parse(render(t, Format::json));
  CHECK(doc.at("tool_version") == std::string(kToolVersion));
  CHECK(doc.at("columns") == json(t.columns));
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      const double back = doc.at("rows")[r][c].get<double>();
      CHECK(std::memcmp(&back, &t.rows[r][c], sizeof back) == 0);
    }
  }
  CHECK(doc.at("rows")[2][1] == "inf");
  CHECK(parse_format("json") == Format::json);
  CHECK_THROWS_AS(parse_format("xml"), ConfigError);
}

TEST_CASE("CSV layout") {
  const auto table = run_time_scan(short_scan());
  const auto csv = lines(render(table, Format::csv));
  REQUIRE(csv.size() == 3 + 9);
  CHECK(csv[0] == "# tool_version: sboi 1.0.0");
  CHECK(csv[1].rfind("# scenario: {", 0) == 0);
  CHECK(json::parse(csv[1].substr(std::strlen("# scenario: "))) == table.scenario);
  CHECK(csv[2] == "t_over_TB,dg_over_g_qfi,dg_over_g_ml,dg_over_g_width");
  CHECK(std::count(csv[3].begin(), csv[3].end(), ',') == 3);
}

TEST_CASE("emit writes files and reports failures with the path") {
  const auto table = run_design_report(DesignInputs{});
  const auto path = std::filesystem::temp_directory_path() / "sboi_emit_test.csv";
  emit(table, Format::csv, path);
  CHECK(read_file(path) == render(table, Format::csv));
  std::filesystem::remove(path);
  try {
    emit(table, Format::csv, "/nonexistent-dir/out.csv");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("/nonexistent-dir/out.csv") != std::string::npos);
  }
}

TEST_CASE("reference scan matches the frozen golden file") {
  const auto config = load_config(std::filesystem::path(SBOI_CONFIG_DIR) / "reference_time_scan.json");
  const std::string serial = render(run_time_scan(config, 1), Format::csv);
  CHECK(serial == render(run_time_scan(config, 4), Format::csv));
  CHECK(serial == read_file(std::filesystem::path(SBOI_GOLDEN_DIR) / "reference_time_scan.csv"));
}
