#include "sboi/errors.hpp"
#include "sboi/parallel.hpp"
#include "sboi/scan.hpp"

#include <algorithm>
#include <cstdio>

namespace sboi::scan {

using nlohmann::json;

namespace {

json window_json(const SiteWindow& w) { return json{{"k_min", w.k_min}, {"k_max", w.k_max}}; }

json lattice_json(const LatticeParams& p) {
  return json{{"tunneling_J", p.tunneling},
              {"tilt_J", p.tilt},
              {"spacing_m", p.spacing},
              {"mass_kg", p.mass},
              {"acceleration_m_s2", p.acceleration},
              {"atom_number", p.atom_number},
              {"bloch_period_s", p.bloch_period()}};
}

json echo(const char* command, const ScanConfig& config, const LatticeParams& params,
          const SiteWindow& window) {
  return json{{"command", command},
              {"config", config.to_json()},
              {"lattice", lattice_json(params)},
              {"window", window_json(window)}};
}

std::string column_name(Protocol p) { return "dg_over_g_" + std::string(protocol_name(p)); }

ModeAmplitudes initial_state(double sigma, const SiteWindow& window) {
  return sigma > 0.0 ? gaussian_state(sigma, window) : single_site_state(window);
}

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

ResultTable run_time_scan(const ScanConfig& config, int threads) {
  config.validate();
  const LatticeParams params = config.scenario.lattice();
  const std::vector<double> times = config.time_grid.times();
  const SiteWindow window = choose_window(params, times.back(), config.initial_sigma);
  const Propagator prop(params, window);
  const ModeAmplitudes state0 = initial_state(config.initial_sigma, window);
  const ProtocolOptions options{config.width_mode, config.nu};
  const SensitivityCurve curve = sensitivity_curve(state0, prop, times, config.protocols, options, threads);

  ResultTable table;
  table.scenario = echo("time-scan", config, params, window);
  table.columns.push_back("t_over_TB");
  for (Protocol p : config.protocols) table.columns.push_back(column_name(p));
  const bool si = config.scenario.physical.has_value();
  if (si) {
    for (Protocol p : config.protocols) table.columns.push_back("dg_" + std::string(protocol_name(p)) + "_m_s2");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<double> row{times[i]};
    for (const auto& col : curve.dg_over_g) row.push_back(col[i]);
    if (si) {
      for (const auto& col : curve.dg_over_g) row.push_back(col[i] * params.acceleration);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

ResultTable run_sigma_scan(const ScanConfig& config, const SigmaGrid& grid, int threads) {
  ScanConfig resolved = config;
  resolved.sigma_grid = grid;
  resolved.validate();
  const LatticeParams params = resolved.scenario.lattice();
  const std::vector<double> sigmas = grid.values();
  const double widest = *std::max_element(sigmas.begin(), sigmas.end());
  const SiteWindow window = choose_window(params, std::max(grid.time, 1.0), widest);
  const Propagator prop(params, window);
  const ProtocolOptions options{resolved.width_mode, resolved.nu};

  std::vector<PointSensitivity> points(sigmas.size());
  parallel_for(sigmas.size(), threads, [&](std::size_t i) {
    points[i] = evaluate_point(gaussian_state(sigmas[i], window), prop, grid.time, options);
  });

  ResultTable table;
  table.scenario = echo("sigma-scan", resolved, params, window);
  table.columns.push_back("sigma");
  for (Protocol p : resolved.protocols) table.columns.push_back(column_name(p));
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    std::vector<double> row{sigmas[i]};
    for (Protocol p : resolved.protocols) row.push_back(points[i].get(p));
    table.rows.push_back(std::move(row));
  }
  return table;
}

ResultTable run_noise_scan(const ScanConfig& config, int threads) {
  config.validate();
  if (config.noise_cases.empty()) throw ConfigError("noise.cases: noise-scan needs at least one case");
  const LatticeParams params = config.scenario.lattice();
  const std::vector<double> times = config.time_grid.times();
  double largest = 0.0;
  for (const auto& c : config.noise_cases) largest = std::max(largest, c.relative_sigma);
  const SiteWindow window = mixture_window(params, TunnelingNoise{largest, config.quadrature_order},
                                           times.back(), config.initial_sigma);
  const ModeAmplitudes state0 = initial_state(config.initial_sigma, window);
  const ProtocolOptions options{config.width_mode, config.nu};

  ResultTable table;
  table.scenario = echo("noise-scan", config, params, window);
  table.columns.push_back("t_over_TB");
  std::vector<std::vector<double>> columns;
  for (const auto& c : config.noise_cases) {
    table.columns.push_back("dg_over_g_width_sj" + short_number(c.relative_sigma) + "_lam" +
                            short_number(c.lambda));
    const TunnelingMixture mixture(params, window, TunnelingNoise{c.relative_sigma, config.quadrature_order});
    columns.push_back(
        width_sensitivity_curve(state0, mixture, times, ResolutionModel{c.lambda}, options, threads)
            .dg_over_g.front());
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<double> row{times[i]};
    for (const auto& col : columns) row.push_back(col[i]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

ResultTable run_design_report(const DesignInputs& inputs) {
  ScanConfig check;
  check.design = inputs;
  check.validate();
  const auto r = analytic::design_report(inputs.tau, inputs.mass_u * constants::atomic_mass_unit,
                                         inputs.atom_number);
  ResultTable table;
  table.scenario = json{{"command", "design"},
                        {"design",
                         {{"tau", inputs.tau},
                          {"mass_u", inputs.mass_u},
                          {"atom_number", inputs.atom_number}}}};
  table.columns = {"tau_s",
                   "mass_kg",
                   "atom_number",
                   "g_min_m_s2",
                   "g_min_over_g_earth",
                   "optimal_spacing_m",
                   "bloch_period_s",
                   "relative_uncertainty",
                   "single_shot_dg_m_s2",
                   "single_shot_dg_over_g_earth"};
  table.rows.push_back({r.tau, r.mass, static_cast<double>(r.atom_number), r.g_min,
                        r.g_min / constants::standard_gravity, r.optimal_spacing, r.bloch_period,
                        r.relative_uncertainty, r.single_shot_dg, r.single_shot_dg_in_g});
  return table;
}

}  // namespace sboi::scan
