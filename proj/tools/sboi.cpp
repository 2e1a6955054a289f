#include "sboi/errors.hpp"
#include "sboi/parallel.hpp"
#include "sboi/scan.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kNumerical = 3, kIo = 4 };

struct Options {
  std::string config;
  std::string out = "-";
  std::string format = "csv";
  int threads = sboi::default_thread_count();
};

void add_common(CLI::App* cmd, Options& opts) {
  cmd->add_option("--config", opts.config, "JSON scan configuration")->required();
  cmd->add_option("--out", opts.out, "output file, '-' for stdout")->capture_default_str();
  cmd->add_option("--format", opts.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--threads", opts.threads, "worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensitivity scans for a spatial Bloch-oscillation interferometer"};
  app.set_version_flag("--version", std::string(sboi::scan::kToolVersion));
  app.require_subcommand(1);

  Options opts;
  auto* time_scan = app.add_subcommand("time-scan", "sensitivity of each protocol against time");
  auto* sigma_scan = app.add_subcommand("sigma-scan", "sensitivity against initial Gaussian width");
  auto* noise_scan = app.add_subcommand("noise-scan", "width protocol under tunnelling noise and detector resolution");
  auto* design = app.add_subcommand("design", "design report for a coherence time");
  for (auto* cmd : {time_scan, sigma_scan, noise_scan, design}) add_common(cmd, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    namespace scan = sboi::scan;
    const auto format = scan::parse_format(opts.format);
    const auto config = scan::load_config(opts.config);
    scan::ResultTable table;
    if (time_scan->parsed()) {
      table = scan::run_time_scan(config, opts.threads);
    } else if (sigma_scan->parsed()) {
      table = scan::run_sigma_scan(config, config.sigma_grid, opts.threads);
    } else if (noise_scan->parsed()) {
      table = scan::run_noise_scan(config, opts.threads);
    } else {
      table = scan::run_design_report(config.design);
    }
    scan::emit(table, format, opts.out);
  } catch (const sboi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const sboi::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const sboi::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
