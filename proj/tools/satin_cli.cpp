// Command-line front end: reads a JSON experiment config and writes result tables.

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "satin/app/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumeric = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace satin::app;

  CLI::App app{"SATIN metrology simulator"};
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
  app.add_option("--config", config_path, "Experiment config (JSON)")->required();
  app.add_option("--seed", seed, "Root seed, overrides the config");
  app.add_option("--workers", workers, "Worker threads (default: $SATIN_WORKERS or 1)")->check(CLI::Range(1, 1024));
  app.add_option("--out", out_dir, "Output directory, overrides the config");
  app.add_option("--format", format, "Table format, overrides the config")->check(CLI::IsMember({"csv", "json"}));
  app.set_version_flag("--version", artifact_version());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  std::string text;
  try {
    text = read_file(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    ExperimentConfig cfg = parse_config(text, seed);
    if (out_dir) cfg.out_dir = *out_dir;
    if (format) cfg.format = *format == "json" ? Format::json : Format::csv;
    const int n_workers = workers ? *workers : default_workers();

    const Report report = run_experiment(cfg, n_workers);
    const auto outputs = write_report(cfg, report);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(cfg, text, n_workers, wall, outputs);
    for (const auto& p : outputs) std::cout << p.string() << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << config_path << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const satin::NoSolutionError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
}
