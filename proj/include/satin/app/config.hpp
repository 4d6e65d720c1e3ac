#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "satin/cavity.hpp"
#include "satin/noise.hpp"
#include "satin/protocol.hpp"

namespace satin::app {

inline constexpr int kSchemaVersion = 1;

enum class Mode { simulate, sweep_q, sweep_untwist, sweep_n, amplify, ramsey, wigner, allan, optimize };
enum class Format { csv, json };
enum class NoiseModel { none, budget, cavity };

/// Schema violation with the 1-based line it refers to (0 when unknown).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line) : std::runtime_error(message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct ExperimentConfig {
  Mode mode = Mode::simulate;
  std::optional<std::uint64_t> seed;

  CavityConfig cavity;
  DetuningSearch search;
  NoiseBudget noise;
  NoiseModel noise_model = NoiseModel::none;

  int n_atoms = 220;
  std::vector<int> n_list;
  std::vector<double> q_list;
  std::optional<double> q;
  std::optional<double> q_plus;
  std::vector<double> q_minus_list;
  std::vector<double> phi_list;
  int shots = 0;
  int resamples = 1000;
  ProtocolSequence sequence;
  std::string source = "both";
  bool ac_signal = true;
  int n_polar = 64;
  int n_azimuth = 128;
  double rotate_phi = 0.0;
  std::string grid_format = "csv";
  double sample_period = 1.0;

  std::string out_dir = ".";
  std::string name;
  Format format = Format::csv;
};

/// Parses and validates a config document. A seed override replaces the document's
/// seed before validation. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text, std::optional<std::uint64_t> seed_override = std::nullopt);

std::string mode_name(Mode mode);

}  // namespace satin::app
