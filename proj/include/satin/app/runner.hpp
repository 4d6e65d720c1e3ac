#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "satin/app/config.hpp"
#include "satin/wigner.hpp"

namespace satin::app {

/// A result that is NaN or infinite.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

using Cell = std::variant<double, std::int64_t, std::string>;

/// One output table. Column names carry their unit in brackets.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct Summary {
  std::vector<std::pair<std::string, Cell>> entries;
  void add(const std::string& key, Cell value) { entries.emplace_back(key, std::move(value)); }
};

struct Report {
  Table table;
  Summary summary;
  /// Wigner grid, written beside the table when present.
  std::optional<SphereGrid> grid;
};

/// Runs the experiment described by cfg with `workers` threads. The result does not
/// depend on the worker count.
Report run_experiment(const ExperimentConfig& cfg, int workers);

/// Writes the report files and returns their paths. Throws NumericError before writing
/// anything if a value is not finite.
std::vector<std::filesystem::path> write_report(const ExperimentConfig& cfg, const Report& report);

/// Writes manifest.json into the output directory.
void write_manifest(const ExperimentConfig& cfg, const std::string& config_text, int workers, double wall_seconds,
                    const std::vector<std::filesystem::path>& outputs);

/// Version string of the build.
std::string artifact_version();

/// 64-bit FNV-1a hash.
std::uint64_t fnv1a64(const std::string& data);

/// Worker count from SATIN_WORKERS, or 1 when unset. Throws ConfigError when malformed.
int default_workers();

/// Evaluates fn(0..n-1) on up to `workers` threads and returns the results in index
/// order. The exception of the lowest failing index is rethrown.
template <class T>
std::vector<T> parallel_map(std::size_t n, int workers, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace satin::app
