#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "metasymnet/training.hpp"

namespace metasymnet {

// Shared configuration for the command line front end. Suite outputs contain
// only deterministic fields, so identical configs and seeds reproduce
// byte-identical rows at any parallelism.
struct RunConfig {
  enum class Command { Fit, Benchmark, NoiseSweep, List };
  enum class Format { Csv, Json };

  Command command = Command::Fit;
  std::string data_path;            // fit: CSV input
  std::vector<std::string> names;   // benchmark names or globs
  Hyperparams hyper;
  std::vector<std::uint64_t> seeds; // fit: one run per seed
  std::uint64_t master_seed = 0;    // suites: per-task seeds derive from this
  int repeats = 10;
  int parallelism = 1;
  bool entropy_loss = true;         // false forces lambda = 0
  std::vector<double> noise_levels = {0.00, 0.01, 0.02, 0.03, 0.04, 0.05,
                                      0.06, 0.07, 0.08, 0.09, 0.10};
  std::string output_path;          // empty = stdout
  Format format = Format::Csv;
  bool trace = false;

  static constexpr int kExitOk = 0;
  static constexpr int kExitError = 1;      // usage / IO / unknown name
  static constexpr int kExitNoConverge = 2; // fit: no seed converged
};

int cmd_fit(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_benchmark(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_noise_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_list(std::ostream& out);

// Dispatches on config.command and honors config.output_path.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace metasymnet
