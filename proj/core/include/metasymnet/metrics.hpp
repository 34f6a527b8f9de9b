#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "metasymnet/benchmarks.hpp"
#include "metasymnet/expression.hpp"

namespace metasymnet {

// 1 - SS_res / SS_tot. Returns nullopt when y is constant (the denominator is
// undefined); throws std::invalid_argument on length mismatch or fewer than
// two samples.
std::optional<double> r_squared(std::span<const double> y, std::span<const double> yhat);

double mean_squared_error(std::span<const double> y, std::span<const double> yhat);

// Normalized tree edit distance min(1, ED / |truth|) over constant-masked
// trees; 0 only for structurally identical trees.
double ned(const Expression& pred, const Expression& truth);

// Automated recovery proxy: structural match (NED == 0), or R2 above
// 1 - 1e-10 on a dense fresh sample (10x the benchmark count, new seed) after
// constant refinement, with at most truth_size + 2 nodes.
bool is_recovered(const Expression& pred, const Expression& truth, const SamplingSpec& domain,
                  int k, std::uint64_t seed = 0x5eedF00dULL, const EvalPolicy& policy = {});

struct MetricReport {
  double r2 = 0.0;
  double mse = 0.0;
  double ned = 1.0;
  int node_count = 0;
  int evaluation_count = 0;
  bool recovered = false;
};

}  // namespace metasymnet
