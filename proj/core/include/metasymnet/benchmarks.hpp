#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metasymnet/expression.hpp"
#include "metasymnet/matrix.hpp"

namespace metasymnet {

// U(a, b, c): c uniform points per variable; E(a, b, c): c evenly spaced
// points per variable (endpoints inclusive), the same grid zipped across
// variables.
struct SamplingSpec {
  enum class Kind { Uniform, Even };
  Kind kind = Kind::Uniform;
  double lo = -1.0;
  double hi = 1.0;
  int count = 20;
  std::uint64_t seed = 0;

  static SamplingSpec uniform(double lo, double hi, int count, std::uint64_t seed = 0) {
    return {Kind::Uniform, lo, hi, count, seed};
  }
  static SamplingSpec even(double lo, double hi, int count) {
    return {Kind::Even, lo, hi, count, 0};
  }
};

struct Dataset {
  Matrix X;
  std::vector<double> y;
  std::string name;

  int k() const { return X.cols; }
  int size() const { return X.rows; }
};

Matrix sample(const SamplingSpec& spec, int k);

struct BenchmarkEntry {
  std::string name;
  Expression expression;  // ground truth
  SamplingSpec spec;
  int k = 1;
};

const std::vector<BenchmarkEntry>& benchmark_registry();
const BenchmarkEntry& get_benchmark(std::string_view name);  // throws on unknown name
std::vector<std::string> benchmark_names();                  // sorted ascending
// Expands '*' / '?' patterns against the registry; exact names pass through.
std::vector<std::string> resolve_benchmarks(std::span<const std::string> patterns);

// Samples X with the given seed and evaluates the ground truth for y.
// `count_multiplier` scales the sample count (held-out sets use 10x).
Dataset realize(const BenchmarkEntry& entry, std::uint64_t seed, int count_multiplier = 1);

// y + iid uniform noise on [-level*span(y), +level*span(y)].
std::vector<double> add_noise(std::span<const double> y, double level, std::uint64_t seed);

// CSV with header "x1,...,xk,y"; rejects non-numeric and non-finite cells.
Dataset load_csv(const std::string& path);
void write_csv(const Dataset& ds, const std::string& path);

}  // namespace metasymnet
