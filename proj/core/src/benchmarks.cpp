#include "metasymnet/benchmarks.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "metasymnet/rng.hpp"
#include "text_util.hpp"

namespace metasymnet {

Matrix sample(const SamplingSpec& spec, int k) {
  if (spec.lo >= spec.hi) throw std::invalid_argument("sampling: need lo < hi");
  if (spec.count < 1) throw std::invalid_argument("sampling: need count >= 1");
  if (k < 1) throw std::invalid_argument("sampling: need k >= 1");

  Matrix X(spec.count, k);
  if (spec.kind == SamplingSpec::Kind::Uniform) {
    Rng rng(spec.seed);
    for (int i = 0; i < spec.count; ++i) {
      for (int j = 0; j < k; ++j) X(i, j) = rng.uniform(spec.lo, spec.hi);
    }
  } else {
    // One endpoint-inclusive grid, zipped across all variables.
    for (int i = 0; i < spec.count; ++i) {
      const double t = spec.count == 1
                           ? spec.lo
                           : spec.lo + (spec.hi - spec.lo) * i / (spec.count - 1);
      for (int j = 0; j < k; ++j) X(i, j) = t;
    }
  }
  return X;
}

Dataset realize(const BenchmarkEntry& entry, std::uint64_t seed, int count_multiplier) {
  if (count_multiplier < 1) throw std::invalid_argument("realize: multiplier must be >= 1");
  SamplingSpec spec = entry.spec;
  spec.seed = seed;
  spec.count *= count_multiplier;

  Dataset ds;
  ds.name = entry.name;
  ds.X = sample(spec, entry.k);
  ds.y.resize(static_cast<std::size_t>(ds.X.rows));
  const EvalPolicy policy;
  for (int i = 0; i < ds.X.rows; ++i) {
    ds.y[static_cast<std::size_t>(i)] = entry.expression.eval(ds.X.row(i), policy);
  }
  return ds;
}

std::vector<double> add_noise(std::span<const double> y, double level, std::uint64_t seed) {
  if (level < 0.0) throw std::invalid_argument("add_noise: level must be >= 0");
  std::vector<double> out(y.begin(), y.end());
  if (level == 0.0 || y.empty()) return out;

  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  const double span = std::abs(*hi - *lo);
  if (span == 0.0) return out;

  Rng rng(seed);
  for (double& v : out) v += rng.uniform(-level * span, level * span);
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, int row, int col) {
  std::string trimmed = cell;
  while (!trimmed.empty() && (trimmed.back() == '\r' || trimmed.back() == ' ')) trimmed.pop_back();
  std::size_t start = 0;
  while (start < trimmed.size() && trimmed[start] == ' ') ++start;
  trimmed = trimmed.substr(start);

  double v = 0.0;
  auto [ptr, ec] = std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), v);
  if (ec != std::errc{} || ptr != trimmed.data() + trimmed.size()) {
    throw std::invalid_argument("csv: non-numeric cell at row " + std::to_string(row) +
                                ", column " + std::to_string(col + 1));
  }
  if (!std::isfinite(v)) {
    throw std::invalid_argument("csv: non-finite cell at row " + std::to_string(row) +
                                ", column " + std::to_string(col + 1));
  }
  return v;
}

}  // namespace

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("csv: cannot open file '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("csv: empty file '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> header = split_csv_line(line);
  const int k = static_cast<int>(header.size()) - 1;
  if (k < 1) throw std::invalid_argument("csv: malformed header, expected 'x1,...,xk,y'");
  for (int j = 0; j < k; ++j) {
    if (header[static_cast<std::size_t>(j)] != "x" + std::to_string(j + 1)) {
      throw std::invalid_argument("csv: malformed header, column " + std::to_string(j + 1) +
                                  " should be 'x" + std::to_string(j + 1) + "'");
    }
  }
  if (header.back() != "y") {
    throw std::invalid_argument("csv: malformed header, last column should be 'y'");
  }

  std::vector<double> xs;
  std::vector<double> ys;
  int row = 1;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != k + 1) {
      throw std::invalid_argument("csv: row " + std::to_string(row) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(k + 1));
    }
    for (int j = 0; j < k; ++j) xs.push_back(parse_cell(cells[static_cast<std::size_t>(j)], row, j));
    ys.push_back(parse_cell(cells.back(), row, k));
  }
  if (ys.empty()) throw std::invalid_argument("csv: no data rows in '" + path + "'");

  Dataset ds;
  ds.name = path;
  ds.X.rows = static_cast<int>(ys.size());
  ds.X.cols = k;
  ds.X.data = std::move(xs);
  ds.y = std::move(ys);
  return ds;
}

void write_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("csv: cannot write file '" + path + "'");
  for (int j = 0; j < ds.k(); ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  for (int i = 0; i < ds.size(); ++i) {
    for (int j = 0; j < ds.k(); ++j) out << detail::format_double(ds.X(i, j)) << ',';
    out << detail::format_double(ds.y[static_cast<std::size_t>(i)]) << '\n';
  }
}

const BenchmarkEntry& get_benchmark(std::string_view name) {
  for (const auto& entry : benchmark_registry()) {
    if (entry.name == name) return entry;
  }
  throw std::invalid_argument("unknown benchmark '" + std::string(name) + "'");
}

std::vector<std::string> benchmark_names() {
  std::vector<std::string> names;
  for (const auto& entry : benchmark_registry()) names.push_back(entry.name);
  std::sort(names.begin(), names.end());
  return names;
}

namespace {

bool glob_match(std::string_view pattern, std::string_view text) {
  if (pattern.empty()) return text.empty();
  if (pattern[0] == '*') {
    for (std::size_t i = 0; i <= text.size(); ++i) {
      if (glob_match(pattern.substr(1), text.substr(i))) return true;
    }
    return false;
  }
  if (text.empty()) return false;
  if (pattern[0] != '?' && pattern[0] != text[0]) return false;
  return glob_match(pattern.substr(1), text.substr(1));
}

}  // namespace

std::vector<std::string> resolve_benchmarks(std::span<const std::string> patterns) {
  const std::vector<std::string> all = benchmark_names();
  std::vector<std::string> out;
  for (const auto& pattern : patterns) {
    bool any = false;
    if (pattern.find('*') == std::string::npos && pattern.find('?') == std::string::npos) {
      get_benchmark(pattern);  // throws on unknown
      if (std::find(out.begin(), out.end(), pattern) == out.end()) out.push_back(pattern);
      continue;
    }
    for (const auto& name : all) {
      if (glob_match(pattern, name)) {
        any = true;
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
      }
    }
    if (!any) throw std::invalid_argument("pattern '" + pattern + "' matches no benchmark");
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace metasymnet
