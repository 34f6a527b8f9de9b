#include "metasymnet/suite.hpp"

#include <algorithm>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "metasymnet/metrics.hpp"
#include "metasymnet/rng.hpp"
#include "text_util.hpp"

namespace metasymnet {

namespace {

using detail::format_double;

void run_tasks(int n, int parallelism, const std::function<void(int)>& fn) {
  if (parallelism <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min(parallelism, n);
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      int i;
      while ((i = next.fetch_add(1)) < n) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::string family_of(const std::string& name) {
  const auto dash = name.find('-');
  return dash == std::string::npos ? name : name.substr(0, dash);
}

struct Stats {
  int n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double v) {
    if (!std::isfinite(v)) return;
    ++n;
    const double d = v - mean;
    mean += d / n;
    m2 += d * (v - mean);
  }
  double stddev() const { return n > 1 ? std::sqrt(m2 / (n - 1)) : 0.0; }
};

struct BenchmarkRow {
  std::string benchmark;
  int repeat = 0;
  std::uint64_t seed = 0;
  double r2 = std::numeric_limits<double>::quiet_NaN();        // held-out
  double train_r2 = std::numeric_limits<double>::quiet_NaN();  // fit's own
  double mse = std::numeric_limits<double>::quiet_NaN();
  double ned = 1.0;
  int node_count = 0;
  int evaluation_count = 0;
  bool recovered = false;
  bool converged = false;
  double final_max_select_prob = 0.0;
  std::string status = "ok";
  std::string expression;

  static const char* header() {
    return "benchmark,repeat,seed,r2,train_r2,mse,ned,node_count,evaluation_count,"
           "recovered,converged,final_max_select_prob,status,expression";
  }
  std::string csv() const {
    std::string row = benchmark;
    row += ',' + std::to_string(repeat);
    row += ',' + std::to_string(seed);
    row += ',' + (std::isfinite(r2) ? format_double(r2) : std::string("nan"));
    row += ',' + (std::isfinite(train_r2) ? format_double(train_r2) : std::string("nan"));
    row += ',' + (std::isfinite(mse) ? format_double(mse) : std::string("nan"));
    row += ',' + format_double(ned);
    row += ',' + std::to_string(node_count);
    row += ',' + std::to_string(evaluation_count);
    row += std::string(",") + (recovered ? "true" : "false");
    row += std::string(",") + (converged ? "true" : "false");
    row += ',' + format_double(final_max_select_prob);
    row += ',' + status;
    row += ',' + expression;
    return row;
  }
  nlohmann::json json() const {
    nlohmann::json j;
    j["benchmark"] = benchmark;
    j["repeat"] = repeat;
    j["seed"] = seed;
    j["r2"] = std::isfinite(r2) ? nlohmann::json(r2) : nlohmann::json(nullptr);
    j["train_r2"] = std::isfinite(train_r2) ? nlohmann::json(train_r2) : nlohmann::json(nullptr);
    j["mse"] = std::isfinite(mse) ? nlohmann::json(mse) : nlohmann::json(nullptr);
    j["ned"] = ned;
    j["node_count"] = node_count;
    j["evaluation_count"] = evaluation_count;
    j["recovered"] = recovered;
    j["converged"] = converged;
    j["final_max_select_prob"] = final_max_select_prob;
    j["status"] = status;
    j["expression"] = expression;
    return j;
  }
};

Hyperparams effective_hyper(const RunConfig& config) {
  Hyperparams h = config.hyper;
  if (!config.entropy_loss) h.lambda = 0.0;
  return h;
}

std::ostream& open_output(const RunConfig& config, std::ofstream& file, std::ostream& fallback) {
  if (config.output_path.empty()) return fallback;
  file.open(config.output_path);
  if (!file) throw std::invalid_argument("cannot write output file '" + config.output_path + "'");
  return file;
}

}  // namespace

int cmd_list(std::ostream& out) {
  for (const auto& name : benchmark_names()) out << name << '\n';
  return RunConfig::kExitOk;
}

int cmd_fit(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const Hyperparams hyper = effective_hyper(config);
    hyper.validate();

    std::vector<std::uint64_t> seeds = config.seeds;
    if (seeds.empty()) seeds.push_back(config.master_seed);

    const bool from_file = !config.data_path.empty();
    if (from_file == !config.names.empty()) {
      err << "error: fit needs exactly one of --data or --benchmark\n";
      return RunConfig::kExitError;
    }

    Dataset file_data;
    const BenchmarkEntry* entry = nullptr;
    if (from_file) {
      file_data = load_csv(config.data_path);
    } else {
      entry = &get_benchmark(config.names.front());
    }

    std::vector<FitReport> reports(seeds.size());
    std::vector<std::string> failures(seeds.size());
    run_tasks(static_cast<int>(seeds.size()), config.parallelism, [&](int i) {
      try {
        const std::uint64_t seed = seeds[static_cast<std::size_t>(i)];
        const Dataset data = from_file ? file_data : realize(*entry, derive_seed(seed, 100));
        reports[static_cast<std::size_t>(i)] = alternating_fit(data, hyper, seed);
      } catch (const std::exception& e) {
        failures[static_cast<std::size_t>(i)] = e.what();
      }
    });
    for (const auto& f : failures) {
      if (!f.empty()) {
        err << "error: " << f << '\n';
        return RunConfig::kExitError;
      }
    }

    Stats r2s, nodes, evals, wall;
    int converged = 0;
    for (const auto& r : reports) {
      r2s.push(r.r2);
      nodes.push(r.node_count);
      evals.push(r.evaluation_count);
      wall.push(r.wall_time_s);
      converged += r.converged;
    }

    std::ofstream file;
    std::ostream& os = open_output(config, file, out);
    if (config.format == RunConfig::Format::Json) {
      nlohmann::json j;
      j["command"] = "fit";
      j["source"] = from_file ? config.data_path : config.names.front();
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& r : reports) rows.push_back(nlohmann::json::parse(r.to_json(config.trace)));
      j["reports"] = std::move(rows);
      j["aggregate"] = {{"mean_r2", r2s.mean},         {"std_r2", r2s.stddev()},
                        {"mean_node_count", nodes.mean}, {"mean_evaluation_count", evals.mean},
                        {"mean_wall_time_s", wall.mean}, {"converged_runs", converged},
                        {"runs", static_cast<int>(reports.size())}};
      os << j.dump(2) << '\n';
    } else {
      os << FitReport::csv_header() << '\n';
      for (const auto& r : reports) os << r.csv_row() << '\n';
      os << '\n';
      os << "runs,converged_runs,mean_r2,std_r2,mean_node_count,mean_evaluation_count,"
            "mean_wall_time_s\n";
      os << reports.size() << ',' << converged << ',' << format_double(r2s.mean) << ','
         << format_double(r2s.stddev()) << ',' << format_double(nodes.mean) << ','
         << format_double(evals.mean) << ',' << format_double(wall.mean) << '\n';
    }
    return converged > 0 ? RunConfig::kExitOk : RunConfig::kExitNoConverge;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return RunConfig::kExitError;
  }
}

int cmd_benchmark(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const Hyperparams hyper = effective_hyper(config);
    hyper.validate();
    if (config.names.empty()) {
      err << "error: benchmark needs --names\n";
      return RunConfig::kExitError;
    }
    const std::vector<std::string> names = resolve_benchmarks(config.names);
    const int repeats = config.repeats;
    const int n_tasks = static_cast<int>(names.size()) * repeats;

    std::vector<BenchmarkRow> rows(static_cast<std::size_t>(n_tasks));
    run_tasks(n_tasks, config.parallelism, [&](int t) {
      const int bi = t / repeats;
      const int rep = t % repeats;
      const std::uint64_t task_seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(t));
      BenchmarkRow& row = rows[static_cast<std::size_t>(t)];
      row.benchmark = names[static_cast<std::size_t>(bi)];
      row.repeat = rep;
      row.seed = task_seed;
      try {
        const BenchmarkEntry& entry = get_benchmark(row.benchmark);
        const Dataset train = realize(entry, derive_seed(task_seed, 1));
        const FitReport report = alternating_fit(train, hyper, derive_seed(task_seed, 2));
        const Dataset heldout = realize(entry, derive_seed(task_seed, 3), 10);
        const auto pred = report.expression.eval_rows(heldout.X);
        const auto r2h = r_squared(heldout.y, pred);
        row.r2 = r2h ? *r2h : std::numeric_limits<double>::quiet_NaN();
        row.train_r2 = report.r2;
        row.mse = mean_squared_error(heldout.y, pred);
        row.ned = ned(report.expression, entry.expression);
        row.node_count = report.node_count;
        row.evaluation_count = report.evaluation_count;
        row.recovered = is_recovered(report.expression, entry.expression, entry.spec, entry.k,
                                     derive_seed(task_seed, 4));
        row.converged = report.converged;
        row.final_max_select_prob = report.final_max_select_prob;
        row.expression = report.expression.to_prefix();
      } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
      }
    });

    // Aggregates keyed per benchmark and per family group, in first-seen order.
    struct Agg {
      std::string scope, name;
      Stats r2, nodes, evals, maxprob;
      int recovered = 0, runs = 0;
    };
    std::vector<Agg> aggs;
    auto agg_for = [&](const std::string& scope, const std::string& name) -> Agg& {
      for (auto& a : aggs) {
        if (a.scope == scope && a.name == name) return a;
      }
      aggs.push_back(Agg{scope, name, {}, {}, {}, {}, 0, 0});
      return aggs.back();
    };
    for (const auto& name : names) agg_for("benchmark", name);
    for (const auto& name : names) agg_for("group", family_of(name));
    auto update_agg = [](Agg& a, const BenchmarkRow& row) {
      a.r2.push(row.r2);
      a.nodes.push(row.node_count);
      a.evals.push(row.evaluation_count);
      a.maxprob.push(row.final_max_select_prob);
      a.recovered += row.recovered;
      a.runs += 1;
    };
    for (const auto& row : rows) {
      if (row.status != "ok") continue;
      update_agg(agg_for("benchmark", row.benchmark), row);
      update_agg(agg_for("group", family_of(row.benchmark)), row);
    }

    std::ofstream file;
    std::ostream& os = open_output(config, file, out);
    if (config.format == RunConfig::Format::Json) {
      nlohmann::json j;
      j["command"] = "benchmark";
      nlohmann::json jrows = nlohmann::json::array();
      for (const auto& row : rows) jrows.push_back(row.json());
      j["rows"] = std::move(jrows);
      nlohmann::json jaggs = nlohmann::json::array();
      for (const auto& a : aggs) {
        jaggs.push_back({{"scope", a.scope},
                         {"name", a.name},
                         {"runs", a.runs},
                         {"mean_r2", a.r2.mean},
                         {"std_r2", a.r2.stddev()},
                         {"mean_node_count", a.nodes.mean},
                         {"recovery_rate", a.runs > 0 ? static_cast<double>(a.recovered) / a.runs : 0.0},
                         {"mean_evaluation_count", a.evals.mean},
                         {"mean_final_max_select_prob", a.maxprob.mean}});
      }
      j["aggregates"] = std::move(jaggs);
      os << j.dump(2) << '\n';
    } else {
      os << BenchmarkRow::header() << '\n';
      for (const auto& row : rows) os << row.csv() << '\n';
      os << '\n';
      os << "scope,name,runs,mean_r2,std_r2,mean_node_count,recovery_rate,"
            "mean_evaluation_count,mean_final_max_select_prob\n";
      for (const auto& a : aggs) {
        os << a.scope << ',' << a.name << ',' << a.runs << ',' << format_double(a.r2.mean) << ','
           << format_double(a.r2.stddev()) << ',' << format_double(a.nodes.mean) << ','
           << format_double(a.runs > 0 ? static_cast<double>(a.recovered) / a.runs : 0.0) << ','
           << format_double(a.evals.mean) << ',' << format_double(a.maxprob.mean) << '\n';
      }
    }
    return RunConfig::kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return RunConfig::kExitError;
  }
}

int cmd_noise_sweep(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const Hyperparams hyper = effective_hyper(config);
    hyper.validate();
    if (config.names.empty()) {
      err << "error: noise-sweep needs --names\n";
      return RunConfig::kExitError;
    }
    for (double level : config.noise_levels) {
      if (level < 0.0) throw std::invalid_argument("noise level must be >= 0");
    }
    const std::vector<std::string> names = resolve_benchmarks(config.names);
    const int levels = static_cast<int>(config.noise_levels.size());
    const int repeats = config.repeats;
    const int n_tasks = static_cast<int>(names.size()) * levels * repeats;

    struct SweepRow {
      std::string benchmark;
      double level = 0.0;
      int repeat = 0;
      std::uint64_t seed = 0;
      double r2_clean = std::numeric_limits<double>::quiet_NaN();
      bool converged = false;
      int node_count = 0;
      std::string status = "ok";
      std::string expression;
    };
    std::vector<SweepRow> rows(static_cast<std::size_t>(n_tasks));

    run_tasks(n_tasks, config.parallelism, [&](int t) {
      const int bi = t / (levels * repeats);
      const int li = (t / repeats) % levels;
      const int rep = t % repeats;
      const std::uint64_t task_seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(t));
      SweepRow& row = rows[static_cast<std::size_t>(t)];
      row.benchmark = names[static_cast<std::size_t>(bi)];
      row.level = config.noise_levels[static_cast<std::size_t>(li)];
      row.repeat = rep;
      row.seed = task_seed;
      try {
        const BenchmarkEntry& entry = get_benchmark(row.benchmark);
        Dataset train = realize(entry, derive_seed(task_seed, 1));
        train.y = add_noise(train.y, row.level, derive_seed(task_seed, 5));
        const FitReport report = alternating_fit(train, hyper, derive_seed(task_seed, 2));
        // Score against the clean ground-truth curve: an even grid over the
        // domain for one input, a fresh uniform sample otherwise.
        Dataset heldout;
        if (entry.k == 1) {
          SamplingSpec grid = entry.spec;
          grid.kind = SamplingSpec::Kind::Even;
          heldout.X = sample(grid, entry.k);
          heldout.y.resize(static_cast<std::size_t>(heldout.X.rows));
          for (int i = 0; i < heldout.X.rows; ++i) {
            heldout.y[static_cast<std::size_t>(i)] = entry.expression.eval(heldout.X.row(i));
          }
        } else {
          heldout = realize(entry, derive_seed(task_seed, 3));
        }
        const auto pred = report.expression.eval_rows(heldout.X);
        const auto r2 = r_squared(heldout.y, pred);
        row.r2_clean = r2 ? *r2 : std::numeric_limits<double>::quiet_NaN();
        row.converged = report.converged;
        row.node_count = report.node_count;
        row.expression = report.expression.to_prefix();
      } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
      }
    });

    // Aggregates carry both the raw mean and a [0, 1]-clamped mean; a single
    // pole-crossing expression can push one raw R2 to a huge negative value
    // and make the level curve unreadable.
    struct LevelAgg {
      std::string benchmark;
      double level = 0.0;
      Stats r2;
      Stats r2_clamped;
      int runs = 0;
    };
    std::vector<LevelAgg> aggs;
    for (const auto& name : names) {
      for (double level : config.noise_levels) aggs.push_back({name, level, {}, {}, 0});
    }
    for (const auto& row : rows) {
      if (row.status != "ok") continue;
      for (auto& a : aggs) {
        if (a.benchmark == row.benchmark && a.level == row.level) {
          a.r2.push(row.r2_clean);
          a.r2_clamped.push(std::isfinite(row.r2_clean)
                                ? std::clamp(row.r2_clean, 0.0, 1.0)
                                : 0.0);
          a.runs += 1;
          break;
        }
      }
    }

    std::ofstream file;
    std::ostream& os = open_output(config, file, out);
    if (config.format == RunConfig::Format::Json) {
      nlohmann::json j;
      j["command"] = "noise-sweep";
      nlohmann::json jrows = nlohmann::json::array();
      for (const auto& row : rows) {
        jrows.push_back({{"benchmark", row.benchmark},
                         {"level", row.level},
                         {"repeat", row.repeat},
                         {"seed", row.seed},
                         {"r2_clean", std::isfinite(row.r2_clean) ? nlohmann::json(row.r2_clean)
                                                                  : nlohmann::json(nullptr)},
                         {"converged", row.converged},
                         {"node_count", row.node_count},
                         {"status", row.status},
                         {"expression", row.expression}});
      }
      j["rows"] = std::move(jrows);
      nlohmann::json jaggs = nlohmann::json::array();
      for (const auto& a : aggs) {
        jaggs.push_back({{"benchmark", a.benchmark},
                         {"level", a.level},
                         {"runs", a.runs},
                         {"mean_r2", a.r2.mean},
                         {"std_r2", a.r2.stddev()},
                         {"mean_r2_clamped", a.r2_clamped.mean}});
      }
      j["aggregates"] = std::move(jaggs);
      os << j.dump(2) << '\n';
    } else {
      os << "benchmark,level,repeat,seed,r2_clean,converged,node_count,status,expression\n";
      for (const auto& row : rows) {
        os << row.benchmark << ',' << format_double(row.level) << ',' << row.repeat << ','
           << row.seed << ','
           << (std::isfinite(row.r2_clean) ? format_double(row.r2_clean) : std::string("nan"))
           << ',' << (row.converged ? "true" : "false") << ',' << row.node_count << ','
           << row.status << ',' << row.expression << '\n';
      }
      os << '\n';
      os << "benchmark,level,runs,mean_r2,std_r2,mean_r2_clamped\n";
      for (const auto& a : aggs) {
        os << a.benchmark << ',' << format_double(a.level) << ',' << a.runs << ','
           << format_double(a.r2.mean) << ',' << format_double(a.r2.stddev()) << ','
           << format_double(a.r2_clamped.mean) << '\n';
      }
    }
    return RunConfig::kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return RunConfig::kExitError;
  }
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  switch (config.command) {
    case RunConfig::Command::Fit: return cmd_fit(config, out, err);
    case RunConfig::Command::Benchmark: return cmd_benchmark(config, out, err);
    case RunConfig::Command::NoiseSweep: return cmd_noise_sweep(config, out, err);
    case RunConfig::Command::List: return cmd_list(out);
  }
  return RunConfig::kExitError;
}

}  // namespace metasymnet
