#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "metasymnet/suite.hpp"

namespace {

using metasymnet::RunConfig;

void add_hyper_flags(CLI::App* cmd, metasymnet::Hyperparams& h) {
  cmd->add_option("--lambda", h.lambda, "Entropy loss coefficient");
  cmd->add_option("--alpha", h.alpha, "Learning rate");
  cmd->add_option("--nwb", h.n_wb, "(w, b) steps per outer iteration");
  cmd->add_option("--ndz", h.n_dz, "Selection-logit steps per outer iteration");
  cmd->add_option("--threshold", h.r2_threshold, "R2 stop threshold");
  cmd->add_option("--max-outer", h.max_outer_iters, "Outer iteration cap");
  cmd->add_option("--time-budget", h.time_budget_s, "Wall-clock budget per fit (seconds)");
  cmd->add_option("--temperature", h.c, "Softmax temperature");
  cmd->add_option("--depth", h.init_depth, "Initial network depth");
  cmd->add_option("--refine-iters", h.refine_iters, "Constant refinement iterations");
  cmd->add_option("--max-nodes", h.max_expression_nodes, "Expression size cap");
}

void add_common_flags(CLI::App* cmd, RunConfig& config, std::string& format) {
  cmd->add_option("--seed", config.master_seed, "Master seed")
      ->envname("METASYMNET_SEED");
  cmd->add_option("--parallelism", config.parallelism, "Worker thread count")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--entropy-loss,!--no-entropy-loss", config.entropy_loss,
                "Keep the entropy term (--no-entropy-loss sets lambda to 0)");
  cmd->add_option("--output,-o", config.output_path, "Write the report to a file");
  cmd->add_option("--format", format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  add_hyper_flags(cmd, config.hyper);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MetaSymNet symbolic regression: softmax-gated operator trees trained by "
               "alternating gradient descent and collapsed into closed-form expressions"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read defaults from a key=value file");

  RunConfig fit_config, bench_config, sweep_config;
  std::string fit_format = "json", bench_format = "csv", sweep_format = "csv";
  std::vector<std::string> fit_seeds;
  std::string fit_benchmark;

  CLI::App* fit = app.add_subcommand("fit", "Fit one dataset or benchmark");
  fit->add_option("--data", fit_config.data_path, "CSV dataset with header x1,...,xk,y");
  fit->add_option("--benchmark", fit_benchmark, "Registry benchmark name");
  fit->add_option("--seeds", fit_seeds, "Comma-separated seeds (one fit per seed)")
      ->delimiter(',');
  fit->add_flag("--trace", fit_config.trace, "Include the extraction trace in JSON output");
  add_common_flags(fit, fit_config, fit_format);

  CLI::App* bench = app.add_subcommand("benchmark", "Run a benchmark suite with metrics");
  bench->add_option("--names", bench_config.names, "Benchmark names or globs, e.g. 'Nguyen-*'")
      ->delimiter(',')
      ->required();
  bench->add_option("--repeats", bench_config.repeats, "Fits per benchmark")
      ->check(CLI::PositiveNumber);
  add_common_flags(bench, bench_config, bench_format);

  CLI::App* sweep = app.add_subcommand("noise-sweep", "Noise robustness sweep");
  sweep->add_option("--names", sweep_config.names, "Benchmark names or globs")
      ->delimiter(',')
      ->required();
  sweep->add_option("--repeats", sweep_config.repeats, "Fits per (benchmark, level)")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--levels", sweep_config.noise_levels, "Noise levels (fractions of span)")
      ->delimiter(',');
  add_common_flags(sweep, sweep_config, sweep_format);

  app.add_subcommand("list", "Print the registry benchmark names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return RunConfig::kExitError;
  }

  auto to_format = [](const std::string& f) {
    return f == "json" ? RunConfig::Format::Json : RunConfig::Format::Csv;
  };

  if (app.got_subcommand("fit")) {
    fit_config.command = RunConfig::Command::Fit;
    fit_config.format = to_format(fit_format);
    if (!fit_benchmark.empty()) fit_config.names = {fit_benchmark};
    for (const auto& s : fit_seeds) {
      try {
        fit_config.seeds.push_back(std::stoull(s));
      } catch (const std::exception&) {
        std::cerr << "error: bad seed '" << s << "'\n";
        return RunConfig::kExitError;
      }
    }
    if (fit_config.seeds.empty()) fit_config.seeds.push_back(fit_config.master_seed);
    return metasymnet::run_command(fit_config, std::cout, std::cerr);
  }
  if (app.got_subcommand("benchmark")) {
    bench_config.command = RunConfig::Command::Benchmark;
    bench_config.format = to_format(bench_format);
    return metasymnet::run_command(bench_config, std::cout, std::cerr);
  }
  if (app.got_subcommand("noise-sweep")) {
    sweep_config.command = RunConfig::Command::NoiseSweep;
    sweep_config.format = to_format(sweep_format);
    return metasymnet::run_command(sweep_config, std::cout, std::cerr);
  }
  RunConfig list_config;
  list_config.command = RunConfig::Command::List;
  return metasymnet::run_command(list_config, std::cout, std::cerr);
}
