#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "metasymnet/benchmarks.hpp"
#include "metasymnet/expression.hpp"
#include "metasymnet/meta_network.hpp"

namespace metasymnet {

struct Hyperparams {
  double lambda = 0.2;        // entropy coefficient
  int n_wb = 10;              // (w, b) steps per outer iteration
  int n_dz = 10;              // selection-logit steps per outer iteration
  double r2_threshold = 0.9999;
  double alpha = 0.01;        // learning rate
  int max_outer_iters = 2000;
  double time_budget_s = 60.0;
  double c = 1.0;             // softmax temperature
  int init_depth = 2;
  int refine_iters = 500;
  int max_expression_nodes = 80;
  // Per-group gradient l2-norm cap; 0 disables. Unclipped full-batch SGD
  // diverges through the protected-division candidates, so updates keep the
  // gradient direction but bound its magnitude.
  double grad_clip_norm = 10.0;

  void validate() const;  // throws std::invalid_argument
};

struct LossTerms {
  double total = 0.0;
  double mse = 0.0;
  double entropy = 0.0;
};

// MSE + entropy term: -lambda * mean over operator nodes of log(max weight).
LossTerms loss(const MetaNetwork& net, const Matrix& X, std::span<const double> y,
               double lambda, double c, const EvalPolicy& policy = {});

enum class ParamGroup { WeightBias, SelectLogits };

// Full-batch SGD on one parameter group only; the other group is untouched.
// When grad_clip_norm > 0 the group's gradient is rescaled to that l2 norm
// whenever it exceeds it.
void optimize_group(MetaNetwork& net, ParamGroup group, int steps, double alpha,
                    const Matrix& X, std::span<const double> y, double lambda, double c,
                    const EvalPolicy& policy = {}, double grad_clip_norm = 10.0);

struct TracePoint {
  int outer_iter = 0;
  double total = 0.0;
  double mse = 0.0;
  double entropy = 0.0;
};

struct FitReport {
  Expression expression;
  double r2 = 0.0;
  double mse = 0.0;
  int node_count = 0;
  int evaluation_count = 0;  // number of extraction events
  std::vector<TracePoint> loss_trace;
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;
  bool converged = false;
  // Mean over operator nodes of max selection weight at the last extraction.
  double final_max_select_prob = 1.0;
  std::string best_trace_json;  // extraction trace of the best expression

  std::string to_json(bool include_trace = false) const;
  static std::string csv_header();
  std::string csv_row() const;
};

// Alternating optimization: n_wb steps on (W,B), n_dz steps on (Z,D), extract,
// refine constants, score, rebuild, repeat until R2 > threshold or the budget
// runs out. Returns the best expression seen by R2.
FitReport alternating_fit(const Dataset& data, const Hyperparams& hyper, std::uint64_t seed,
                          const EvalPolicy& policy = {});

// Gradient descent on the expression's (w, b) constants with the structure
// frozen; never returns a higher-MSE expression than the input.
Expression refine_constants(const Expression& expr, const Dataset& data, int iters,
                            double alpha, const EvalPolicy& policy = {});

}  // namespace metasymnet
