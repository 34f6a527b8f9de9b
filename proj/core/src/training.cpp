#include "metasymnet/training.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "metasymnet/evolution.hpp"
#include "metasymnet/metrics.hpp"
#include "metasymnet/rng.hpp"
#include "text_util.hpp"

namespace metasymnet {

namespace {

// Mutable mirror of an expression tree for constant refinement.
struct FlatExpr {
  struct FNode {
    Symbol symbol;
    double w = 1.0;
    double b = 0.0;
    int child0 = -1;
    int child1 = -1;
  };
  std::vector<FNode> nodes;  // preorder

  explicit FlatExpr(const Expression& e) { build(e.root()); }

  int build(const Expression::Node& n) {
    const int id = static_cast<int>(nodes.size());
    nodes.push_back({n.symbol, n.w, n.b, -1, -1});
    if (!n.children.empty()) {
      const int c0 = build(*n.children[0]);
      nodes[static_cast<std::size_t>(id)].child0 = c0;
    }
    if (n.children.size() == 2) {
      const int c1 = build(*n.children[1]);
      nodes[static_cast<std::size_t>(id)].child1 = c1;
    }
    return id;
  }

  Expression::NodePtr rebuild(int id) const {
    const FNode& f = nodes[static_cast<std::size_t>(id)];
    auto out = std::make_shared<Expression::Node>();
    out->symbol = f.symbol;
    out->w = f.w;
    out->b = f.b;
    if (f.child0 >= 0) out->children.push_back(rebuild(f.child0));
    if (f.child1 >= 0) out->children.push_back(rebuild(f.child1));
    return out;
  }

  Expression to_expression() const { return Expression::from_node(rebuild(0)); }
};

struct ExprScratch {
  std::vector<double> opval;  // operator value before the affine pair
  std::vector<double> out;    // capped node output
  std::vector<unsigned char> capped;
};

double eval_flat(const FlatExpr& f, int id, std::span<const double> x, const EvalPolicy& p,
                 ExprScratch& s) {
  const auto& n = f.nodes[static_cast<std::size_t>(id)];
  double v = 0.0;
  if (n.symbol.is_variable()) {
    v = x[static_cast<std::size_t>(n.symbol.variable_index())];
  } else if (n.symbol.is_unary()) {
    const double u = eval_flat(f, n.child0, x, p, s);
    switch (n.symbol.op_kind()) {
      case Op::Sin: v = std::sin(u); break;
      case Op::Cos: v = std::cos(u); break;
      case Op::Exp: v = protected_ops::exp(u, p); break;
      case Op::Log: v = protected_ops::log(u, p); break;
      default: v = protected_ops::sqrt(u); break;
    }
  } else {
    const double a = eval_flat(f, n.child0, x, p, s);
    const double b = eval_flat(f, n.child1, x, p, s);
    switch (n.symbol.op_kind()) {
      case Op::Add: v = a + b; break;
      case Op::Sub: v = a - b; break;
      case Op::Mul: v = a * b; break;
      default: v = protected_ops::div(a, b, p); break;
    }
  }
  const double raw = n.w * v + n.b;
  const double capped = protected_ops::cap(raw);
  s.opval[static_cast<std::size_t>(id)] = v;
  s.out[static_cast<std::size_t>(id)] = capped;
  s.capped[static_cast<std::size_t>(id)] = capped != raw;
  return capped;
}

void backprop_flat(const FlatExpr& f, int id, double g, const EvalPolicy& p,
                   const ExprScratch& s, std::vector<double>& gw, std::vector<double>& gb) {
  const auto& n = f.nodes[static_cast<std::size_t>(id)];
  if (s.capped[static_cast<std::size_t>(id)]) g = 0.0;
  gw[static_cast<std::size_t>(id)] += g * s.opval[static_cast<std::size_t>(id)];
  gb[static_cast<std::size_t>(id)] += g;
  if (n.symbol.is_variable()) return;

  const double gu = g * n.w;
  if (n.symbol.is_unary()) {
    const double u = s.out[static_cast<std::size_t>(n.child0)];
    double d = 0.0;
    switch (n.symbol.op_kind()) {
      case Op::Sin: d = std::cos(u); break;
      case Op::Cos: d = -std::sin(u); break;
      case Op::Exp: d = protected_ops::exp_du(u, p); break;
      case Op::Log: d = protected_ops::log_du(u, p); break;
      default: d = protected_ops::sqrt_du(u, p); break;
    }
    backprop_flat(f, n.child0, gu * d, p, s, gw, gb);
    return;
  }
  const double a = s.out[static_cast<std::size_t>(n.child0)];
  const double b = s.out[static_cast<std::size_t>(n.child1)];
  double da = 0.0, db = 0.0;
  switch (n.symbol.op_kind()) {
    case Op::Add: da = 1.0; db = 1.0; break;
    case Op::Sub: da = 1.0; db = -1.0; break;
    case Op::Mul: da = b; db = a; break;
    default:
      da = protected_ops::div_dnum(b, p);
      db = protected_ops::div_dden(a, b, p);
      break;
  }
  backprop_flat(f, n.child0, gu * da, p, s, gw, gb);
  backprop_flat(f, n.child1, gu * db, p, s, gw, gb);
}

double flat_mse(const FlatExpr& f, const Dataset& data, const EvalPolicy& p, ExprScratch& s) {
  double acc = 0.0;
  for (int i = 0; i < data.size(); ++i) {
    const double e = eval_flat(f, 0, data.X.row(i), p, s) - data.y[static_cast<std::size_t>(i)];
    acc += e * e;
  }
  return acc / data.size();
}

void flat_mse_grad(const FlatExpr& f, const Dataset& data, const EvalPolicy& p, ExprScratch& s,
                   std::vector<double>& gw, std::vector<double>& gb) {
  std::fill(gw.begin(), gw.end(), 0.0);
  std::fill(gb.begin(), gb.end(), 0.0);
  const int m = data.size();
  for (int i = 0; i < m; ++i) {
    const double out = eval_flat(f, 0, data.X.row(i), p, s);
    const double g = 2.0 / m * (out - data.y[static_cast<std::size_t>(i)]);
    backprop_flat(f, 0, g, p, s, gw, gb);
  }
}

}  // namespace

void Hyperparams::validate() const {
  if (lambda < 0.0) throw std::invalid_argument("hyperparams: lambda must be >= 0");
  if (n_wb < 1 || n_dz < 1) throw std::invalid_argument("hyperparams: step counts must be >= 1");
  if (r2_threshold <= 0.0 || r2_threshold > 1.0) {
    throw std::invalid_argument("hyperparams: r2 threshold must be in (0, 1]");
  }
  if (alpha <= 0.0) throw std::invalid_argument("hyperparams: alpha must be > 0");
  if (max_outer_iters < 1) throw std::invalid_argument("hyperparams: max_outer_iters must be >= 1");
  if (time_budget_s <= 0.0) throw std::invalid_argument("hyperparams: time budget must be > 0");
  if (c <= 0.0) throw std::invalid_argument("hyperparams: temperature must be > 0");
  if (init_depth < 1) throw std::invalid_argument("hyperparams: init depth must be >= 1");
  if (refine_iters < 0) throw std::invalid_argument("hyperparams: refine iters must be >= 0");
  if (max_expression_nodes < 1) {
    throw std::invalid_argument("hyperparams: max expression nodes must be >= 1");
  }
  if (grad_clip_norm < 0.0) throw std::invalid_argument("hyperparams: grad clip must be >= 0");
}

LossTerms loss(const MetaNetwork& net, const Matrix& X, std::span<const double> y,
               double lambda, double c, const EvalPolicy& policy) {
  if (X.rows == 0) throw std::invalid_argument("loss: empty dataset");
  if (static_cast<int>(y.size()) != X.rows) {
    throw std::invalid_argument("loss: X and y row counts differ");
  }
  auto [yhat, tape] = net.forward(X, policy, c);
  LossTerms terms;
  for (int i = 0; i < X.rows; ++i) {
    const double e = y[static_cast<std::size_t>(i)] - yhat[static_cast<std::size_t>(i)];
    terms.mse += e * e;
  }
  terms.mse /= X.rows;

  double ent = 0.0;
  int ops = 0;
  for (const auto& entry : tape.nodes) {
    if (entry.kind != NodeKind::Operator) continue;
    ent += std::log(*std::max_element(entry.weights.begin(), entry.weights.end()));
    ++ops;
  }
  terms.entropy = ops == 0 ? 0.0 : -lambda * ent / ops;
  terms.total = terms.mse + terms.entropy;
  return terms;
}

namespace {

// Rescales the group's gradient to max_norm when it exceeds it.
double clip_scale(const std::vector<std::vector<double> const*>& parts, double max_norm) {
  if (max_norm <= 0.0) return 1.0;
  double sq = 0.0;
  for (const auto* part : parts) {
    for (double v : *part) sq += v * v;
  }
  const double norm = std::sqrt(sq);
  return norm > max_norm ? max_norm / norm : 1.0;
}

}  // namespace

void optimize_group(MetaNetwork& net, ParamGroup group, int steps, double alpha,
                    const Matrix& X, std::span<const double> y, double lambda, double c,
                    const EvalPolicy& policy, double grad_clip_norm) {
  if (steps < 0) throw std::invalid_argument("optimize_group: steps must be >= 0");
  ParamView view = net.params();
  for (int step = 0; step < steps; ++step) {
    auto [yhat, tape] = net.forward(X, policy, c);
    (void)yhat;
    // The clip bounds the data-fit gradient, whose norm is unbounded through
    // the protected candidates. The entropy part is bounded by lambda*c/M per
    // node and goes in at full strength, so the sharpening pressure survives
    // even when the fit gradient is being rescaled.
    const Gradients g = net.backward(tape, y, 0.0);
    if (group == ParamGroup::WeightBias) {
      const double s = clip_scale({&g.w, &g.b}, grad_clip_norm) * alpha;
      for (std::size_t i = 0; i < view.w.size(); ++i) *view.w[i] -= s * g.w[i];
      for (std::size_t i = 0; i < view.b.size(); ++i) *view.b[i] -= s * g.b[i];
    } else {
      const double s = clip_scale({&g.z, &g.d}, grad_clip_norm) * alpha;
      for (std::size_t i = 0; i < view.z.size(); ++i) *view.z[i] -= s * g.z[i];
      for (std::size_t i = 0; i < view.d.size(); ++i) *view.d[i] -= s * g.d[i];
      if (lambda != 0.0) {
        int ops = 0;
        for (const auto& entry : tape.nodes) ops += entry.kind == NodeKind::Operator;
        const double scale = ops > 0 ? lambda * c / ops : 0.0;
        std::size_t zoff = 0;
        for (const auto& entry : tape.nodes) {
          if (entry.kind != NodeKind::Operator) continue;
          const std::size_t amax = static_cast<std::size_t>(
              std::max_element(entry.weights.begin(), entry.weights.end()) -
              entry.weights.begin());
          for (std::size_t a = 0; a < entry.weights.size(); ++a) {
            const double ge = -scale * ((a == amax ? 1.0 : 0.0) - entry.weights[a]);
            *view.z[zoff + a] -= alpha * ge;
          }
          zoff += entry.weights.size();
        }
      }
    }
  }
}

Expression refine_constants(const Expression& expr, const Dataset& data, int iters,
                            double alpha, const EvalPolicy& policy) {
  if (data.size() == 0) return expr;
  if (expr.max_variable_index() >= data.k()) {
    throw std::invalid_argument("refine_constants: expression uses more variables than the data has");
  }

  FlatExpr flat(expr);
  const int n = static_cast<int>(flat.nodes.size());
  ExprScratch scratch;
  scratch.opval.resize(static_cast<std::size_t>(n));
  scratch.out.resize(static_cast<std::size_t>(n));
  scratch.capped.resize(static_cast<std::size_t>(n));

  const double input_mse = flat_mse(flat, data, policy, scratch);
  auto params_of = [&] {
    std::vector<double> p(static_cast<std::size_t>(2 * n));
    for (int i = 0; i < n; ++i) {
      p[static_cast<std::size_t>(2 * i)] = flat.nodes[static_cast<std::size_t>(i)].w;
      p[static_cast<std::size_t>(2 * i + 1)] = flat.nodes[static_cast<std::size_t>(i)].b;
    }
    return p;
  };
  auto set_params = [&](const std::vector<double>& p) {
    for (int i = 0; i < n; ++i) {
      flat.nodes[static_cast<std::size_t>(i)].w = p[static_cast<std::size_t>(2 * i)];
      flat.nodes[static_cast<std::size_t>(i)].b = p[static_cast<std::size_t>(2 * i + 1)];
    }
  };

  std::vector<double> gw(static_cast<std::size_t>(n)), gb(static_cast<std::size_t>(n));

  struct DescentResult {
    std::vector<double> params;
    double mse = 0.0;
    double end_grad_norm = 0.0;
  };

  // Clipped gradient descent with backtracking from one starting point.
  auto descend = [&](std::vector<double> current) {
    set_params(current);
    double cur_mse = flat_mse(flat, data, policy, scratch);
    DescentResult res{current, cur_mse, 0.0};
    double step = alpha;
    const double max_step = alpha * 1e3;
    for (int it = 0; it < iters; ++it) {
      set_params(current);
      flat_mse_grad(flat, data, policy, scratch, gw, gb);
      double sq = 0.0;
      for (double v : gw) sq += v * v;
      for (double v : gb) sq += v * v;
      const double norm = std::sqrt(sq);
      res.end_grad_norm = norm;
      if (norm == 0.0) break;
      const double scale = (norm > 10.0 ? 10.0 / norm : 1.0) * step;
      std::vector<double> trial = current;
      for (int i = 0; i < n; ++i) {
        trial[static_cast<std::size_t>(2 * i)] -= scale * gw[static_cast<std::size_t>(i)];
        trial[static_cast<std::size_t>(2 * i + 1)] -= scale * gb[static_cast<std::size_t>(i)];
      }
      set_params(trial);
      const double trial_mse = flat_mse(flat, data, policy, scratch);
      if (std::isfinite(trial_mse) && trial_mse < cur_mse) {
        current = std::move(trial);
        cur_mse = trial_mse;
        if (cur_mse < res.mse) {
          res.params = current;
          res.mse = cur_mse;
        }
        step = std::min(step * 1.2, max_step);
      } else {
        step *= 0.5;
        if (step < 1e-18) break;
      }
    }
    return res;
  };

  // Two deterministic starts. Protected-op kinks can pin the carried
  // constants in a non-smooth point where backtracking stalls; the neutral
  // start (w=1, b=0 everywhere) is exact whenever the structure already
  // matches the target.
  DescentResult best = descend(params_of());
  {
    std::vector<double> neutral(static_cast<std::size_t>(2 * n));
    for (int i = 0; i < n; ++i) {
      neutral[static_cast<std::size_t>(2 * i)] = 1.0;
      neutral[static_cast<std::size_t>(2 * i + 1)] = 0.0;
    }
    const DescentResult alt = descend(std::move(neutral));
    if (alt.mse < best.mse) best = alt;
  }
  const std::vector<double>& best_params = best.params;
  const double best_mse = best.mse;

  if (best_mse >= input_mse) return expr;
  set_params(best_params);
  return flat.to_expression();
}

FitReport alternating_fit(const Dataset& data, const Hyperparams& hyper, std::uint64_t seed,
                          const EvalPolicy& policy) {
  hyper.validate();
  if (data.size() == 0) throw std::invalid_argument("alternating_fit: empty dataset");

  const auto start = std::chrono::steady_clock::now();
  auto elapsed_s = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  const int k = data.k();
  const double lambda = hyper.lambda;
  const double c = hyper.c;
  MetaNetwork net = MetaNetwork::init(k, InitSpec{hyper.init_depth}, derive_seed(seed, 0));

  FitReport report;
  report.seed = seed;
  double best_score = -std::numeric_limits<double>::infinity();
  bool best_degenerate = false;

  for (int outer = 1; outer <= hyper.max_outer_iters; ++outer) {
    optimize_group(net, ParamGroup::WeightBias, hyper.n_wb, hyper.alpha, data.X, data.y,
                   lambda, c, policy, hyper.grad_clip_norm);
    optimize_group(net, ParamGroup::SelectLogits, hyper.n_dz, hyper.alpha, data.X, data.y,
                   lambda, c, policy, hyper.grad_clip_norm);

    const LossTerms lt = loss(net, data.X, data.y, lambda, c, policy);
    report.loss_trace.push_back({outer, lt.total, lt.mse, lt.entropy});

    auto [raw_expr, trace] = extract_expression(net, data.X, policy, c,
                                                hyper.max_expression_nodes);
    report.evaluation_count += 1;
    report.final_max_select_prob = net.mean_max_select_prob(c);

    const Expression refined =
        refine_constants(raw_expr, data, hyper.refine_iters, hyper.alpha, policy);
    const std::vector<double> yhat = refined.eval_rows(data.X, policy);
    const auto r2 = r_squared(data.y, yhat);
    const double err = mean_squared_error(data.y, yhat);
    const double score = r2 ? *r2 : -err;

    if (score > best_score) {
      best_score = score;
      best_degenerate = !r2.has_value();
      report.expression = refined;
      report.mse = err;
      report.best_trace_json = trace.to_json();
    }
    if (r2 && *r2 > hyper.r2_threshold) {
      report.converged = true;
      break;
    }
    if (elapsed_s() > hyper.time_budget_s) break;
    if (outer < hyper.max_outer_iters) {
      net = rebuild_network(refined, k, derive_seed(seed, static_cast<std::uint64_t>(outer)));
    }
  }

  report.r2 = best_degenerate ? std::numeric_limits<double>::quiet_NaN() : best_score;
  report.node_count = report.expression.node_count();
  report.wall_time_s = elapsed_s();
  return report;
}

std::string FitReport::to_json(bool include_trace) const {
  nlohmann::json j;
  j["expression"] = expression.to_prefix();
  if (std::isfinite(r2)) {
    j["r2"] = r2;
  } else {
    j["r2"] = nullptr;
  }
  j["mse"] = mse;
  j["node_count"] = node_count;
  j["evaluation_count"] = evaluation_count;
  nlohmann::json trace_json = nlohmann::json::array();
  for (const auto& t : loss_trace) {
    trace_json.push_back({t.outer_iter, t.total, t.mse, t.entropy});
  }
  j["loss_trace"] = std::move(trace_json);
  j["wall_time_s"] = wall_time_s;
  j["seed"] = seed;
  j["converged"] = converged;
  j["final_max_select_prob"] = final_max_select_prob;
  if (include_trace && !best_trace_json.empty()) {
    j["extraction_trace"] = nlohmann::json::parse(best_trace_json);
  }
  return j.dump(2);
}

std::string FitReport::csv_header() {
  return "seed,r2,mse,node_count,evaluation_count,converged,final_max_select_prob,"
         "wall_time_s,expression";
}

std::string FitReport::csv_row() const {
  using detail::format_double;
  std::string row = std::to_string(seed);
  row += ',';
  row += std::isfinite(r2) ? format_double(r2) : "nan";
  row += ',' + format_double(mse);
  row += ',' + std::to_string(node_count);
  row += ',' + std::to_string(evaluation_count);
  row += ',';
  row += converged ? "true" : "false";
  row += ',' + format_double(final_max_select_prob);
  row += ',' + format_double(wall_time_s);
  row += ',' + expression.to_prefix();
  return row;
}

}  // namespace metasymnet
