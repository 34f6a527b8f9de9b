#include "metasymnet/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "metasymnet/rng.hpp"

namespace metasymnet {

namespace {

constexpr double kLogitStd = 0.1;  // N(0, 0.01)
constexpr double kSatMargin = 40.0;

int subtree_size(const MetaNode& n) {
  int total = 1;
  if (n.left) total += subtree_size(*n.left);
  if (n.right) total += subtree_size(*n.right);
  return total;
}

int argmax_low(std::span<const double> v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(best)]) best = i;
  }
  return best;
}

struct ExtractCtx {
  const ForwardTape* tape;
  const Matrix* X;
  const EvalPolicy* policy;
  double c;
  int k;
  int max_nodes;
  ExtractionTrace* trace;
  int next_id = 0;
  int produced = 0;
};

Expression::NodePtr make_leaf(int var_index, double w, double b) {
  auto node = std::make_shared<Expression::Node>();
  node->symbol = Symbol::variable(var_index);
  node->w = w;
  node->b = b;
  return node;
}

struct LeafDecision {
  Symbol chosen;
  int il = 0;
  int ir = 0;
};

// Leaf rule: mean output v, strongest two variables, closest candidate by
// probe-batch mean; growth is suppressed once the produced tree would exceed
// the size cap. Fills the record's leaf fields.
LeafDecision decide_leaf(const MetaNode& node, const TapeEntry& entry, ExtractCtx& ctx,
                         ExtractionRecord& rec) {
  const int m = ctx.X->rows;
  double v = 0.0;
  for (double o : entry.out) v += o;
  v /= m;

  const auto [il, ir] = argmax2(node.logits);
  const int n = kOperatorCount + ctx.k;
  std::vector<double> means(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < m; ++i) {
    const double xl = (*ctx.X)(i, il);
    const double xr = (*ctx.X)(i, ir);
    means[0] += xl + xr;
    means[1] += xl - xr;
    means[2] += xl * xr;
    means[3] += protected_ops::div(xl, xr, *ctx.policy);
    means[4] += std::sin(xl);
    means[5] += std::cos(xl);
    means[6] += protected_ops::exp(xl, *ctx.policy);
    means[7] += protected_ops::log(xl, *ctx.policy);
    means[8] += protected_ops::sqrt(xl);
    for (int j = 0; j < ctx.k; ++j) means[static_cast<std::size_t>(kOperatorCount + j)] += (*ctx.X)(i, j);
  }
  for (double& mval : means) mval /= m;

  rec.decision = ExtractionRecord::Decision::LeafClosest;
  rec.left_var = il;
  rec.right_var = ir;
  rec.candidate_distance.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    rec.candidate_distance[static_cast<std::size_t>(j)] = std::abs(means[static_cast<std::size_t>(j)] - v);
  }
  int best = 0;
  for (int j = 1; j < n; ++j) {
    if (rec.candidate_distance[static_cast<std::size_t>(j)] <
        rec.candidate_distance[static_cast<std::size_t>(best)]) {
      best = j;
    }
  }
  Symbol chosen = Symbol::from_id(best);
  const int needed = 1 + chosen.arity();
  if (chosen.is_operator() && ctx.produced + needed > ctx.max_nodes) {
    chosen = Symbol::variable(il);
  }
  rec.chosen = chosen;
  return {chosen, il, ir};
}

Expression::NodePtr extract_node(const MetaNode& node, ExtractCtx& ctx) {
  const int id = ctx.next_id++;
  ExtractionRecord rec;
  rec.node_id = id;

  if (node.kind == NodeKind::Operator) {
    rec.decision = ExtractionRecord::Decision::OperatorArgmax;
    const Symbol chosen = Symbol::from_id(argmax_low(node.logits));
    rec.chosen = chosen;
    ctx.trace->records.push_back(rec);
    ctx.produced += 1;

    auto out = std::make_shared<Expression::Node>();
    out->symbol = chosen;
    out->w = node.w;
    out->b = node.b;
    if (chosen.is_binary()) {
      out->children.push_back(extract_node(*node.left, ctx));
      out->children.push_back(extract_node(*node.right, ctx));
    } else if (chosen.is_unary()) {
      out->children.push_back(extract_node(*node.left, ctx));
      ctx.next_id += subtree_size(*node.right);
    } else {
      // reduction: the subtree below collapses into this variable
      ctx.next_id += subtree_size(*node.left) + subtree_size(*node.right);
    }
    return out;
  }

  const TapeEntry& entry = ctx.tape->nodes[static_cast<std::size_t>(id)];
  const LeafDecision d = decide_leaf(node, entry, ctx, rec);
  ctx.trace->records.push_back(rec);
  ctx.produced += 1 + d.chosen.arity();

  if (d.chosen.is_variable()) return make_leaf(d.chosen.variable_index(), node.w, node.b);

  auto out = std::make_shared<Expression::Node>();
  out->symbol = d.chosen;
  out->w = node.w;
  out->b = node.b;
  out->children.push_back(make_leaf(d.il, 1.0, 0.0));
  if (d.chosen.is_binary()) out->children.push_back(make_leaf(d.ir, 1.0, 0.0));
  return out;
}

std::unique_ptr<MetaNode> fresh_leaf(int k, Rng& rng) {
  auto node = std::make_unique<MetaNode>();
  node->kind = NodeKind::Variable;
  node->logits.resize(static_cast<std::size_t>(k));
  for (double& v : node->logits) v = rng.normal(0.0, kLogitStd);
  return node;
}

std::unique_ptr<MetaNode> rebuild_node(const Expression::Node& e, int k, Rng& rng) {
  auto node = std::make_unique<MetaNode>();
  node->w = e.w;
  node->b = e.b;
  if (e.symbol.is_variable()) {
    node->kind = NodeKind::Variable;
    node->logits.resize(static_cast<std::size_t>(k));
    for (double& v : node->logits) v = rng.normal(0.0, kLogitStd);
    return node;
  }
  node->kind = NodeKind::Operator;
  node->logits.resize(static_cast<std::size_t>(kOperatorCount + k));
  for (double& v : node->logits) v = rng.normal(0.0, kLogitStd);
  node->left = rebuild_node(*e.children[0], k, rng);
  node->right = e.symbol.is_binary() ? rebuild_node(*e.children[1], k, rng) : fresh_leaf(k, rng);
  return node;
}

void saturate(MetaNode& node) {
  const int best = argmax_low(node.logits);
  std::fill(node.logits.begin(), node.logits.end(), 0.0);
  node.logits[static_cast<std::size_t>(best)] = kSatMargin;
  if (node.left) saturate(*node.left);
  if (node.right) saturate(*node.right);
}

}  // namespace

std::pair<int, int> argmax2(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax2: empty input");
  if (values.size() == 1) return {0, 0};
  const int first = argmax_low(values);
  int second = first == 0 ? 1 : 0;
  for (int i = 0; i < static_cast<int>(values.size()); ++i) {
    if (i == first) continue;
    if (values[static_cast<std::size_t>(i)] > values[static_cast<std::size_t>(second)]) second = i;
  }
  return {first, second};
}

std::pair<Expression, ExtractionTrace> extract_expression(const MetaNetwork& net,
                                                          const Matrix& X_probe,
                                                          const EvalPolicy& policy, double c,
                                                          int max_nodes) {
  auto [yhat, tape] = net.forward(X_probe, policy, c);
  (void)yhat;
  ExtractionTrace trace;
  ExtractCtx ctx{&tape, &X_probe, &policy, c, net.k(), max_nodes, &trace};
  Expression::NodePtr root = extract_node(net.root(), ctx);
  return {Expression::from_node(std::move(root)), std::move(trace)};
}

MetaNetwork rebuild_network(const Expression& expr, int k, std::uint64_t seed) {
  if (expr.max_variable_index() >= k) {
    throw std::invalid_argument("rebuild_network: expression uses more variables than k");
  }
  Rng rng(seed);
  return MetaNetwork::adopt(rebuild_node(expr.root(), k, rng), k);
}

double saturate_and_check(const MetaNetwork& net, const Matrix& X, const EvalPolicy& policy,
                          double c) {
  MetaNetwork sat = net.snapshot();
  saturate(sat.root());
  auto [yhat, tape] = sat.forward(X, policy, c);
  (void)tape;
  auto [expr, trace] = extract_expression(sat, X, policy, c);
  (void)trace;
  double dev = 0.0;
  for (int i = 0; i < X.rows; ++i) {
    dev = std::max(dev, std::abs(yhat[static_cast<std::size_t>(i)] - expr.eval(X.row(i), policy)));
  }
  return dev;
}

std::string ExtractionTrace::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json item;
    item["node_id"] = r.node_id;
    item["decision"] = r.decision == ExtractionRecord::Decision::OperatorArgmax
                           ? "operator-argmax"
                           : "leaf-top2-closest";
    item["chosen"] = symbol_name(r.chosen);
    if (r.decision == ExtractionRecord::Decision::LeafClosest) {
      item["left_var"] = r.left_var + 1;
      item["right_var"] = r.right_var + 1;
      item["candidate_distance"] = r.candidate_distance;
    }
    arr.push_back(std::move(item));
  }
  return arr.dump();
}

}  // namespace metasymnet
