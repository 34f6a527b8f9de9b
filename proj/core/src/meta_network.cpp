#include "metasymnet/meta_network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "metasymnet/rng.hpp"

namespace metasymnet {

namespace {

constexpr double kLogitStd = 0.1;  // N(0, 0.01)

std::unique_ptr<MetaNode> build_full_tree(int k, int levels_left, Rng& rng) {
  auto node = std::make_unique<MetaNode>();
  if (levels_left == 0) {
    node->kind = NodeKind::Variable;
    node->logits.resize(static_cast<std::size_t>(k));
    for (double& v : node->logits) v = rng.normal(0.0, kLogitStd);
    return node;
  }
  node->kind = NodeKind::Operator;
  node->logits.resize(static_cast<std::size_t>(kOperatorCount + k));
  for (double& v : node->logits) v = rng.normal(0.0, kLogitStd);
  node->left = build_full_tree(k, levels_left - 1, rng);
  node->right = build_full_tree(k, levels_left - 1, rng);
  return node;
}

template <typename Fn>
void visit_preorder(MetaNode& node, Fn&& fn) {
  fn(node);
  if (node.left) visit_preorder(*node.left, fn);
  if (node.right) visit_preorder(*node.right, fn);
}

template <typename Fn>
void visit_preorder(const MetaNode& node, Fn&& fn) {
  fn(node);
  if (node.left) visit_preorder(*node.left, fn);
  if (node.right) visit_preorder(*node.right, fn);
}

}  // namespace

std::unique_ptr<MetaNode> MetaNode::clone() const {
  auto copy = std::make_unique<MetaNode>();
  copy->kind = kind;
  copy->w = w;
  copy->b = b;
  copy->logits = logits;
  if (left) copy->left = left->clone();
  if (right) copy->right = right->clone();
  return copy;
}

MetaNetwork MetaNetwork::init(int k, const InitSpec& spec, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("init_network: k must be >= 1");
  if (spec.depth < 1) throw std::invalid_argument("init_network: depth must be >= 1");
  Rng rng(seed);
  MetaNetwork net;
  net.k_ = k;
  net.root_ = build_full_tree(k, spec.depth, rng);
  return net;
}

MetaNetwork MetaNetwork::adopt(std::unique_ptr<MetaNode> root, int k) {
  if (!root) throw std::invalid_argument("adopt: null root");
  MetaNetwork net;
  net.k_ = k;
  net.root_ = std::move(root);
  return net;
}

MetaNetwork::MetaNetwork(const MetaNetwork& other) : k_(other.k_) {
  if (other.root_) root_ = other.root_->clone();
}

MetaNetwork& MetaNetwork::operator=(const MetaNetwork& other) {
  if (this != &other) {
    k_ = other.k_;
    root_ = other.root_ ? other.root_->clone() : nullptr;
  }
  return *this;
}

int MetaNetwork::node_count() const {
  int n = 0;
  if (root_) visit_preorder(*root_, [&](const MetaNode&) { ++n; });
  return n;
}

int MetaNetwork::operator_node_count() const {
  int n = 0;
  if (root_) {
    visit_preorder(*root_, [&](const MetaNode& m) { n += m.kind == NodeKind::Operator; });
  }
  return n;
}

int MetaNetwork::leaf_count() const {
  int n = 0;
  if (root_) {
    visit_preorder(*root_, [&](const MetaNode& m) { n += m.kind == NodeKind::Variable; });
  }
  return n;
}

ParamView MetaNetwork::params() {
  ParamView view;
  if (!root_) return view;
  visit_preorder(*root_, [&](MetaNode& m) {
    view.w.push_back(&m.w);
    view.b.push_back(&m.b);
    auto& dest = m.kind == NodeKind::Operator ? view.z : view.d;
    for (double& v : m.logits) dest.push_back(&v);
  });
  return view;
}

std::vector<double> selection_weights(std::span<const double> logits, double c) {
  if (logits.empty()) throw std::invalid_argument("selection_weights: empty logits");
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(c * (logits[i] - top));
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

namespace {

struct ForwardCtx {
  const Matrix* X;
  const EvalPolicy* policy;
  double c;
  ForwardTape* tape;
  int k;
  int next_id = 0;
};

// Fills the node's tape entry and returns its per-sample output.
const std::vector<double>& forward_node(const MetaNode& node, ForwardCtx& ctx) {
  const int id = ctx.next_id++;
  const int m = ctx.X->rows;
  const EvalPolicy& p = *ctx.policy;
  TapeEntry& entry = ctx.tape->nodes[static_cast<std::size_t>(id)];
  entry.kind = node.kind;
  entry.weights = selection_weights(node.logits, ctx.c);
  entry.mix.resize(static_cast<std::size_t>(m));
  entry.out.resize(static_cast<std::size_t>(m));
  entry.capped.assign(static_cast<std::size_t>(m), 0);

  if (node.kind == NodeKind::Variable) {
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int a = 0; a < ctx.k; ++a) s += entry.weights[static_cast<std::size_t>(a)] * (*ctx.X)(i, a);
      entry.mix[static_cast<std::size_t>(i)] = s;
    }
  } else {
    const std::vector<double>& l = forward_node(*node.left, ctx);
    const std::vector<double>& r = forward_node(*node.right, ctx);
    const int n = kOperatorCount + ctx.k;
    entry.left_in = l;
    entry.right_in = r;
    entry.candidates.resize(static_cast<std::size_t>(m) * n);
    for (int i = 0; i < m; ++i) {
      double* cand = entry.candidates.data() + static_cast<std::size_t>(i) * n;
      const double xl = l[static_cast<std::size_t>(i)];
      const double xr = r[static_cast<std::size_t>(i)];
      cand[0] = xl + xr;
      cand[1] = xl - xr;
      cand[2] = xl * xr;
      cand[3] = protected_ops::div(xl, xr, p);
      cand[4] = std::sin(xl);
      cand[5] = std::cos(xl);
      cand[6] = protected_ops::exp(xl, p);
      cand[7] = protected_ops::log(xl, p);
      cand[8] = protected_ops::sqrt(xl);
      for (int v = 0; v < ctx.k; ++v) cand[kOperatorCount + v] = (*ctx.X)(i, v);
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += entry.weights[static_cast<std::size_t>(j)] * cand[j];
      entry.mix[static_cast<std::size_t>(i)] = s;
    }
  }
  for (int i = 0; i < m; ++i) {
    const double raw = node.w * entry.mix[static_cast<std::size_t>(i)] + node.b;
    const double capped = protected_ops::cap(raw);
    entry.out[static_cast<std::size_t>(i)] = capped;
    entry.capped[static_cast<std::size_t>(i)] = capped != raw;
  }
  return entry.out;
}

struct BackwardCtx {
  const ForwardTape* tape;
  Gradients* grads;
  double lambda;
  int operator_nodes;
  int k;
  int next_id = 0;
  int wb_index = 0;
  int z_offset = 0;
  int d_offset = 0;
};

void backward_node(const MetaNode& node, BackwardCtx& ctx, const std::vector<double>& gout) {
  const int id = ctx.next_id++;
  const int wb = ctx.wb_index++;
  const TapeEntry& entry = ctx.tape->nodes[static_cast<std::size_t>(id)];
  const EvalPolicy& p = ctx.tape->policy;
  const double c = ctx.tape->c;
  const int m = ctx.tape->m;

  double gw = 0.0, gb = 0.0;
  std::vector<double> gmix(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double g = entry.capped[static_cast<std::size_t>(i)] ? 0.0 : gout[static_cast<std::size_t>(i)];
    gw += g * entry.mix[static_cast<std::size_t>(i)];
    gb += g;
    gmix[static_cast<std::size_t>(i)] = g * node.w;
  }
  ctx.grads->w[static_cast<std::size_t>(wb)] += gw;
  ctx.grads->b[static_cast<std::size_t>(wb)] += gb;

  if (node.kind == NodeKind::Variable) {
    const int off = ctx.d_offset;
    ctx.d_offset += ctx.k;
    for (int a = 0; a < ctx.k; ++a) {
      const double ea = entry.weights[static_cast<std::size_t>(a)];
      double acc = 0.0;
      for (int i = 0; i < m; ++i) {
        acc += gmix[static_cast<std::size_t>(i)] *
               (ctx.tape->inputs(i, a) - entry.mix[static_cast<std::size_t>(i)]);
      }
      ctx.grads->d[static_cast<std::size_t>(off + a)] += c * ea * acc;
    }
    return;
  }

  const int n = kOperatorCount + ctx.k;
  const int off = ctx.z_offset;
  ctx.z_offset += n;

  // Mixture path of the softmax Jacobian: dL/dz_a = c * e_a * sum_i g_i (O_ia - mix_i).
  for (int a = 0; a < n; ++a) {
    const double ea = entry.weights[static_cast<std::size_t>(a)];
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
      acc += gmix[static_cast<std::size_t>(i)] *
             (entry.candidates[static_cast<std::size_t>(i) * n + a] -
              entry.mix[static_cast<std::size_t>(i)]);
    }
    ctx.grads->z[static_cast<std::size_t>(off + a)] += c * ea * acc;
  }

  // Entropy path: d/dz_a of -lambda/M * log(e_amax) = -lambda*c/M * (1[a=amax] - e_a).
  if (ctx.lambda != 0.0 && ctx.operator_nodes > 0) {
    const int amax = static_cast<int>(
        std::max_element(entry.weights.begin(), entry.weights.end()) - entry.weights.begin());
    const double scale = ctx.lambda * c / ctx.operator_nodes;
    for (int a = 0; a < n; ++a) {
      ctx.grads->z[static_cast<std::size_t>(off + a)] -=
          scale * ((a == amax ? 1.0 : 0.0) - entry.weights[static_cast<std::size_t>(a)]);
    }
  }

  // Children receive weighted candidate derivatives.
  std::vector<double> gl(static_cast<std::size_t>(m), 0.0);
  std::vector<double> gr(static_cast<std::size_t>(m), 0.0);
  const auto& e = entry.weights;
  for (int i = 0; i < m; ++i) {
    const double g = gmix[static_cast<std::size_t>(i)];
    if (g == 0.0) continue;
    const double xl = entry.left_in[static_cast<std::size_t>(i)];
    const double xr = entry.right_in[static_cast<std::size_t>(i)];
    double dl = e[0] + e[1] + e[2] * xr + e[3] * protected_ops::div_dnum(xr, p) +
                e[4] * std::cos(xl) - e[5] * std::sin(xl) + e[6] * protected_ops::exp_du(xl, p) +
                e[7] * protected_ops::log_du(xl, p) + e[8] * protected_ops::sqrt_du(xl, p);
    double dr = e[0] - e[1] + e[2] * xl + e[3] * protected_ops::div_dden(xl, xr, p);
    gl[static_cast<std::size_t>(i)] = g * dl;
    gr[static_cast<std::size_t>(i)] = g * dr;
  }
  backward_node(*node.left, ctx, gl);
  backward_node(*node.right, ctx, gr);
}

}  // namespace

std::pair<std::vector<double>, ForwardTape> MetaNetwork::forward(const Matrix& X,
                                                                 const EvalPolicy& policy,
                                                                 double c) const {
  if (!root_) throw std::logic_error("forward: empty network");
  if (X.cols != k_) {
    throw std::invalid_argument("forward: input has " + std::to_string(X.cols) +
                                " columns, network expects " + std::to_string(k_));
  }
  ForwardTape tape;
  tape.m = X.rows;
  tape.c = c;
  tape.policy = policy;
  tape.inputs = X;
  tape.nodes.resize(static_cast<std::size_t>(node_count()));
  ForwardCtx ctx{&X, &policy, c, &tape, k_};
  std::vector<double> yhat = forward_node(*root_, ctx);
  return {std::move(yhat), std::move(tape)};
}

Gradients MetaNetwork::backward(const ForwardTape& tape, std::span<const double> y,
                                double lambda) const {
  if (!root_) throw std::logic_error("backward: empty network");
  if (static_cast<int>(tape.nodes.size()) != node_count() || tape.inputs.cols != k_) {
    throw std::invalid_argument("backward: tape does not match this network");
  }
  if (static_cast<int>(y.size()) != tape.m) {
    throw std::invalid_argument("backward: y length does not match the tape batch");
  }

  Gradients grads;
  const int nodes = node_count();
  const int ops = operator_node_count();
  grads.w.assign(static_cast<std::size_t>(nodes), 0.0);
  grads.b.assign(static_cast<std::size_t>(nodes), 0.0);
  grads.z.assign(static_cast<std::size_t>(ops) * (kOperatorCount + k_), 0.0);
  grads.d.assign(static_cast<std::size_t>(nodes - ops) * k_, 0.0);

  const int m = tape.m;
  std::vector<double> gout(static_cast<std::size_t>(m));
  const auto& root_out = tape.nodes[0].out;
  for (int i = 0; i < m; ++i) {
    gout[static_cast<std::size_t>(i)] =
        2.0 / m * (root_out[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)]);
  }

  BackwardCtx ctx{&tape, &grads, lambda, ops, k_};
  backward_node(*root_, ctx, gout);
  return grads;
}

double MetaNetwork::mean_max_select_prob(double c) const {
  if (!root_) return 1.0;
  double sum = 0.0;
  int ops = 0;
  visit_preorder(*root_, [&](const MetaNode& m) {
    if (m.kind != NodeKind::Operator) return;
    const auto w = selection_weights(m.logits, c);
    sum += *std::max_element(w.begin(), w.end());
    ++ops;
  });
  return ops == 0 ? 1.0 : sum / ops;
}

}  // namespace metasymnet
