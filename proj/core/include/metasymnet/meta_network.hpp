#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "metasymnet/eval_policy.hpp"
#include "metasymnet/matrix.hpp"
#include "metasymnet/symbols.hpp"

namespace metasymnet {

struct InitSpec {
  int depth = 3;  // operator levels in the initial full binary tree
};

enum class NodeKind { Operator, Variable };

// A node of the differentiable tree. Operator nodes mix every library
// candidate under selection logits (length 9+k) and always own two children;
// variable leaves mix the input variables under logits of length k.
struct MetaNode {
  NodeKind kind = NodeKind::Variable;
  double w = 1.0;
  double b = 0.0;
  std::vector<double> logits;
  std::unique_ptr<MetaNode> left;
  std::unique_ptr<MetaNode> right;

  std::unique_ptr<MetaNode> clone() const;
};

// Gradient of the loss for every parameter, laid out exactly like
// MetaNetwork::params(): preorder node order, logits concatenated.
struct Gradients {
  std::vector<double> w;  // one per node
  std::vector<double> b;  // one per node
  std::vector<double> z;  // operator-node logits, concatenated
  std::vector<double> d;  // leaf logits, concatenated
};

// Mutable pointers into the network, grouped the same way.
struct ParamView {
  std::vector<double*> w;
  std::vector<double*> b;
  std::vector<double*> z;
  std::vector<double*> d;
};

struct TapeEntry {
  NodeKind kind;
  std::vector<double> weights;     // softmax selection weights (shared by all samples)
  std::vector<double> candidates;  // operator nodes: m x n row-major candidate values
  std::vector<double> left_in;     // operator nodes: left child output per sample
  std::vector<double> right_in;    // operator nodes: right child output per sample
  std::vector<double> mix;         // pre-affine mixture value per sample
  std::vector<double> out;         // capped node output per sample
  std::vector<unsigned char> capped;
};

// Forward cache for reverse mode; records the evaluation context so that
// backward() can recompute nothing.
struct ForwardTape {
  int m = 0;
  double c = 1.0;
  EvalPolicy policy;
  Matrix inputs;
  std::vector<TapeEntry> nodes;  // preorder
};

class MetaNetwork {
 public:
  MetaNetwork() = default;

  // Full binary tree of operator nodes to `depth`, variable leaves below.
  // Logits are N(0, 0.01); w=1, b=0. Deterministic per seed.
  static MetaNetwork init(int k, const InitSpec& spec, std::uint64_t seed);

  // Takes ownership of an existing tree (used by structure rebuilding).
  static MetaNetwork adopt(std::unique_ptr<MetaNode> root, int k);

  MetaNetwork(const MetaNetwork& other);
  MetaNetwork& operator=(const MetaNetwork& other);
  MetaNetwork(MetaNetwork&&) = default;
  MetaNetwork& operator=(MetaNetwork&&) = default;

  MetaNetwork snapshot() const { return *this; }

  bool empty() const { return root_ == nullptr; }
  int k() const { return k_; }
  int library_size() const { return kOperatorCount + k_; }
  int node_count() const;
  int operator_node_count() const;
  int leaf_count() const;
  const MetaNode& root() const { return *root_; }
  MetaNode& root() { return *root_; }

  ParamView params();

  // Mean predictions for the batch plus the reverse-mode cache.
  std::pair<std::vector<double>, ForwardTape> forward(const Matrix& X,
                                                      const EvalPolicy& policy = {},
                                                      double c = 1.0) const;

  // Exact reverse-mode gradients of MSE(y, yhat) + entropy term under the
  // tape's recorded policy and temperature. Throws if the tape does not match
  // this network or y.
  Gradients backward(const ForwardTape& tape, std::span<const double> y, double lambda) const;

  // Mean over operator nodes of the max selection weight; 1 when the network
  // has no operator nodes.
  double mean_max_select_prob(double c = 1.0) const;

 private:
  std::unique_ptr<MetaNode> root_;
  int k_ = 0;
};

// Selection weights for one node: softmax(c * (logits - max(logits))).
std::vector<double> selection_weights(std::span<const double> logits, double c);

}  // namespace metasymnet
