#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metasymnet/eval_policy.hpp"
#include "metasymnet/matrix.hpp"
#include "metasymnet/symbols.hpp"

namespace metasymnet {

// Immutable expression tree over the symbol library. Every node carries an
// affine pair (w, b) applied to its operator value: node = w * op(children) + b.
// Nodes are shared, so copies are cheap and thread-safe.
class Expression {
 public:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  struct Node {
    Symbol symbol;
    double w = 1.0;
    double b = 0.0;
    std::vector<NodePtr> children;  // arity matches symbol kind
  };

  Expression() : Expression(variable(0)) {}

  static Expression variable(int index, double w = 1.0, double b = 0.0);
  static Expression unary(Op op, const Expression& operand, double w = 1.0, double b = 0.0);
  static Expression binary(Op op, const Expression& lhs, const Expression& rhs,
                           double w = 1.0, double b = 0.0);
  static Expression from_node(NodePtr node);

  const Node& root() const { return *root_; }
  NodePtr root_ptr() const { return root_; }

  // Protected evaluation; throws std::invalid_argument when x is shorter than
  // the largest variable index used by the tree.
  double eval(std::span<const double> x, const EvalPolicy& policy = {}) const;
  std::vector<double> eval_rows(const Matrix& X, const EvalPolicy& policy = {}) const;

  int node_count() const;
  int max_variable_index() const;

  // Space-separated prefix tokens; non-default constants appear as
  // "affine <w> <b>" wrappers in front of the node they belong to.
  std::string to_prefix() const;
  static Expression parse_prefix(std::string_view text, int k);

  bool structurally_equal(const Expression& other, bool compare_constants = true) const;

 private:
  explicit Expression(NodePtr root) : root_(std::move(root)) {}
  NodePtr root_;
};

}  // namespace metasymnet
