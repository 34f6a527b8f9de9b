#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "metasymnet/expression.hpp"
#include "metasymnet/meta_network.hpp"

namespace metasymnet {

struct ExtractionRecord {
  enum class Decision { OperatorArgmax, LeafClosest };
  int node_id = 0;  // preorder index in the network
  Decision decision = Decision::OperatorArgmax;
  Symbol chosen;
  int left_var = -1;   // leaves: index of the strongest variable
  int right_var = -1;  // leaves: index of the second strongest
  std::vector<double> candidate_distance;  // leaves: |mean(candidate) - v|
};

struct ExtractionTrace {
  std::vector<ExtractionRecord> records;
  std::string to_json() const;
};

// Indices of the two largest entries (largest first); ties break toward the
// lower index, and a single entry pairs with itself.
std::pair<int, int> argmax2(std::span<const double> values);

// Collapses the network into a plain expression. Operator nodes take the
// argmax of their selection logits; leaves take the two strongest variables
// and the candidate whose probe-batch mean is closest to the leaf's own mean
// output, which is how leaves grow into operators. `max_nodes` suppresses
// leaf growth once the produced tree reaches that size.
std::pair<Expression, ExtractionTrace> extract_expression(
    const MetaNetwork& net, const Matrix& X_probe, const EvalPolicy& policy = {},
    double c = 1.0, int max_nodes = std::numeric_limits<int>::max());

// Completion structure for the next round: every expression node becomes a
// network node with fresh near-uniform logits and its (w, b) carried over;
// every unary operator gains a fresh second leaf so each operator node has
// two children. Fresh logits keep the structure search moving; a warm-start
// bias toward the previous symbols locks wrong choices in permanently.
MetaNetwork rebuild_network(const Expression& expr, int k, std::uint64_t seed);

// Forces every selection vector to margin-40 one-hot at its argmax, extracts,
// and returns the max over the batch of |network output - expression value|.
double saturate_and_check(const MetaNetwork& net, const Matrix& X,
                          const EvalPolicy& policy = {}, double c = 1.0);


}  // namespace metasymnet
