#include "metasymnet/tree_distance.hpp"

#include <algorithm>
#include <vector>

namespace metasymnet {

namespace {

// Postorder flattening with leftmost-leaf indices, as Zhang-Shasha needs.
struct FlatTree {
  std::vector<int> label;    // symbol id per postorder position
  std::vector<int> leftmost; // postorder index of the leftmost leaf of each subtree
  std::vector<int> keyroots;
};

int flatten(const Expression::Node& n, FlatTree& f) {
  int first_leaf = -1;
  for (const auto& c : n.children) {
    const int child_leftmost = flatten(*c, f);
    if (first_leaf < 0) first_leaf = child_leftmost;
  }
  const int index = static_cast<int>(f.label.size());
  if (first_leaf < 0) first_leaf = index;
  f.label.push_back(n.symbol.id());
  f.leftmost.push_back(first_leaf);
  return first_leaf;
}

FlatTree make_flat(const Expression& e) {
  FlatTree f;
  flatten(e.root(), f);
  const int n = static_cast<int>(f.label.size());
  // keyroots: nodes with no proper ancestor sharing their leftmost leaf
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int i = n - 1; i >= 0; --i) {
    if (!seen[static_cast<std::size_t>(f.leftmost[i])]) {
      f.keyroots.push_back(i);
      seen[static_cast<std::size_t>(f.leftmost[i])] = 1;
    }
  }
  std::sort(f.keyroots.begin(), f.keyroots.end());
  return f;
}

}  // namespace

int tree_edit_distance(const Expression& a, const Expression& b) {
  const FlatTree ta = make_flat(a);
  const FlatTree tb = make_flat(b);
  const int na = static_cast<int>(ta.label.size());
  const int nb = static_cast<int>(tb.label.size());

  std::vector<std::vector<int>> td(static_cast<std::size_t>(na),
                                   std::vector<int>(static_cast<std::size_t>(nb), 0));
  std::vector<std::vector<int>> fd;

  for (int i : ta.keyroots) {
    for (int j : tb.keyroots) {
      const int li = ta.leftmost[i];
      const int lj = tb.leftmost[j];
      const int rows = i - li + 2;
      const int cols = j - lj + 2;
      fd.assign(static_cast<std::size_t>(rows), std::vector<int>(static_cast<std::size_t>(cols), 0));
      for (int s = 1; s < rows; ++s) fd[s][0] = fd[s - 1][0] + 1;
      for (int t = 1; t < cols; ++t) fd[0][t] = fd[0][t - 1] + 1;
      for (int s = 1; s < rows; ++s) {
        const int ni = li + s - 1;  // postorder node in a
        for (int t = 1; t < cols; ++t) {
          const int nj = lj + t - 1;  // postorder node in b
          if (ta.leftmost[ni] == li && tb.leftmost[nj] == lj) {
            const int relabel = ta.label[ni] == tb.label[nj] ? 0 : 1;
            fd[s][t] = std::min({fd[s - 1][t] + 1, fd[s][t - 1] + 1, fd[s - 1][t - 1] + relabel});
            td[ni][nj] = fd[s][t];
          } else {
            const int ps = ta.leftmost[ni] - li;  // forest prefix sizes
            const int pt = tb.leftmost[nj] - lj;
            fd[s][t] = std::min({fd[s - 1][t] + 1, fd[s][t - 1] + 1, fd[ps][pt] + td[ni][nj]});
          }
        }
      }
    }
  }
  return td[static_cast<std::size_t>(na - 1)][static_cast<std::size_t>(nb - 1)];
}

}  // namespace metasymnet
