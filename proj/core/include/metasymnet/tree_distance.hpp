#pragma once

#include "metasymnet/expression.hpp"

namespace metasymnet {

// Ordered tree edit distance with unit insert/delete/relabel costs
// (Zhang-Shasha). Node labels are symbols only; the affine constants are
// masked and never influence the distance.
int tree_edit_distance(const Expression& a, const Expression& b);

}  // namespace metasymnet
