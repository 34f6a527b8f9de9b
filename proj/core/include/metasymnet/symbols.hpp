#pragma once

#include <string>
#include <string_view>

namespace metasymnet {

// Operator part of the candidate library, in its fixed order.
enum class Op : int {
  Add = 0,
  Sub = 1,
  Mul = 2,
  Div = 3,
  Sin = 4,
  Cos = 5,
  Exp = 6,
  Log = 7,
  Sqrt = 8,
};

inline constexpr int kBinaryOps = 4;
inline constexpr int kUnaryOps = 5;
inline constexpr int kOperatorCount = kBinaryOps + kUnaryOps;

// One entry of the ordered candidate library [+, -, *, /, sin, cos, exp, log,
// sqrt, x1, ..., xk]. Ids 0..8 are operators; id 9+i is variable x_{i+1}.
class Symbol {
 public:
  constexpr Symbol() = default;

  static constexpr Symbol op(Op o) { return Symbol(static_cast<int>(o)); }
  static Symbol variable(int index);  // index >= 0
  static Symbol from_id(int id);      // id >= 0

  constexpr int id() const { return id_; }
  constexpr bool is_binary() const { return id_ < kBinaryOps; }
  constexpr bool is_unary() const { return id_ >= kBinaryOps && id_ < kOperatorCount; }
  constexpr bool is_operator() const { return id_ < kOperatorCount; }
  constexpr bool is_variable() const { return id_ >= kOperatorCount; }
  constexpr int arity() const { return is_binary() ? 2 : (is_unary() ? 1 : 0); }
  constexpr Op op_kind() const { return static_cast<Op>(id_); }
  constexpr int variable_index() const { return id_ - kOperatorCount; }

  friend constexpr bool operator==(Symbol a, Symbol b) { return a.id_ == b.id_; }
  friend constexpr bool operator!=(Symbol a, Symbol b) { return a.id_ != b.id_; }

 private:
  explicit constexpr Symbol(int id) : id_(id) {}
  int id_ = 0;
};

// Token spelling: "+", "-", "*", "/", "sin", ..., "x1", "x2", ...
std::string symbol_name(Symbol s);

// Index<->symbol mapping for a task with k input variables.
class SymbolLibrary {
 public:
  explicit SymbolLibrary(int k);  // k >= 1

  int k() const { return k_; }
  int size() const { return kOperatorCount + k_; }
  Symbol at(int index) const;  // throws std::out_of_range
  bool contains(Symbol s) const { return s.id() >= 0 && s.id() < size(); }
  std::string name(Symbol s) const;
  Symbol parse(std::string_view token) const;  // throws std::invalid_argument

 private:
  int k_;
};

}  // namespace metasymnet
