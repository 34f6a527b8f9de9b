#include "metasymnet/expression.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

namespace metasymnet {

namespace {

double eval_node(const Expression::Node& n, std::span<const double> x, const EvalPolicy& p) {
  double v = 0.0;
  if (n.symbol.is_variable()) {
    const int idx = n.symbol.variable_index();
    if (idx >= static_cast<int>(x.size())) {
      throw std::invalid_argument("dimension mismatch: expression uses x" +
                                  std::to_string(idx + 1) + " but input has " +
                                  std::to_string(x.size()) + " columns");
    }
    v = x[idx];
  } else if (n.symbol.is_unary()) {
    const double u = eval_node(*n.children[0], x, p);
    switch (n.symbol.op_kind()) {
      case Op::Sin: v = std::sin(u); break;
      case Op::Cos: v = std::cos(u); break;
      case Op::Exp: v = protected_ops::exp(u, p); break;
      case Op::Log: v = protected_ops::log(u, p); break;
      case Op::Sqrt: v = protected_ops::sqrt(u); break;
      default: throw std::logic_error("bad unary op");
    }
  } else {
    const double a = eval_node(*n.children[0], x, p);
    const double b = eval_node(*n.children[1], x, p);
    switch (n.symbol.op_kind()) {
      case Op::Add: v = a + b; break;
      case Op::Sub: v = a - b; break;
      case Op::Mul: v = a * b; break;
      case Op::Div: v = protected_ops::div(a, b, p); break;
      default: throw std::logic_error("bad binary op");
    }
  }
  return protected_ops::cap(n.w * v + n.b);
}

int count_nodes(const Expression::Node& n) {
  int total = 1;
  for (const auto& c : n.children) total += count_nodes(*c);
  return total;
}

int max_var(const Expression::Node& n) {
  int m = n.symbol.is_variable() ? n.symbol.variable_index() : -1;
  for (const auto& c : n.children) m = std::max(m, max_var(*c));
  return m;
}

bool nodes_equal(const Expression::Node& a, const Expression::Node& b, bool constants) {
  if (a.symbol != b.symbol) return false;
  if (constants && (a.w != b.w || a.b != b.b)) return false;
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!nodes_equal(*a.children[i], *b.children[i], constants)) return false;
  }
  return true;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_prefix(const Expression::Node& n, std::string& out) {
  if (!out.empty()) out += ' ';
  if (n.w != 1.0 || n.b != 0.0) {
    out += "affine " + format_double(n.w) + ' ' + format_double(n.b) + ' ';
  }
  out += symbol_name(n.symbol);
  for (const auto& c : n.children) write_prefix(*c, out);
}

struct TokenStream {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;

  bool done() const { return pos >= tokens.size(); }
  std::string_view next() {
    if (done()) throw std::invalid_argument("prefix parse: missing operand");
    return tokens[pos++];
  }
};

double parse_number(std::string_view tok) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw std::invalid_argument("prefix parse: expected numeric literal, got '" +
                                std::string(tok) + "'");
  }
  return v;
}

Expression::NodePtr parse_node(TokenStream& ts, const SymbolLibrary& lib) {
  std::string_view tok = ts.next();
  double w = 1.0, b = 0.0;
  if (tok == "affine") {
    w = parse_number(ts.next());
    b = parse_number(ts.next());
    tok = ts.next();
  }
  const Symbol sym = lib.parse(tok);
  auto node = std::make_shared<Expression::Node>();
  node->symbol = sym;
  node->w = w;
  node->b = b;
  for (int i = 0; i < sym.arity(); ++i) node->children.push_back(parse_node(ts, lib));
  return node;
}

}  // namespace

Expression Expression::variable(int index, double w, double b) {
  auto node = std::make_shared<Node>();
  node->symbol = Symbol::variable(index);
  node->w = w;
  node->b = b;
  return Expression(std::move(node));
}

Expression Expression::unary(Op op, const Expression& operand, double w, double b) {
  const Symbol sym = Symbol::op(op);
  if (!sym.is_unary()) throw std::invalid_argument("symbol is not a unary operator");
  auto node = std::make_shared<Node>();
  node->symbol = sym;
  node->w = w;
  node->b = b;
  node->children = {operand.root_};
  return Expression(std::move(node));
}

Expression Expression::binary(Op op, const Expression& lhs, const Expression& rhs,
                              double w, double b) {
  const Symbol sym = Symbol::op(op);
  if (!sym.is_binary()) throw std::invalid_argument("symbol is not a binary operator");
  auto node = std::make_shared<Node>();
  node->symbol = sym;
  node->w = w;
  node->b = b;
  node->children = {lhs.root_, rhs.root_};
  return Expression(std::move(node));
}

Expression Expression::from_node(NodePtr node) {
  if (!node) throw std::invalid_argument("null expression node");
  return Expression(std::move(node));
}

double Expression::eval(std::span<const double> x, const EvalPolicy& policy) const {
  return eval_node(*root_, x, policy);
}

std::vector<double> Expression::eval_rows(const Matrix& X, const EvalPolicy& policy) const {
  std::vector<double> out(static_cast<std::size_t>(X.rows));
  for (int i = 0; i < X.rows; ++i) out[static_cast<std::size_t>(i)] = eval(X.row(i), policy);
  return out;
}

int Expression::node_count() const { return count_nodes(*root_); }

int Expression::max_variable_index() const { return max_var(*root_); }

std::string Expression::to_prefix() const {
  std::string out;
  write_prefix(*root_, out);
  return out;
}

Expression Expression::parse_prefix(std::string_view text, int k) {
  SymbolLibrary lib(k);
  TokenStream ts;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\n')) ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t' && text[j] != '\n') ++j;
    if (j > i) ts.tokens.push_back(text.substr(i, j - i));
    i = j;
  }
  if (ts.tokens.empty()) throw std::invalid_argument("prefix parse: empty input");
  NodePtr root = parse_node(ts, lib);
  if (!ts.done()) {
    throw std::invalid_argument("prefix parse: trailing tokens starting at '" +
                                std::string(ts.tokens[ts.pos]) + "'");
  }
  return Expression(std::move(root));
}

bool Expression::structurally_equal(const Expression& other, bool compare_constants) const {
  return nodes_equal(*root_, *other.root_, compare_constants);
}

}  // namespace metasymnet
