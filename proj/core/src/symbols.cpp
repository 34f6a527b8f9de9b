#include "metasymnet/symbols.hpp"

#include <array>
#include <charconv>
#include <stdexcept>

namespace metasymnet {

namespace {
constexpr std::array<const char*, kOperatorCount> kOpNames = {
    "+", "-", "*", "/", "sin", "cos", "exp", "log", "sqrt"};
}

Symbol Symbol::variable(int index) {
  if (index < 0) throw std::invalid_argument("variable index must be non-negative");
  return Symbol(kOperatorCount + index);
}

Symbol Symbol::from_id(int id) {
  if (id < 0) throw std::invalid_argument("symbol id must be non-negative");
  return Symbol(id);
}

std::string symbol_name(Symbol s) {
  if (s.is_operator()) return kOpNames[static_cast<std::size_t>(s.id())];
  return "x" + std::to_string(s.variable_index() + 1);
}

SymbolLibrary::SymbolLibrary(int k) : k_(k) {
  if (k < 1) throw std::invalid_argument("symbol library needs k >= 1 variables");
}

Symbol SymbolLibrary::at(int index) const {
  if (index < 0 || index >= size()) throw std::out_of_range("symbol index out of range");
  return Symbol::from_id(index);
}

std::string SymbolLibrary::name(Symbol s) const {
  if (!contains(s)) throw std::out_of_range("symbol not in library");
  return symbol_name(s);
}

Symbol SymbolLibrary::parse(std::string_view token) const {
  for (int i = 0; i < kOperatorCount; ++i) {
    if (token == kOpNames[static_cast<std::size_t>(i)]) return Symbol::from_id(i);
  }
  if (token.size() >= 2 && token[0] == 'x') {
    int idx = 0;
    auto [ptr, ec] = std::from_chars(token.data() + 1, token.data() + token.size(), idx);
    if (ec == std::errc{} && ptr == token.data() + token.size() && idx >= 1 && idx <= k_) {
      return Symbol::variable(idx - 1);
    }
  }
  throw std::invalid_argument("unknown token '" + std::string(token) + "'");
}

}  // namespace metasymnet
