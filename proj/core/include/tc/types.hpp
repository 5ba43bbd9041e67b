#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "tc/error.hpp"

namespace tc {

// Variables are 1-based indices into their container's universe.
using Var = int;

// A literal is a signed variable, DIMACS style: +v / -v.
struct Literal {
  Var var = 0;
  bool positive = true;

  static Literal from_dimacs(int code) {
    if (code == 0) fail_format("literal code 0");
    return Literal{std::abs(code), code > 0};
  }
  int dimacs() const { return positive ? var : -var; }
  Literal negated() const { return Literal{var, !positive}; }

  bool operator==(const Literal& o) const { return var == o.var && positive == o.positive; }
  bool operator<(const Literal& o) const {
    return var != o.var ? var < o.var : positive < o.positive;
  }
};

// Partial truth assignment over variables 1..n.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(int var_count) : values_(var_count + 1, kUnbound) {}

  int var_count() const { return static_cast<int>(values_.size()) - 1; }
  bool bound(Var v) const { return values_[v] != kUnbound; }
  bool value(Var v) const { return values_[v] == 1; }

  void bind(Var v, bool value) { values_[v] = value ? 1 : 0; }
  void unbind(Var v) { values_[v] = kUnbound; }

  bool consistent_with(const Literal& l) const {
    return !bound(l.var) || value(l.var) == l.positive;
  }

  bool complete() const {
    for (std::size_t v = 1; v < values_.size(); ++v)
      if (values_[v] == kUnbound) return false;
    return true;
  }

  int bound_count() const {
    int c = 0;
    for (std::size_t v = 1; v < values_.size(); ++v)
      if (values_[v] != kUnbound) ++c;
    return c;
  }

  std::vector<Var> bound_vars() const {
    std::vector<Var> out;
    for (std::size_t v = 1; v < values_.size(); ++v)
      if (values_[v] != kUnbound) out.push_back(static_cast<Var>(v));
    return out;
  }

 private:
  static constexpr std::int8_t kUnbound = -1;
  std::vector<std::int8_t> values_;
};

// Optional variable names, used by evidence strings; positions 1..n.
using VarNames = std::vector<std::string>;

}  // namespace tc
