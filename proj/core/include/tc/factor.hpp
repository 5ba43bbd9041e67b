#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tc/numeric.hpp"
#include "tc/types.hpp"

namespace tc {

struct DiscreteVar {
  std::string name;
  std::vector<std::string> labels;  // distinct, size >= 2

  int domain_size() const { return static_cast<int>(labels.size()); }
  // Default labels: lowercase name + 1-based position (a1, a2, ...).
  static DiscreteVar with_default_labels(std::string name, int k);
};

// Partial instantiation over an ordered variable list; positions match the
// owning circuit/factor.
class Instantiation {
 public:
  Instantiation() = default;
  explicit Instantiation(std::size_t var_count) : vals_(var_count, -1) {}

  std::size_t size() const { return vals_.size(); }
  bool bound(std::size_t i) const { return vals_[i] >= 0; }
  int value(std::size_t i) const { return vals_[i]; }
  void bind(std::size_t i, int value) { vals_[i] = value; }
  void unbind(std::size_t i) { vals_[i] = -1; }
  bool empty() const {
    for (int v : vals_)
      if (v >= 0) return false;
    return true;
  }
  bool complete() const {
    for (int v : vals_)
      if (v < 0) return false;
    return true;
  }
  bool compatible(std::size_t var, int value) const { return vals_[var] < 0 || vals_[var] == value; }
  bool compatible_row(std::span<const int> row) const {
    for (std::size_t i = 0; i < vals_.size(); ++i)
      if (vals_[i] >= 0 && vals_[i] != row[i]) return false;
    return true;
  }

 private:
  std::vector<int> vals_;
};

// "A=a2,B=b1": labels by name, or 1-based value indices.
Instantiation parse_instantiation(const std::string& text, const std::vector<DiscreteVar>& vars);
std::string instantiation_string(const Instantiation& inst, const std::vector<DiscreteVar>& vars);

// Mapping from complete instantiations to non-negative numbers. Rows are
// stored row-major with the last variable fastest.
template <class Num>
struct FactorT {
  std::vector<DiscreteVar> vars;
  std::vector<Num> values;

  std::size_t row_count() const {
    std::size_t n = 1;
    for (const auto& v : vars) n *= v.domain_size();
    return n;
  }
  std::size_t index_of(std::span<const int> row) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < vars.size(); ++i) idx = idx * vars[i].domain_size() + row[i];
    return idx;
  }
  void decode(std::size_t idx, std::vector<int>& row) const {
    row.assign(vars.size(), 0);
    for (std::size_t i = vars.size(); i-- > 0;) {
      row[i] = static_cast<int>(idx % vars[i].domain_size());
      idx /= vars[i].domain_size();
    }
  }
  const Num& at(std::span<const int> row) const { return values[index_of(row)]; }

  // Row-sum marginal; the brute-force reference for circuit evaluation.
  Num marginal(const Instantiation& e) const {
    Num total(0);
    std::vector<int> row;
    for (std::size_t i = 0; i < values.size(); ++i) {
      decode(i, row);
      if (e.compatible_row(row)) total += values[i];
    }
    return total;
  }

  // Best row under evidence; ties break toward the lowest row index.
  std::pair<Num, std::vector<int>> argmax(const Instantiation& e) const {
    Num best(0);
    std::vector<int> best_row(vars.size(), 0), row;
    bool first = true;
    for (std::size_t i = 0; i < values.size(); ++i) {
      decode(i, row);
      if (!e.compatible_row(row)) continue;
      if (first || values[i] > best) {
        best = values[i];
        best_row = row;
        first = false;
      }
    }
    return {best, best_row};
  }
};

using Factor = FactorT<Rat>;
using FactorD = FactorT<double>;

FactorD to_double(const Factor& f);

// Pointwise product over the union of the variable lists (matched by name;
// shared names must agree on domains).
Factor multiply_factors(const Factor& a, const Factor& b);

}  // namespace tc
