#pragma once

#include <iosfwd>
#include <vector>

#include "tc/nnf.hpp"
#include "tc/numeric.hpp"
#include "tc/types.hpp"
#include "tc/varset.hpp"

namespace tc {

// Literal weights, stored exactly; floating-point passes convert on the fly.
struct WeightMap {
  std::vector<Rat> positive, negative;  // indexed 1..n

  static WeightMap units(int var_count);
  const Rat& weight(Literal l) const { return l.positive ? positive[l.var] : negative[l.var]; }
  void set(Literal l, Rat w);
};

// Weights file: lines `<signed literal> <weight>`. Missing literals default
// to 1; their variables are reported so callers can warn.
WeightMap parse_weights(std::istream& in, int var_count, std::vector<Var>* defaulted = nullptr);

// Evidence strings like "A=1,K=0"; names fall back to indices.
Assignment parse_evidence(const std::string& text, int var_count, const VarNames& names);

struct CountOptions {
  // Determinism is a trust precondition: it is certified via the decision
  // property when it holds, by enumeration when var_count <= determinism_cap,
  // and otherwise must be assumed explicitly.
  bool assume_deterministic = false;
  int determinism_cap = 20;
};

// Linear-time SAT on decomposable circuits.
bool sat(const NnfCircuit& c);

// #SAT by one forward pass over a smooth (modulo unsatisfiable children)
// deterministic DNNF. Smoothness violations are detected during the pass.
BigInt model_count(const NnfCircuit& c, const CountOptions& opts = {});

// Satisfying completions of e: contradicting literals count 0 instead of 1.
BigInt conditioned_count(const NnfCircuit& c, const Assignment& e, const CountOptions& opts = {});

// Weighted model count under evidence. Num is double or Rat.
template <class Num>
Num weighted_count(const NnfCircuit& c, const WeightMap& w, const Assignment& e,
                   const CountOptions& opts = {});

// One forward plus one backward pass. For every literal l of variable X,
// result(l) is the weighted count with X's evidence (if any) replaced by l —
// the classic derivative semantics; for X unbound in e this is the count of
// e extended with l.
template <class Num>
struct LiteralCounts {
  Num total;                        // weighted_count(c, w, e)
  std::vector<Num> positive, negative;  // indexed 1..n
  const Num& get(Literal l) const { return l.positive ? positive[l.var] : negative[l.var]; }
};
template <class Num>
LiteralCounts<Num> literal_marginal_counts(const NnfCircuit& c, const WeightMap& w,
                                           const Assignment& e, const CountOptions& opts = {});

// E-MajSat on an X-constrained, smooth Decision-DNNF: one forward pass that
// takes the max over children at X-decision or-gates, sums at the remaining
// or-gates, and multiplies at and-gates. Ties break toward the lowest node
// id; X variables left free by the trace bind to false.
template <class Num>
struct EMajSatResult {
  Num value;
  Assignment witness;  // bound exactly on X
};
template <class Num>
EMajSatResult<Num> e_majsat(const NnfCircuit& c, const VarSet& x, const WeightMap& w);

// Brute-force oracle: the satisfying complete assignments in lexicographic
// order (variable 1 most significant, false before true).
std::vector<Assignment> enumerate_models(const NnfCircuit& c, int cap = 20);

}  // namespace tc
