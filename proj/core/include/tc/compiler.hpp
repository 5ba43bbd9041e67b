#pragma once

#include <cstddef>
#include <vector>

#include "tc/cnf.hpp"
#include "tc/nnf.hpp"
#include "tc/varset.hpp"

namespace tc {

enum class DecisionHeuristic { lowest_index, most_occurring };

struct CompileOptions {
  DecisionHeuristic heuristic = DecisionHeuristic::most_occurring;
  std::size_t cache_capacity = 1u << 20;  // component cache entries, 0 disables caching
  std::vector<Var> x_first;               // branch on these before all others
};

struct UnitPropagationResult {
  bool conflict = false;
  std::vector<Literal> implied;        // literals forced by the unit rule
  std::vector<Clause> residual;        // no unit, satisfied, or empty clauses
};

// Fixpoint of the unit rule against the clauses, under the partial
// assignment a (a is not extended; implied literals are reported).
UnitPropagationResult unit_propagate(const std::vector<Clause>& clauses, const Assignment& a);

// Partition into variable-disjoint groups (union-find over shared variables).
std::vector<std::vector<Clause>> components(const std::vector<Clause>& clauses);

struct CompileStats {
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
  std::size_t decisions = 0;
};

// Decision-DNNF as the trace of exhaustive DPLL: branching yields decision
// or-gates, component splits yield decomposable and-gates, implied literals
// attach as and-conjuncts, identical residual components share one node.
// With x_first set, X variables are branched before all others per
// component, making the output X-constrained.
NnfCircuit compile(const CnfFormula& f, const CompileOptions& opts = {},
                   CompileStats* stats = nullptr);

}  // namespace tc
