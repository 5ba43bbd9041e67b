#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tc/nnf.hpp"
#include "tc/vtree.hpp"

namespace tc {

struct Witness {
  NodeId node;
  std::string explanation;
};

struct PropertyReport {
  std::string property;
  bool holds = true;
  std::vector<Witness> witnesses;
  enum class Method { structural, exhaustive } method = Method::structural;

  void add_witness(NodeId node, std::string why) {
    holds = false;
    witnesses.push_back({node, std::move(why)});
  }
};

// `PROPERTY <name> HOLDS|FAILS` followed by `WITNESS node=<id> ...` lines.
void render_report(const PropertyReport& r, std::ostream& out);

// Children of every and-gate mention pairwise disjoint variables.
PropertyReport check_decomposability(const NnfCircuit& c);

// Children of every or-gate mention the same variables. With `exclude_unsat`,
// unsatisfiable children are ignored, since nothing ever counts through them;
// satisfiability comes from DNNF propagation when the circuit is decomposable
// and from enumeration (up to `cap` variables) otherwise.
PropertyReport check_smoothness(const NnfCircuit& c, bool exclude_unsat = false, int cap = 20);

// Decision analysis: every or-gate with children has the (X and a) or
// (!X and b) shape. Declared decision variables are verified; undeclared ones
// are inferred (lowest qualifying variable).
struct DecisionInfo {
  PropertyReport report;
  std::vector<Var> decision_var;  // per node, 0 for non-decisions
};
DecisionInfo analyze_decision(const NnfCircuit& c);
PropertyReport check_decision(const NnfCircuit& c);

// No or-gate deciding a variable in X below an or-gate deciding a variable
// outside X, over root-to-leaf paths. Requires the decision property.
bool check_x_constrained(const NnfCircuit& c, const VarSet& x);

// Binary and-gates, each with a vtree node whose left/right subtrees cover
// its first/second child. Witness-free nodes record their conforming vtree
// node in `conforming`.
struct StructuredInfo {
  PropertyReport report;
  std::vector<VtreeId> conforming;  // per node, meaningful for And nodes when holds
};
StructuredInfo analyze_structured(const NnfCircuit& c, const Vtree& v);
PropertyReport check_structured(const NnfCircuit& c, const Vtree& v);

// Semantic determinism by enumeration of all 2^n inputs, n <= cap.
PropertyReport check_determinism_exhaustive(const NnfCircuit& c, int cap = 20,
                                            int max_witnesses = 4);

// Quadratic smoothing: pads or-gate children (and the root, up to the full
// variable universe) with shared (X or !X) gadgets. Function preserved.
NnfCircuit smooth(const NnfCircuit& c);

// Restriction c|l with constant propagation.
NnfCircuit condition(const NnfCircuit& c, Literal l);
NnfCircuit condition_all(const NnfCircuit& c, const Assignment& e);

}  // namespace tc
