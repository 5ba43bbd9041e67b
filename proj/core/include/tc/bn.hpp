#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tc/ac.hpp"
#include "tc/cnf.hpp"
#include "tc/compiler.hpp"
#include "tc/factor.hpp"
#include "tc/queries.hpp"

namespace tc {

struct BayesNode {
  DiscreteVar var;
  std::vector<int> parents;  // indices into the net's declaration order
  std::vector<Rat> cpt;      // parent instantiations lexicographic, child value fastest
};

// Acyclic; each conditional factor normalized per parent instantiation.
struct BayesNet {
  std::vector<BayesNode> nodes;

  int index_of(const std::string& name) const;
  std::vector<DiscreteVar> variables() const;
  std::size_t cpt_rows(int node) const;
  // Row index within node's CPT for a full instantiation of the net.
  std::size_t cpt_row_of(int node, std::span<const int> full_row) const;
};

// Line format: `net`, `var <name> <k> [labels]`, `parents <name> <p1> ...`,
// `cpt <name> v1 v2 ...`.
BayesNet parse_bn(std::istream& in);
BayesNet parse_bn_string(const std::string& text);
void serialize_bn(const BayesNet& bn, std::ostream& out);

// Product of the conditional factors; the oracle for everything downstream.
Factor joint_factor(const BayesNet& bn, std::size_t row_cap = 1u << 20);

// Weighted-model-counting encoding: one indicator variable per (X, x) with
// exactly-one clauses, one parameter variable per CPT row with equivalence
// clauses; positive parameter literals weigh the CPT entry, everything else
// weighs 1.
struct WmcEncoding {
  struct LegendEntry {
    enum class Kind { indicator, parameter } kind;
    int bn_node;
    int value;            // indicator: value index
    std::size_t cpt_row;  // parameter: row index
    Rat theta;            // parameter weight
    std::string param_name;
  };

  CnfFormula cnf;
  WeightMap weights;
  std::vector<LegendEntry> legend;  // indexed 1..var_count

  Var indicator_var(int bn_node, int value) const { return indicator_base[bn_node] + value; }
  std::vector<Var> indicator_base;
};
WmcEncoding encode_wmc(const BayesNet& bn);

// Evidence over the net's variables mapped onto the encoding's indicators.
Assignment indicator_evidence(const WmcEncoding& enc, const BayesNet& bn, const Instantiation& e);

// encode -> compile -> smooth -> extract. Parameters come out numeric
// (constants equal to CPT entries) or symbolic; the result is deterministic,
// decomposable, and smooth.
ArithmeticCircuit compile_to_ac(const BayesNet& bn, bool symbolic = false,
                                const CompileOptions& copts = {});

// Pure substitution of symbolic parameters; structure unchanged.
ArithmeticCircuit bind_params(const ArithmeticCircuit& ac, const std::map<std::string, Rat>& values);

// Per-variable, per-value marginals P(x, e - X) from one backward pass.
template <class Num>
struct BnMarginals {
  Num evidence_probability;
  std::vector<std::vector<Num>> per_var;  // [var][value]
};
template <class Num>
BnMarginals<Num> bn_marginals(const ArithmeticCircuit& ac, const Instantiation& e);

}  // namespace tc
