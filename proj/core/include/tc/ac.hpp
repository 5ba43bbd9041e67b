#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tc/analysis.hpp"
#include "tc/factor.hpp"
#include "tc/numeric.hpp"

namespace tc {

enum class AcKind : std::uint8_t { Indicator, Constant, Param, Add, Mul };

struct AcNode {
  AcKind kind;
  std::uint32_t var = 0, value = 0;  // Indicator
  std::int32_t slot = -1;            // Constant: constant pool, Param: params list
  std::uint32_t child_begin = 0, child_end = 0;
};

struct SymbolicParam {
  std::string name;
  std::optional<Rat> bound;
};

// Same arena discipline as NnfCircuit: topological order, root last.
class ArithmeticCircuit {
 public:
  std::vector<DiscreteVar> vars;
  std::vector<SymbolicParam> params;

  std::size_t node_count() const { return nodes_.size(); }
  NodeId root() const { return static_cast<NodeId>(nodes_.size()) - 1; }
  const AcNode& node(NodeId id) const { return nodes_[id]; }
  std::span<const NodeId> children(NodeId id) const {
    const AcNode& n = nodes_[id];
    return {child_pool_.data() + n.child_begin, child_pool_.data() + n.child_end};
  }
  std::size_t edge_count() const { return child_pool_.size(); }
  const Rat& constant(NodeId id) const { return constants_[nodes_[id].slot]; }

  int var_index(const std::string& name) const;

 private:
  std::vector<AcNode> nodes_;
  std::vector<NodeId> child_pool_;
  std::vector<Rat> constants_;
  friend class AcBuilder;
};

class AcBuilder {
 public:
  explicit AcBuilder(std::vector<DiscreteVar> vars);

  NodeId indicator(std::uint32_t var, std::uint32_t value);
  NodeId constant(const Rat& v);
  NodeId param(const std::string& name, std::optional<Rat> bound = std::nullopt);
  NodeId add(std::vector<NodeId> children);
  NodeId mul(std::vector<NodeId> children);
  // Shared sum-of-indicators gadget for one variable, the smoothing pad.
  NodeId value_gadget(std::uint32_t var);

  const AcNode& node(NodeId id) const { return circuit_.nodes_[id]; }
  ArithmeticCircuit take(NodeId root);

 private:
  NodeId append(AcNode n, const std::vector<NodeId>& children);
  ArithmeticCircuit circuit_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, NodeId> indicator_cache_;
  std::map<Rat, NodeId> constant_cache_;
  std::map<std::string, NodeId> param_cache_;
  std::map<std::uint32_t, NodeId> gadget_cache_;
};

// Adders replaced by maximizers, structure otherwise identical.
struct MaximizerCircuit {
  ArithmeticCircuit circuit;
};
MaximizerCircuit maximizer_of(const ArithmeticCircuit& ac);

// Indicator values for a circuit pass; defaults to all ones (the empty
// instantiation). Soft evidence sets likelihoods here.
class IndicatorSetting {
 public:
  static IndicatorSetting ones(const std::vector<DiscreteVar>& vars);
  static IndicatorSetting of(const std::vector<DiscreteVar>& vars, const Instantiation& inst);

  const Rat& get(std::uint32_t var, std::uint32_t value) const { return per_var_[var][value]; }
  void set(std::uint32_t var, std::uint32_t value, Rat v) { per_var_[var][value] = std::move(v); }
  // Zero out values incompatible with e, keeping the rest.
  void restrict_to(const Instantiation& e);

 private:
  std::vector<std::vector<Rat>> per_var_;
};

// Bottom-up pass; Num is double or Rat. Unbound symbolic parameters fail.
template <class Num>
std::vector<Num> ac_forward(const ArithmeticCircuit& ac, const IndicatorSetting& s);

// Standard evaluation: indicators compatible with inst get 1, others 0.
template <class Num>
Num ac_evaluate(const ArithmeticCircuit& ac, const Instantiation& inst);

// The reference point: circuit values at every complete instantiation.
template <class Num>
FactorT<Num> circuit_factor(const ArithmeticCircuit& ac, std::size_t row_cap = 1u << 20);

struct AcProperties {
  PropertyReport decomposable, smooth, deterministic;
  bool all_hold() const { return decomposable.holds && smooth.holds && deterministic.holds; }
};
// Decomposability and smoothness are structural (multipliers/adders mirror
// and/or gates, indicators carry their variable); determinism is checked by
// enumerating rows, up to row_cap.
AcProperties check_ac_properties(const ArithmeticCircuit& ac, std::size_t row_cap = 1u << 20);

// Structural decomposability + smoothness guard shared by the marginal-style
// entry points (row-sum semantics needs both).
void require_marginal_properties(const ArithmeticCircuit& ac);

// Evaluation at a partial instantiation, guarded by the decomposability and
// smoothness checks that make the result equal the factor's row sum.
template <class Num>
Num ac_marginal(const ArithmeticCircuit& ac, const Instantiation& e);

// sum_x f(x) * prod lambda: one multiplier layer, one adder.
ArithmeticCircuit depth_two_circuit(const Factor& f, std::size_t row_cap = 1u << 20);

// Single multiplier over the two roots; computes the pointwise product.
ArithmeticCircuit multiply_circuits(const ArithmeticCircuit& a, const ArithmeticCircuit& b);

// Pads adder children (and the root) with sum-of-indicator gadgets for
// missing variables; the arithmetic analog of Boolean smoothing.
ArithmeticCircuit ac_smooth(const ArithmeticCircuit& ac);

struct MpeOptions {
  bool skip_property_checks = false;  // the documented failure mode demo needs this
  std::size_t row_cap = 1u << 20;
};
template <class Num>
struct MpeResult {
  Num value;
  Instantiation instantiation;
};
// Maximizer evaluation plus subcircuit extraction: at a maximizer follow the
// lowest-id child matching the node value, at a multiplier follow all.
template <class Num>
MpeResult<Num> mpe(const MaximizerCircuit& mc, const Instantiation& e, const MpeOptions& opts = {});

struct CompleteSubcircuit {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> term;  // (var, value), sorted
  Rat coefficient;
  std::vector<std::pair<NodeId, NodeId>> edges;  // chosen edges, sorted
};
// All top-down selections (one child per adder, all children per multiplier).
std::vector<CompleteSubcircuit> enumerate_complete_subcircuits(const ArithmeticCircuit& ac,
                                                               std::size_t cap = 1u << 16);

template <class Num>
struct BackpropResult {
  Num value;
  std::vector<Num> partial;  // per node; meaningful at leaves
};
// Exact reverse-mode derivatives of the root with respect to every leaf.
template <class Num>
BackpropResult<Num> backprop(const ArithmeticCircuit& ac, const IndicatorSetting& s);

struct Likelihoods {
  std::vector<std::vector<Rat>> per_var;
  static Likelihoods ones(const std::vector<DiscreteVar>& vars);
};
// Lines `<var> <label> <likelihood>`; unmentioned values keep likelihood 1.
Likelihoods parse_likelihoods(std::istream& in, const std::vector<DiscreteVar>& vars);

// Virtual-evidence update: a = value under likelihood indicators, b = same
// with e zeroing incompatible indicators; returns b/a.
double soft_evidence(const ArithmeticCircuit& ac, const Likelihoods& lik, const Instantiation& e,
                     double normalization_tolerance = 1e-9);

// Text format: header `ac V E` (nodes, edges), `v name k [labels]`
// declarations, then node lines `l var label`, `c number`, `p name`,
// `+ c i1 .. ic`, `* c i1 .. ic`; root last.
ArithmeticCircuit parse_ac(std::istream& in);
ArithmeticCircuit parse_ac_string(const std::string& text);
void serialize_ac(const ArithmeticCircuit& ac, std::ostream& out);

}  // namespace tc
