#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tc/types.hpp"
#include "tc/varset.hpp"

namespace tc {

using NodeId = std::uint32_t;

enum class NnfKind : std::uint8_t { True, False, Literal, And, Or };

// Nodes live in an arena in topological order: children strictly precede
// parents, the root is the last node. Every pass over a circuit is a single
// forward or backward scan of this array.
struct NnfNode {
  NnfKind kind;
  Literal lit;       // Literal nodes only
  Var decision_var;  // Or nodes: declared decision variable, 0 = none
  std::uint32_t child_begin = 0;
  std::uint32_t child_end = 0;
};

class NnfCircuit {
 public:
  int var_count = 0;
  VarNames names;  // optional, positions 1..var_count

  std::size_t node_count() const { return nodes_.size(); }
  NodeId root() const { return static_cast<NodeId>(nodes_.size()) - 1; }
  const NnfNode& node(NodeId id) const { return nodes_[id]; }
  std::span<const NodeId> children(NodeId id) const {
    const NnfNode& n = nodes_[id];
    return {child_pool_.data() + n.child_begin, child_pool_.data() + n.child_end};
  }
  std::size_t edge_count() const { return child_pool_.size(); }

  std::string var_name(Var v) const {
    if (v < static_cast<int>(names.size()) && !names[v].empty()) return names[v];
    return std::to_string(v);
  }

 private:
  std::vector<NnfNode> nodes_;
  std::vector<NodeId> child_pool_;
  friend class NnfBuilder;
  friend NnfCircuit parse_nnf(std::istream&);
};

// Single-owner builder; the circuit is immutable once taken. Literal and
// constant nodes are hash-consed.
class NnfBuilder {
 public:
  explicit NnfBuilder(int var_count);

  NodeId literal(Literal l);
  NodeId literal(int dimacs_code) { return literal(Literal::from_dimacs(dimacs_code)); }
  NodeId constant(bool value);
  NodeId add_and(std::vector<NodeId> children);
  NodeId add_or(Var decision_var, std::vector<NodeId> children);
  // Shared (X or !X) gadget used by the smoothing transform.
  NodeId tautology_gadget(Var v);

  bool is_true(NodeId id) const { return circuit_.nodes_[id].kind == NnfKind::True; }
  bool is_false(NodeId id) const { return circuit_.nodes_[id].kind == NnfKind::False; }
  const NnfNode& node(NodeId id) const { return circuit_.nodes_[id]; }
  std::span<const NodeId> children(NodeId id) const { return circuit_.children(id); }

  // Seals the circuit with `root` as its output (appends a trivial And alias
  // when the root is not already the last node).
  NnfCircuit take(NodeId root);

 private:
  NodeId append(NnfNode n, const std::vector<NodeId>& children);
  NnfCircuit circuit_;
  std::unordered_map<int, NodeId> literal_cache_;
  std::unordered_map<Var, NodeId> gadget_cache_;
  NodeId true_node_ = UINT32_MAX;
  NodeId false_node_ = UINT32_MAX;
};

// c2d interchange format: header `nnf V E N`, lines `L l`, `A c i1 .. ic`,
// `O j c i1 .. ic`. Constants are `A 0` / `O 0 0`. `c var <i> <name>`
// comments are understood.
NnfCircuit parse_nnf(std::istream& in);
NnfCircuit parse_nnf_string(const std::string& text);
void serialize_nnf(const NnfCircuit& c, std::ostream& out);
std::string serialize_nnf_string(const NnfCircuit& c);

// Gate semantics under a complete assignment.
bool evaluate(const NnfCircuit& c, const Assignment& a);

// Truth values of every node under a complete assignment (one forward scan).
std::vector<char> evaluate_all(const NnfCircuit& c, const Assignment& a);

// vars(n) per node: union over children, {v} at literals, empty at constants.
std::vector<VarSet> node_vars(const NnfCircuit& c);

// Per-node satisfiability flags, correct when the circuit is decomposable.
std::vector<char> dnnf_sat_flags(const NnfCircuit& c);

// True for nodes reachable from the root.
std::vector<char> reachable_from_root(const NnfCircuit& c);

}  // namespace tc
