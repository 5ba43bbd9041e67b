#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tc/types.hpp"
#include "tc/varset.hpp"

namespace tc {

using VtreeId = std::uint32_t;

// Full binary tree whose leaves are in bijection with variables 1..n.
// Child order matters: an SDD's primes live in the left subtree, its subs in
// the right.
class Vtree {
 public:
  struct Node {
    Var var = 0;  // > 0 iff leaf
    VtreeId left = 0, right = 0, parent = 0;
    bool is_leaf() const { return var > 0; }
  };

  static Vtree build(const std::vector<Node>& nodes, VtreeId root);
  // Balanced shape over 1..n in order; handy default for tests and tools.
  static Vtree balanced(int var_count);
  // Leaf-left spine following `order` (a right-linear vtree over that order).
  static Vtree right_linear(const std::vector<Var>& order);

  int var_count() const { return var_count_; }
  VtreeId root() const { return root_; }
  std::size_t node_count() const { return nodes_.size(); }
  const Node& node(VtreeId id) const { return nodes_[id]; }
  VtreeId leaf_of(Var v) const { return leaf_of_[v]; }
  const VarSet& vars_below(VtreeId id) const { return vars_below_[id]; }

  // True when `inner` lies in the subtree rooted at `outer`.
  bool inside(VtreeId inner, VtreeId outer) const {
    return in_[outer] <= in_[inner] && out_[inner] <= out_[outer];
  }
  VtreeId lowest_common_ancestor(VtreeId a, VtreeId b) const;
  int depth(VtreeId id) const { return depth_[id]; }

  bool right_linear() const;

 private:
  std::vector<Node> nodes_;
  VtreeId root_ = 0;
  int var_count_ = 0;
  std::vector<VtreeId> leaf_of_;        // var -> leaf id
  std::vector<VarSet> vars_below_;      // per node
  std::vector<std::uint32_t> in_, out_; // Euler intervals
  std::vector<int> depth_;
};

struct VtreeClassification {
  bool right_linear = false;
  bool constrained_for_x = false;
  VtreeId constrained_node = 0;  // the node u when constrained_for_x holds
};

// Right-linear per the leaf-left definition; constrained for X when a node u
// on the root's right spine has exactly vars \ X below it.
VtreeClassification vtree_classify(const Vtree& v, const VarSet& x);

// Text format: comments `c ...`, header `vtree N`, lines `L id var` and
// `I id left right`; the root is the highest id.
Vtree parse_vtree(std::istream& in);
Vtree parse_vtree_string(const std::string& text);
void serialize_vtree(const Vtree& v, std::ostream& out);
std::string serialize_vtree_string(const Vtree& v);

}  // namespace tc
