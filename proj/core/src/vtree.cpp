#include "tc/vtree.hpp"

#include <algorithm>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "tc/error.hpp"

namespace tc {

Vtree Vtree::build(const std::vector<Node>& nodes, VtreeId root) {
  Vtree v;
  v.nodes_ = nodes;
  v.root_ = root;
  if (nodes.empty() || root >= nodes.size()) fail_format("vtree root out of range");

  // Walk the tree once: detect cycles/sharing, set parents, count leaves.
  std::vector<char> seen(nodes.size(), 0);
  std::vector<Var> leaf_vars;
  std::function<void(VtreeId)> walk = [&](VtreeId id) {
    if (seen[id]) fail_format("vtree node " + std::to_string(id) + " visited twice (cycle or dag)");
    seen[id] = 1;
    const Node& n = v.nodes_[id];
    if (n.is_leaf()) {
      leaf_vars.push_back(n.var);
      return;
    }
    if (n.left >= v.nodes_.size() || n.right >= v.nodes_.size() || n.left == n.right)
      fail_format("internal vtree node must have two distinct children");
    v.nodes_[n.left].parent = id;
    v.nodes_[n.right].parent = id;
    walk(n.left);
    walk(n.right);
  };
  v.nodes_[root].parent = root;
  walk(root);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (!seen[i]) fail_format("vtree node " + std::to_string(i) + " unreachable from root");

  std::sort(leaf_vars.begin(), leaf_vars.end());
  for (std::size_t i = 1; i < leaf_vars.size(); ++i)
    if (leaf_vars[i] == leaf_vars[i - 1])
      fail_format("duplicate variable " + std::to_string(leaf_vars[i]) + " on vtree leaves");
  int n = static_cast<int>(leaf_vars.size());
  if (n == 0 || leaf_vars.front() != 1 || leaf_vars.back() != n)
    fail_format("vtree leaf variables must be exactly 1..n");
  v.var_count_ = n;

  v.leaf_of_.assign(n + 1, 0);
  v.vars_below_.assign(v.nodes_.size(), VarSet(n));
  v.in_.assign(v.nodes_.size(), 0);
  v.out_.assign(v.nodes_.size(), 0);
  v.depth_.assign(v.nodes_.size(), 0);
  std::uint32_t clock = 0;
  std::function<void(VtreeId, int)> annotate = [&](VtreeId id, int d) {
    v.in_[id] = clock++;
    v.depth_[id] = d;
    const Node& node = v.nodes_[id];
    if (node.is_leaf()) {
      v.leaf_of_[node.var] = id;
      v.vars_below_[id].add(node.var);
    } else {
      annotate(node.left, d + 1);
      annotate(node.right, d + 1);
      v.vars_below_[id] |= v.vars_below_[node.left];
      v.vars_below_[id] |= v.vars_below_[node.right];
    }
    v.out_[id] = clock++;
  };
  annotate(root, 0);
  return v;
}

Vtree Vtree::balanced(int var_count) {
  std::vector<Node> nodes;
  std::function<VtreeId(int, int)> make = [&](int lo, int hi) -> VtreeId {
    if (lo == hi) {
      nodes.push_back(Node{lo, 0, 0, 0});
      return static_cast<VtreeId>(nodes.size() - 1);
    }
    int mid = (lo + hi) / 2;
    VtreeId l = make(lo, mid);
    VtreeId r = make(mid + 1, hi);
    nodes.push_back(Node{0, l, r, 0});
    return static_cast<VtreeId>(nodes.size() - 1);
  };
  VtreeId root = make(1, var_count);
  return build(nodes, root);
}

Vtree Vtree::right_linear(const std::vector<Var>& order) {
  std::vector<Node> nodes;
  std::function<VtreeId(std::size_t)> make = [&](std::size_t i) -> VtreeId {
    if (i + 1 == order.size()) {
      nodes.push_back(Node{order[i], 0, 0, 0});
      return static_cast<VtreeId>(nodes.size() - 1);
    }
    nodes.push_back(Node{order[i], 0, 0, 0});
    VtreeId leaf = static_cast<VtreeId>(nodes.size() - 1);
    VtreeId rest = make(i + 1);
    nodes.push_back(Node{0, leaf, rest, 0});
    return static_cast<VtreeId>(nodes.size() - 1);
  };
  if (order.empty()) fail_format("right_linear needs at least one variable");
  VtreeId root = make(0);
  return build(nodes, root);
}

VtreeId Vtree::lowest_common_ancestor(VtreeId a, VtreeId b) const {
  while (!inside(b, a)) a = nodes_[a].parent;
  return a;
}

bool Vtree::right_linear() const {
  for (VtreeId id = 0; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    if (!n.is_leaf() && !nodes_[n.left].is_leaf()) return false;
  }
  return true;
}

VtreeClassification vtree_classify(const Vtree& v, const VarSet& x) {
  VtreeClassification out;
  out.right_linear = v.right_linear();
  // Right spine: var sets strictly shrink, so at most one node can match.
  VtreeId u = v.root();
  while (true) {
    VarSet outside = VarSet::difference(v.vars_below(v.root()), v.vars_below(u));
    if (outside == x) {
      out.constrained_for_x = true;
      out.constrained_node = u;
      break;
    }
    if (v.node(u).is_leaf()) break;
    u = v.node(u).right;
  }
  return out;
}

Vtree parse_vtree(std::istream& in) {
  std::string line;
  bool saw_header = false;
  std::size_t declared = 0;
  std::vector<Vtree::Node> nodes;
  std::vector<char> defined;
  VtreeId highest = 0;

  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "c") continue;
    if (tok == "vtree") {
      if (saw_header) fail_format("duplicate vtree header");
      if (!(ls >> declared)) fail_format("bad vtree header");
      nodes.assign(declared, Vtree::Node{});
      defined.assign(declared, 0);
      saw_header = true;
      continue;
    }
    if (!saw_header) fail_format("missing vtree header");
    if (tok == "L") {
      std::size_t id;
      int var;
      if (!(ls >> id >> var) || var < 1) fail_format("bad vtree leaf line");
      if (id >= declared || defined[id]) fail_format("bad or duplicate vtree node id");
      nodes[id] = Vtree::Node{var, 0, 0, 0};
      defined[id] = 1;
      highest = std::max<VtreeId>(highest, static_cast<VtreeId>(id));
    } else if (tok == "I") {
      std::size_t id, l, r;
      if (!(ls >> id >> l >> r)) fail_format("bad vtree internal line");
      if (id >= declared || defined[id]) fail_format("bad or duplicate vtree node id");
      if (l >= declared || r >= declared) fail_format("vtree child id out of range");
      nodes[id] = Vtree::Node{0, static_cast<VtreeId>(l), static_cast<VtreeId>(r), 0};
      defined[id] = 1;
      highest = std::max<VtreeId>(highest, static_cast<VtreeId>(id));
    } else {
      fail_format("bad vtree opcode '" + tok + "'");
    }
  }
  if (!saw_header) fail_format("missing vtree header");
  for (std::size_t i = 0; i < declared; ++i)
    if (!defined[i]) fail_format("vtree node " + std::to_string(i) + " undeclared");
  if (declared == 0) fail_format("empty vtree");
  return Vtree::build(nodes, highest);
}

Vtree parse_vtree_string(const std::string& text) {
  std::istringstream in(text);
  return parse_vtree(in);
}

void serialize_vtree(const Vtree& v, std::ostream& out) {
  // Canonical output: post-order ids, so the root is the highest id.
  std::vector<VtreeId> renum(v.node_count(), 0);
  std::ostringstream body;
  VtreeId next = 0;
  std::function<void(VtreeId)> emit = [&](VtreeId id) {
    const Vtree::Node& n = v.node(id);
    if (n.is_leaf()) {
      renum[id] = next++;
      body << "L " << renum[id] << ' ' << n.var << '\n';
    } else {
      emit(n.left);
      emit(n.right);
      renum[id] = next++;
      body << "I " << renum[id] << ' ' << renum[n.left] << ' ' << renum[n.right] << '\n';
    }
  };
  emit(v.root());
  out << "vtree " << v.node_count() << '\n' << body.str();
}

std::string serialize_vtree_string(const Vtree& v) {
  std::ostringstream out;
  serialize_vtree(v, out);
  return out.str();
}

}  // namespace tc
