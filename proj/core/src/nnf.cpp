#include "tc/nnf.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "tc/error.hpp"

namespace tc {

NnfBuilder::NnfBuilder(int var_count) { circuit_.var_count = var_count; }

NodeId NnfBuilder::append(NnfNode n, const std::vector<NodeId>& children) {
  NodeId id = static_cast<NodeId>(circuit_.nodes_.size());
  n.child_begin = static_cast<std::uint32_t>(circuit_.child_pool_.size());
  for (NodeId c : children) {
    if (c >= id) fail_format("child must precede parent (topological order)");
    circuit_.child_pool_.push_back(c);
  }
  n.child_end = static_cast<std::uint32_t>(circuit_.child_pool_.size());
  circuit_.nodes_.push_back(n);
  return id;
}

NodeId NnfBuilder::literal(Literal l) {
  if (l.var < 1 || l.var > circuit_.var_count)
    fail_format("literal variable " + std::to_string(l.var) + " out of range");
  auto [it, inserted] = literal_cache_.try_emplace(l.dimacs(), 0);
  if (!inserted) return it->second;
  NnfNode n{};
  n.kind = NnfKind::Literal;
  n.lit = l;
  n.decision_var = 0;
  it->second = append(n, {});
  return it->second;
}

NodeId NnfBuilder::constant(bool value) {
  NodeId& slot = value ? true_node_ : false_node_;
  if (slot != UINT32_MAX) return slot;
  NnfNode n{};
  n.kind = value ? NnfKind::True : NnfKind::False;
  n.decision_var = 0;
  slot = append(n, {});
  return slot;
}

NodeId NnfBuilder::add_and(std::vector<NodeId> children) {
  NnfNode n{};
  n.kind = NnfKind::And;
  n.decision_var = 0;
  return append(n, children);
}

NodeId NnfBuilder::add_or(Var decision_var, std::vector<NodeId> children) {
  NnfNode n{};
  n.kind = NnfKind::Or;
  n.decision_var = decision_var;
  return append(n, children);
}

NodeId NnfBuilder::tautology_gadget(Var v) {
  auto [it, inserted] = gadget_cache_.try_emplace(v, 0);
  if (!inserted) return it->second;
  NodeId pos = literal(Literal{v, true});
  NodeId neg = literal(Literal{v, false});
  it->second = add_or(v, {pos, neg});
  return it->second;
}

NnfCircuit NnfBuilder::take(NodeId root) {
  if (root + 1 != circuit_.nodes_.size()) {
    // Root must sit last. Leaves get a fresh copy, anything else a unary And.
    NnfNode n = circuit_.nodes_[root];
    if (n.kind == NnfKind::True || n.kind == NnfKind::False || n.kind == NnfKind::Literal) {
      append(n, {});
    } else {
      NnfNode alias{};
      alias.kind = NnfKind::And;
      alias.decision_var = 0;
      append(alias, {root});
    }
  }
  return std::move(circuit_);
}

NnfCircuit parse_nnf(std::istream& in) {
  std::string line;
  bool saw_header = false;
  std::size_t declared_nodes = 0, declared_edges = 0;
  int var_count = 0;
  VarNames names;

  struct RawNode {
    char op;
    int lit_or_decision = 0;
    std::vector<NodeId> children;
  };
  std::vector<RawNode> raw;
  std::size_t edges = 0;

  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "c") {
      std::string kw;
      if (ls >> kw && kw == "var") {
        int idx;
        std::string name;
        if (ls >> idx >> name) {
          if (static_cast<int>(names.size()) <= idx) names.resize(idx + 1);
          names[idx] = name;
        }
      }
      continue;
    }
    if (tok == "nnf") {
      if (saw_header) fail_format("duplicate nnf header");
      if (!(ls >> declared_nodes >> declared_edges >> var_count)) fail_format("bad nnf header");
      saw_header = true;
      continue;
    }
    if (!saw_header) fail_format("missing nnf header");
    if (tok != "L" && tok != "A" && tok != "O") fail_format("bad opcode '" + tok + "'");
    RawNode r;
    r.op = tok[0];
    if (r.op == 'L') {
      if (!(ls >> r.lit_or_decision) || r.lit_or_decision == 0) fail_format("bad literal line");
    } else {
      std::size_t count = 0;
      if (r.op == 'O') {
        if (!(ls >> r.lit_or_decision) || r.lit_or_decision < 0) fail_format("bad O line");
      }
      if (!(ls >> count)) fail_format("missing child count");
      for (std::size_t i = 0; i < count; ++i) {
        long id;
        if (!(ls >> id)) fail_format("truncated child list");
        if (id < 0 || static_cast<std::size_t>(id) >= raw.size())
          fail_format("forward or dangling child reference: " + std::to_string(id));
        r.children.push_back(static_cast<NodeId>(id));
      }
      edges += count;
    }
    raw.push_back(std::move(r));
  }
  if (!saw_header) fail_format("missing nnf header");
  if (raw.size() != declared_nodes)
    fail_format("node count mismatch: header says " + std::to_string(declared_nodes) +
                ", found " + std::to_string(raw.size()));
  if (edges != declared_edges)
    fail_format("edge count mismatch: header says " + std::to_string(declared_edges) +
                ", found " + std::to_string(edges));
  if (raw.empty()) fail_format("empty nnf circuit");

  NnfCircuit c;
  c.var_count = var_count;
  if (!names.empty()) {
    names.resize(var_count + 1);
    c.names = std::move(names);
  }
  for (const RawNode& r : raw) {
    NnfNode n{};
    n.decision_var = 0;
    if (r.op == 'L') {
      Literal l = Literal::from_dimacs(r.lit_or_decision);
      if (l.var > var_count) fail_format("literal variable out of range in nnf");
      n.kind = NnfKind::Literal;
      n.lit = l;
    } else if (r.op == 'A') {
      n.kind = r.children.empty() ? NnfKind::True : NnfKind::And;
    } else {
      n.kind = r.children.empty() ? NnfKind::False : NnfKind::Or;
      if (!r.children.empty()) {
        if (r.lit_or_decision > var_count) fail_format("decision variable out of range in nnf");
        n.decision_var = r.lit_or_decision;
      }
    }
    n.child_begin = static_cast<std::uint32_t>(c.child_pool_.size());
    for (NodeId id : r.children) c.child_pool_.push_back(id);
    n.child_end = static_cast<std::uint32_t>(c.child_pool_.size());
    c.nodes_.push_back(n);
  }
  return c;
}

NnfCircuit parse_nnf_string(const std::string& text) {
  std::istringstream in(text);
  return parse_nnf(in);
}

void serialize_nnf(const NnfCircuit& c, std::ostream& out) {
  for (std::size_t v = 1; v < c.names.size(); ++v)
    if (!c.names[v].empty()) out << "c var " << v << ' ' << c.names[v] << '\n';
  out << "nnf " << c.node_count() << ' ' << c.edge_count() << ' ' << c.var_count << '\n';
  for (NodeId id = 0; id < c.node_count(); ++id) {
    const NnfNode& n = c.node(id);
    switch (n.kind) {
      case NnfKind::Literal:
        out << "L " << n.lit.dimacs() << '\n';
        break;
      case NnfKind::True:
        out << "A 0\n";
        break;
      case NnfKind::False:
        out << "O 0 0\n";
        break;
      case NnfKind::And: {
        out << "A " << c.children(id).size();
        for (NodeId ch : c.children(id)) out << ' ' << ch;
        out << '\n';
        break;
      }
      case NnfKind::Or: {
        out << "O " << n.decision_var << ' ' << c.children(id).size();
        for (NodeId ch : c.children(id)) out << ' ' << ch;
        out << '\n';
        break;
      }
    }
  }
}

std::string serialize_nnf_string(const NnfCircuit& c) {
  std::ostringstream out;
  serialize_nnf(c, out);
  return out.str();
}

std::vector<char> evaluate_all(const NnfCircuit& c, const Assignment& a) {
  if (a.var_count() < c.var_count || !a.complete())
    fail_precondition("evaluate requires a complete assignment");
  std::vector<char> val(c.node_count(), 0);
  for (NodeId id = 0; id < c.node_count(); ++id) {
    const NnfNode& n = c.node(id);
    switch (n.kind) {
      case NnfKind::True:
        val[id] = 1;
        break;
      case NnfKind::False:
        val[id] = 0;
        break;
      case NnfKind::Literal:
        val[id] = a.value(n.lit.var) == n.lit.positive;
        break;
      case NnfKind::And: {
        char v = 1;
        for (NodeId ch : c.children(id)) v &= val[ch];
        val[id] = v;
        break;
      }
      case NnfKind::Or: {
        char v = 0;
        for (NodeId ch : c.children(id)) v |= val[ch];
        val[id] = v;
        break;
      }
    }
  }
  return val;
}

bool evaluate(const NnfCircuit& c, const Assignment& a) {
  return evaluate_all(c, a)[c.root()] != 0;
}

std::vector<VarSet> node_vars(const NnfCircuit& c) {
  std::vector<VarSet> vars(c.node_count(), VarSet(c.var_count));
  for (NodeId id = 0; id < c.node_count(); ++id) {
    const NnfNode& n = c.node(id);
    if (n.kind == NnfKind::Literal) {
      vars[id].add(n.lit.var);
    } else {
      for (NodeId ch : c.children(id)) vars[id] |= vars[ch];
    }
  }
  return vars;
}

std::vector<char> dnnf_sat_flags(const NnfCircuit& c) {
  std::vector<char> sat(c.node_count(), 0);
  for (NodeId id = 0; id < c.node_count(); ++id) {
    const NnfNode& n = c.node(id);
    switch (n.kind) {
      case NnfKind::True:
      case NnfKind::Literal:
        sat[id] = 1;
        break;
      case NnfKind::False:
        sat[id] = 0;
        break;
      case NnfKind::And: {
        char v = 1;
        for (NodeId ch : c.children(id)) v &= sat[ch];
        sat[id] = v;
        break;
      }
      case NnfKind::Or: {
        char v = 0;
        for (NodeId ch : c.children(id)) v |= sat[ch];
        sat[id] = v;
        break;
      }
    }
  }
  return sat;
}

std::vector<char> reachable_from_root(const NnfCircuit& c) {
  std::vector<char> reach(c.node_count(), 0);
  reach[c.root()] = 1;
  for (NodeId id = c.root() + 1; id-- > 0;) {
    if (!reach[id]) continue;
    for (NodeId ch : c.children(id)) reach[ch] = 1;
  }
  return reach;
}

}  // namespace tc
