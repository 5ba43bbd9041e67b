#include "tc/analysis.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "tc/error.hpp"

namespace tc {
namespace {

std::string join_vars(const std::vector<int>& vars, const NnfCircuit& c, std::size_t limit = 8) {
  std::string out;
  for (std::size_t i = 0; i < vars.size() && i < limit; ++i) {
    if (i) out += ",";
    out += c.var_name(vars[i]);
  }
  if (vars.size() > limit) out += ",...";
  return out;
}

// Per-node satisfiability by enumeration; only usable at small var counts.
std::vector<char> sat_flags_exhaustive(const NnfCircuit& c) {
  std::vector<char> sat(c.node_count(), 0);
  Assignment a(c.var_count);
  std::uint64_t total = 1ull << c.var_count;
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    for (int v = 1; v <= c.var_count; ++v) a.bind(v, (bits >> (v - 1)) & 1);
    std::vector<char> val = evaluate_all(c, a);
    for (NodeId id = 0; id < c.node_count(); ++id) sat[id] |= val[id];
  }
  return sat;
}

}  // namespace

void render_report(const PropertyReport& r, std::ostream& out) {
  out << "PROPERTY " << r.property << ' ' << (r.holds ? "HOLDS" : "FAILS") << '\n';
  for (const Witness& w : r.witnesses) out << "WITNESS node=" << w.node << ' ' << w.explanation << '\n';
}

PropertyReport check_decomposability(const NnfCircuit& c) {
  PropertyReport r;
  r.property = "decomposable";
  std::vector<VarSet> vars = node_vars(c);
  for (NodeId id = 0; id < c.node_count(); ++id) {
    if (c.node(id).kind != NnfKind::And) continue;
    VarSet seen(c.var_count);
    for (NodeId ch : c.children(id)) {
      if (!seen.disjoint(vars[ch])) {
        VarSet shared = VarSet::intersection(seen, vars[ch]);
        r.add_witness(id, "and-gate children share variables {" +
                              join_vars(shared.to_vector(), c) + "}");
        break;
      }
      seen |= vars[ch];
    }
  }
  return r;
}

PropertyReport check_smoothness(const NnfCircuit& c, bool exclude_unsat, int cap) {
  PropertyReport r;
  r.property = exclude_unsat ? "smooth-excluding-unsat" : "smooth";
  std::vector<VarSet> vars = node_vars(c);
  std::vector<char> sat;
  if (exclude_unsat) {
    if (check_decomposability(c).holds) {
      sat = dnnf_sat_flags(c);
    } else if (c.var_count <= cap) {
      sat = sat_flags_exhaustive(c);
      r.method = PropertyReport::Method::exhaustive;
    } else {
      fail_precondition("exclude_unsat smoothness check needs a decomposable circuit or var count <= " +
                        std::to_string(cap));
    }
  }
  for (NodeId id = 0; id < c.node_count(); ++id) {
    if (c.node(id).kind != NnfKind::Or) continue;
    bool have_ref = false;
    VarSet ref(c.var_count);
    for (NodeId ch : c.children(id)) {
      if (exclude_unsat && !sat[ch]) continue;
      if (!have_ref) {
        ref = vars[ch];
        have_ref = true;
      } else if (vars[ch] != ref) {
        r.add_witness(id, "or-gate children mention different variables");
        break;
      }
    }
  }
  return r;
}

DecisionInfo analyze_decision(const NnfCircuit& c) {
  DecisionInfo info;
  info.report.property = "decision";
  info.decision_var.assign(c.node_count(), 0);

  // Literals of var v contained in a child: the child itself, or a direct
  // child of an And.
  auto literal_polarities = [&](NodeId child, Var v, bool& pos, bool& neg) {
    pos = neg = false;
    const NnfNode& n = c.node(child);
    if (n.kind == NnfKind::Literal && n.lit.var == v) {
      (n.lit.positive ? pos : neg) = true;
    } else if (n.kind == NnfKind::And) {
      for (NodeId g : c.children(child)) {
        const NnfNode& m = c.node(g);
        if (m.kind == NnfKind::Literal && m.lit.var == v) (m.lit.positive ? pos : neg) = true;
      }
    }
  };
  auto decides = [&](NodeId id, Var v) {
    auto ch = c.children(id);
    bool p0, n0, p1, n1;
    literal_polarities(ch[0], v, p0, n0);
    literal_polarities(ch[1], v, p1, n1);
    return (p0 && n1 && !n0 && !p1) || (n0 && p1 && !p0 && !n1);
  };
  // Candidate variables: literals appearing directly under both children.
  auto candidate_vars = [&](NodeId id) {
    std::vector<Var> cand;
    const NnfNode& n0 = c.node(c.children(id)[0]);
    if (n0.kind == NnfKind::Literal) {
      cand.push_back(n0.lit.var);
    } else if (n0.kind == NnfKind::And) {
      for (NodeId g : c.children(c.children(id)[0]))
        if (c.node(g).kind == NnfKind::Literal) cand.push_back(c.node(g).lit.var);
    }
    std::sort(cand.begin(), cand.end());
    return cand;
  };

  for (NodeId id = 0; id < c.node_count(); ++id) {
    const NnfNode& n = c.node(id);
    if (n.kind != NnfKind::Or || c.children(id).empty()) continue;
    if (c.children(id).size() != 2) {
      info.report.add_witness(id, "or-gate has " + std::to_string(c.children(id).size()) +
                                      " children, decision form needs 2");
      continue;
    }
    if (n.decision_var != 0) {
      if (decides(id, n.decision_var)) {
        info.decision_var[id] = n.decision_var;
      } else {
        info.report.add_witness(id, "declared decision variable " + c.var_name(n.decision_var) +
                                        " has no opposing literal pair");
      }
      continue;
    }
    Var found = 0;
    for (Var v : candidate_vars(id)) {
      if (decides(id, v)) {
        found = v;
        break;
      }
    }
    if (found) {
      info.decision_var[id] = found;
    } else {
      info.report.add_witness(id, "no variable with opposing literals across the two children");
    }
  }
  return info;
}

PropertyReport check_decision(const NnfCircuit& c) { return analyze_decision(c).report; }

bool check_x_constrained(const NnfCircuit& c, const VarSet& x) {
  DecisionInfo info = analyze_decision(c);
  if (!info.report.holds) fail_precondition("x-constrained check requires the decision property");
  std::vector<char> reach = reachable_from_root(c);
  // under_y[n]: some reachable ancestor of n is an or-gate deciding a Y var.
  std::vector<char> under_y(c.node_count(), 0);
  for (NodeId id = c.node_count(); id-- > 0;) {
    if (!reach[id]) continue;
    Var d = info.decision_var[id];
    if (d != 0 && x.contains(d) && under_y[id]) return false;
    char flag = under_y[id] | (d != 0 && !x.contains(d));
    for (NodeId ch : c.children(id)) under_y[ch] |= flag;
  }
  return true;
}

StructuredInfo analyze_structured(const NnfCircuit& c, const Vtree& v) {
  StructuredInfo info;
  info.report.property = "structured";
  info.conforming.assign(c.node_count(), 0);
  std::vector<VarSet> vars = node_vars(c);
  if (c.var_count > v.var_count())
    fail_precondition("vtree covers fewer variables than the circuit");

  for (NodeId id = 0; id < c.node_count(); ++id) {
    if (c.node(id).kind != NnfKind::And || c.children(id).empty()) continue;
    if (c.children(id).size() != 2) {
      info.report.add_witness(id, "and-gate has " + std::to_string(c.children(id).size()) +
                                      " children, structured form needs 2");
      continue;
    }
    VarSet left = vars[c.children(id)[0]];
    VarSet right = vars[c.children(id)[1]];
    // Resize into the vtree universe.
    VarSet lv(v.var_count()), rv(v.var_count()), uv(v.var_count());
    for (int var : left.to_vector()) lv.add(var);
    for (int var : right.to_vector()) rv.add(var);
    uv |= lv;
    uv |= rv;

    VtreeId u = v.root();
    bool found = false;
    while (true) {
      const Vtree::Node& un = v.node(u);
      if (un.is_leaf()) break;
      if (lv.subset_of(v.vars_below(un.left)) && rv.subset_of(v.vars_below(un.right))) {
        found = true;
        info.conforming[id] = u;
        break;
      }
      if (uv.subset_of(v.vars_below(un.left)))
        u = un.left;
      else if (uv.subset_of(v.vars_below(un.right)))
        u = un.right;
      else
        break;
    }
    if (!found) info.report.add_witness(id, "no vtree node splits the and-gate children");
  }
  return info;
}

PropertyReport check_structured(const NnfCircuit& c, const Vtree& v) {
  return analyze_structured(c, v).report;
}

PropertyReport check_determinism_exhaustive(const NnfCircuit& c, int cap, int max_witnesses) {
  if (c.var_count > cap)
    fail_precondition("exhaustive determinism check capped at " + std::to_string(cap) +
                      " variables, circuit has " + std::to_string(c.var_count));
  PropertyReport r;
  r.property = "deterministic";
  r.method = PropertyReport::Method::exhaustive;
  Assignment a(c.var_count);
  std::uint64_t total = 1ull << c.var_count;
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    for (int v = 1; v <= c.var_count; ++v) a.bind(v, (bits >> (v - 1)) & 1);
    std::vector<char> val = evaluate_all(c, a);
    for (NodeId id = 0; id < c.node_count(); ++id) {
      if (c.node(id).kind != NnfKind::Or) continue;
      int high = 0;
      for (NodeId ch : c.children(id))
        if (val[ch]) ++high;
      if (high > 1) {
        std::string inputs;
        for (int v = 1; v <= c.var_count; ++v) inputs += a.value(v) ? '1' : '0';
        r.add_witness(id, std::to_string(high) + " high inputs under assignment " + inputs);
        if (static_cast<int>(r.witnesses.size()) >= max_witnesses) return r;
      }
    }
  }
  return r;
}

NnfCircuit smooth(const NnfCircuit& c) {
  std::vector<VarSet> vars = node_vars(c);
  NnfBuilder b(c.var_count);
  std::vector<NodeId> map(c.node_count());

  // Splice gadgets into an existing and-gate rather than nesting, so a
  // decision child (X and alpha) keeps its literal directly under the gate.
  auto pad = [&](NodeId mapped, const VarSet& have, const VarSet& want) -> NodeId {
    VarSet missing = VarSet::difference(want, have);
    if (missing.empty()) return mapped;
    std::vector<NodeId> parts;
    if (b.node(mapped).kind == NnfKind::And)
      parts.assign(b.children(mapped).begin(), b.children(mapped).end());
    else
      parts.push_back(mapped);
    for (int v : missing.to_vector()) parts.push_back(b.tautology_gadget(v));
    return b.add_and(std::move(parts));
  };

  for (NodeId id = 0; id < c.node_count(); ++id) {
    const NnfNode& n = c.node(id);
    switch (n.kind) {
      case NnfKind::True:
        map[id] = b.constant(true);
        break;
      case NnfKind::False:
        map[id] = b.constant(false);
        break;
      case NnfKind::Literal:
        map[id] = b.literal(n.lit);
        break;
      case NnfKind::And: {
        std::vector<NodeId> ch;
        for (NodeId x : c.children(id)) ch.push_back(map[x]);
        map[id] = b.add_and(std::move(ch));
        break;
      }
      case NnfKind::Or: {
        std::vector<NodeId> ch;
        for (NodeId x : c.children(id)) ch.push_back(pad(map[x], vars[x], vars[id]));
        map[id] = b.add_or(n.decision_var, std::move(ch));
        break;
      }
    }
  }
  // Pad the root up to the declared universe so counting ranges over all
  // variables, mentioned or not.
  VarSet universe(c.var_count);
  for (int v = 1; v <= c.var_count; ++v) universe.add(v);
  NodeId root = pad(map[c.root()], vars[c.root()], universe);
  NnfCircuit out = b.take(root);
  out.names = c.names;
  return out;
}

NnfCircuit condition_all(const NnfCircuit& c, const Assignment& e) {
  NnfBuilder b(c.var_count);
  std::vector<NodeId> map(c.node_count());
  for (NodeId id = 0; id < c.node_count(); ++id) {
    const NnfNode& n = c.node(id);
    switch (n.kind) {
      case NnfKind::True:
        map[id] = b.constant(true);
        break;
      case NnfKind::False:
        map[id] = b.constant(false);
        break;
      case NnfKind::Literal:
        if (!e.bound(n.lit.var))
          map[id] = b.literal(n.lit);
        else
          map[id] = b.constant(e.value(n.lit.var) == n.lit.positive);
        break;
      case NnfKind::And: {
        std::vector<NodeId> ch;
        bool dead = false;
        for (NodeId x : c.children(id)) {
          if (b.is_false(map[x])) dead = true;
          if (!b.is_true(map[x])) ch.push_back(map[x]);
        }
        if (dead)
          map[id] = b.constant(false);
        else if (ch.empty())
          map[id] = b.constant(true);
        else if (ch.size() == 1)
          map[id] = ch[0];
        else
          map[id] = b.add_and(std::move(ch));
        break;
      }
      case NnfKind::Or: {
        std::vector<NodeId> ch;
        bool alive = false;
        for (NodeId x : c.children(id)) {
          if (b.is_true(map[x])) alive = true;
          if (!b.is_false(map[x])) ch.push_back(map[x]);
        }
        if (alive)
          map[id] = b.constant(true);
        else if (ch.empty())
          map[id] = b.constant(false);
        else if (ch.size() == 1)
          map[id] = ch[0];
        else
          map[id] = b.add_or(n.decision_var, std::move(ch));
        break;
      }
    }
  }
  NnfCircuit out = b.take(map[c.root()]);
  out.names = c.names;
  return out;
}

NnfCircuit condition(const NnfCircuit& c, Literal l) {
  Assignment e(c.var_count);
  e.bind(l.var, l.positive);
  return condition_all(c, e);
}

}  // namespace tc
