#include "tc/queries.hpp"

#include <algorithm>
#include <istream>
#include <sstream>

#include "tc/analysis.hpp"
#include "tc/error.hpp"

namespace tc {
namespace {

// Effective per-node variable sets ignoring unsatisfiable fragments, with the
// smoothness check folded in. sat flags must come from a decomposable
// circuit.
std::vector<VarSet> effective_vars_checked(const NnfCircuit& c, const std::vector<char>& sat) {
  std::vector<VarSet> eff(c.node_count(), VarSet(c.var_count));
  for (NodeId id = 0; id < c.node_count(); ++id) {
    const NnfNode& n = c.node(id);
    switch (n.kind) {
      case NnfKind::Literal:
        eff[id].add(n.lit.var);
        break;
      case NnfKind::True:
      case NnfKind::False:
        break;
      case NnfKind::And:
        for (NodeId ch : c.children(id)) eff[id] |= eff[ch];
        break;
      case NnfKind::Or: {
        bool have = false;
        for (NodeId ch : c.children(id)) {
          if (!sat[ch]) continue;
          if (!have) {
            eff[id] = eff[ch];
            have = true;
          } else if (eff[ch] != eff[id]) {
            fail_precondition("smoothness violation at or-gate node " + std::to_string(id) +
                              "; run smooth first");
          }
        }
        break;
      }
    }
  }
  return eff;
}

void verify_counting_preconditions(const NnfCircuit& c, const CountOptions& opts) {
  PropertyReport d = check_decomposability(c);
  if (!d.holds) fail_precondition("circuit is not decomposable");
  if (analyze_decision(c).report.holds) return;
  if (c.var_count <= opts.determinism_cap) {
    PropertyReport det = check_determinism_exhaustive(c, opts.determinism_cap, 1);
    if (!det.holds)
      fail_precondition("circuit is not deterministic: " + det.witnesses.front().explanation);
    return;
  }
  if (!opts.assume_deterministic)
    fail_precondition(
        "determinism cannot be certified (no decision structure, too many variables for the "
        "oracle); pass assume_deterministic to acknowledge");
}

template <class Num>
Num from_rat(const Rat& q);
template <>
double from_rat<double>(const Rat& q) {
  return q.get_d();
}
template <>
Rat from_rat<Rat>(const Rat& q) {
  return q;
}
// Unweighted counting uses integer weights only (0 and 1).
template <>
BigInt from_rat<BigInt>(const Rat& q) {
  if (q.get_den() != 1) fail_precondition("integer counting pass fed a non-integer weight");
  return q.get_num();
}

// Shared forward engine: leaf values per literal supplied by the caller.
template <class Num, class LeafFn>
std::vector<Num> forward_pass(const NnfCircuit& c, LeafFn leaf) {
  std::vector<Num> val(c.node_count(), Num(0));
  for (NodeId id = 0; id < c.node_count(); ++id) {
    const NnfNode& n = c.node(id);
    switch (n.kind) {
      case NnfKind::True:
        val[id] = Num(1);
        break;
      case NnfKind::False:
        val[id] = Num(0);
        break;
      case NnfKind::Literal:
        val[id] = leaf(n.lit);
        break;
      case NnfKind::And: {
        Num v(1);
        for (NodeId ch : c.children(id)) v *= val[ch];
        val[id] = v;
        break;
      }
      case NnfKind::Or: {
        Num v(0);
        for (NodeId ch : c.children(id)) v += val[ch];
        val[id] = v;
        break;
      }
    }
  }
  return val;
}

void check_root_coverage(const NnfCircuit& c, const std::vector<char>& sat) {
  if (!sat[c.root()]) return;  // unsatisfiable circuits count 0 without smoothness
  std::vector<VarSet> eff = effective_vars_checked(c, sat);
  if (eff[c.root()].count() != c.var_count)
    fail_precondition("circuit does not mention every variable; run smooth first");
}

template <class Num>
Num counting_pass(const NnfCircuit& c, const WeightMap& w, const Assignment& e,
                  const CountOptions& opts) {
  verify_counting_preconditions(c, opts);
  std::vector<char> satf = dnnf_sat_flags(c);
  check_root_coverage(c, satf);
  auto leaf = [&](Literal l) -> Num {
    if (!e.consistent_with(l)) return Num(0);
    return from_rat<Num>(w.weight(l));
  };
  return forward_pass<Num>(c, leaf)[c.root()];
}

}  // namespace

WeightMap WeightMap::units(int var_count) {
  WeightMap w;
  w.positive.assign(var_count + 1, Rat(1));
  w.negative.assign(var_count + 1, Rat(1));
  return w;
}

void WeightMap::set(Literal l, Rat w) {
  if (w < 0) fail_format("negative weight for literal " + std::to_string(l.dimacs()));
  (l.positive ? positive : negative)[l.var] = std::move(w);
}

WeightMap parse_weights(std::istream& in, int var_count, std::vector<Var>* defaulted) {
  WeightMap w = WeightMap::units(var_count);
  std::vector<char> pos_seen(var_count + 1, 0), neg_seen(var_count + 1, 0);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "c") continue;
    int code = std::stoi(tok);
    std::string value;
    if (!(ls >> value)) fail_format("weights line missing value: '" + line + "'");
    Literal l = Literal::from_dimacs(code);
    if (l.var > var_count) fail_format("weights line literal out of range: '" + line + "'");
    w.set(l, parse_decimal(value));
    (l.positive ? pos_seen : neg_seen)[l.var] = 1;
  }
  if (defaulted) {
    for (Var v = 1; v <= var_count; ++v)
      if (!pos_seen[v] || !neg_seen[v]) defaulted->push_back(v);
  }
  return w;
}

Assignment parse_evidence(const std::string& text, int var_count, const VarNames& names) {
  Assignment e(var_count);
  std::size_t pos = 0;
  auto trim = [](std::string s) {
    std::size_t a = s.find_first_not_of(" \t");
    std::size_t b = s.find_last_not_of(" \t");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    pos = comma == std::string::npos ? text.size() : comma + 1;
    item = trim(item);
    if (item.empty()) continue;
    std::size_t eq = item.find('=');
    if (eq == std::string::npos) fail_format("evidence item '" + item + "' is not name=value");
    std::string name = trim(item.substr(0, eq));
    std::string value = trim(item.substr(eq + 1));
    Var var = 0;
    for (std::size_t v = 1; v < names.size(); ++v)
      if (names[v] == name) var = static_cast<Var>(v);
    if (var == 0) {
      try {
        var = std::stoi(name);
      } catch (...) {
        fail_format("unknown variable '" + name + "' in evidence");
      }
    }
    if (var < 1 || var > var_count) fail_format("evidence variable '" + name + "' out of range");
    bool bit;
    if (value == "1" || value == "true")
      bit = true;
    else if (value == "0" || value == "false")
      bit = false;
    else
      fail_format("evidence value '" + value + "' must be 0 or 1");
    if (e.bound(var) && e.value(var) != bit) fail_format("conflicting evidence on '" + name + "'");
    e.bind(var, bit);
  }
  return e;
}

bool sat(const NnfCircuit& c) {
  if (!check_decomposability(c).holds) fail_precondition("sat requires a decomposable circuit");
  return dnnf_sat_flags(c)[c.root()] != 0;
}

BigInt model_count(const NnfCircuit& c, const CountOptions& opts) {
  Assignment empty(c.var_count);
  return counting_pass<BigInt>(c, WeightMap::units(c.var_count), empty, opts);
}

BigInt conditioned_count(const NnfCircuit& c, const Assignment& e, const CountOptions& opts) {
  return counting_pass<BigInt>(c, WeightMap::units(c.var_count), e, opts);
}

template <class Num>
Num weighted_count(const NnfCircuit& c, const WeightMap& w, const Assignment& e,
                   const CountOptions& opts) {
  return counting_pass<Num>(c, w, e, opts);
}

template double weighted_count<double>(const NnfCircuit&, const WeightMap&, const Assignment&,
                                       const CountOptions&);
template Rat weighted_count<Rat>(const NnfCircuit&, const WeightMap&, const Assignment&,
                                 const CountOptions&);

template <class Num>
LiteralCounts<Num> literal_marginal_counts(const NnfCircuit& c, const WeightMap& w,
                                           const Assignment& e, const CountOptions& opts) {
  verify_counting_preconditions(c, opts);
  std::vector<char> satf = dnnf_sat_flags(c);
  check_root_coverage(c, satf);

  auto leaf = [&](Literal l) -> Num {
    if (!e.consistent_with(l)) return Num(0);
    return from_rat<Num>(w.weight(l));
  };
  std::vector<Num> val = forward_pass<Num>(c, leaf);

  // Backward pass: d(root) = 1; or-gates pass derivatives through, and-gates
  // multiply in the siblings via prefix/suffix products (division-free, so
  // zero-valued children are harmless).
  std::vector<Num> deriv(c.node_count(), Num(0));
  deriv[c.root()] = Num(1);
  std::vector<Num> prefix, suffix;
  for (NodeId id = c.node_count(); id-- > 0;) {
    const NnfNode& n = c.node(id);
    auto ch = c.children(id);
    if (n.kind == NnfKind::Or) {
      for (NodeId x : ch) deriv[x] += deriv[id];
    } else if (n.kind == NnfKind::And) {
      std::size_t k = ch.size();
      prefix.assign(k + 1, Num(1));
      suffix.assign(k + 1, Num(1));
      for (std::size_t i = 0; i < k; ++i) prefix[i + 1] = prefix[i] * val[ch[i]];
      for (std::size_t i = k; i-- > 0;) suffix[i] = suffix[i + 1] * val[ch[i]];
      for (std::size_t i = 0; i < k; ++i) deriv[ch[i]] += deriv[id] * prefix[i] * suffix[i + 1];
    }
  }

  LiteralCounts<Num> out;
  out.total = val[c.root()];
  out.positive.assign(c.var_count + 1, Num(0));
  out.negative.assign(c.var_count + 1, Num(0));
  for (NodeId id = 0; id < c.node_count(); ++id) {
    const NnfNode& n = c.node(id);
    if (n.kind != NnfKind::Literal) continue;
    Num contribution = deriv[id] * from_rat<Num>(w.weight(n.lit));
    (n.lit.positive ? out.positive : out.negative)[n.lit.var] += contribution;
  }
  return out;
}

template LiteralCounts<double> literal_marginal_counts<double>(const NnfCircuit&, const WeightMap&,
                                                               const Assignment&,
                                                               const CountOptions&);
template LiteralCounts<Rat> literal_marginal_counts<Rat>(const NnfCircuit&, const WeightMap&,
                                                         const Assignment&, const CountOptions&);

template <class Num>
EMajSatResult<Num> e_majsat(const NnfCircuit& c, const VarSet& x, const WeightMap& w) {
  DecisionInfo info = analyze_decision(c);
  if (!info.report.holds) fail_precondition("e_majsat requires the decision property");
  if (!check_decomposability(c).holds) fail_precondition("e_majsat requires decomposability");
  if (!check_smoothness(c, /*exclude_unsat=*/true).holds)
    fail_precondition("e_majsat requires smoothness; run smooth first");
  if (!check_x_constrained(c, x)) fail_precondition("circuit is not X-constrained for the given X");

  // The max/sum split is sound only when no X variable occurs below a
  // Y-decision; the decision-level check alone does not rule out X literals
  // implied under Y branches.
  {
    std::vector<char> reach = reachable_from_root(c);
    std::vector<char> under_y(c.node_count(), 0);
    for (NodeId id = c.node_count(); id-- > 0;) {
      if (!reach[id]) continue;
      const NnfNode& n = c.node(id);
      if (n.kind == NnfKind::Literal && x.contains(n.lit.var) && under_y[id])
        fail_precondition("X variable " + c.var_name(n.lit.var) +
                          " occurs below a Y-decision; not X-constrained in the strong sense");
      Var d = info.decision_var[id];
      char flag = under_y[id] | (d != 0 && !x.contains(d));
      for (NodeId ch : c.children(id)) under_y[ch] |= flag;
    }
  }

  std::vector<Num> val(c.node_count(), Num(0));
  std::vector<NodeId> chosen(c.node_count(), 0);
  for (NodeId id = 0; id < c.node_count(); ++id) {
    const NnfNode& n = c.node(id);
    switch (n.kind) {
      case NnfKind::True:
        val[id] = Num(1);
        break;
      case NnfKind::False:
        val[id] = Num(0);
        break;
      case NnfKind::Literal:
        val[id] = from_rat<Num>(w.weight(n.lit));
        break;
      case NnfKind::And: {
        Num v(1);
        for (NodeId ch : c.children(id)) v *= val[ch];
        val[id] = v;
        break;
      }
      case NnfKind::Or: {
        Var d = info.decision_var[id];
        if (d != 0 && x.contains(d)) {
          bool first = true;
          NodeId best = 0;
          Num bestv(0);
          for (NodeId ch : c.children(id)) {
            if (first || val[ch] > bestv || (val[ch] == bestv && ch < best)) {
              bestv = val[ch];
              best = ch;
              first = false;
            }
          }
          val[id] = bestv;
          chosen[id] = best;
        } else {
          Num v(0);
          for (NodeId ch : c.children(id)) v += val[ch];
          val[id] = v;
        }
        break;
      }
    }
  }

  EMajSatResult<Num> out{val[c.root()], Assignment(c.var_count)};
  // Trace: argmax child at X-decisions, all children at and-gates, stop at
  // Y-decisions (no X material below them).
  std::vector<NodeId> stack{c.root()};
  std::vector<char> visited(c.node_count(), 0);
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    if (visited[id]) continue;
    visited[id] = 1;
    const NnfNode& n = c.node(id);
    if (n.kind == NnfKind::Literal) {
      if (x.contains(n.lit.var)) out.witness.bind(n.lit.var, n.lit.positive);
    } else if (n.kind == NnfKind::And) {
      for (NodeId ch : c.children(id)) stack.push_back(ch);
    } else if (n.kind == NnfKind::Or) {
      Var d = info.decision_var[id];
      if (d != 0 && x.contains(d)) stack.push_back(chosen[id]);
    }
  }
  for (int v : x.to_vector())
    if (!out.witness.bound(v)) out.witness.bind(v, false);
  return out;
}

template EMajSatResult<double> e_majsat<double>(const NnfCircuit&, const VarSet&, const WeightMap&);
template EMajSatResult<Rat> e_majsat<Rat>(const NnfCircuit&, const VarSet&, const WeightMap&);

std::vector<Assignment> enumerate_models(const NnfCircuit& c, int cap) {
  if (c.var_count > cap)
    fail_precondition("enumerate_models capped at " + std::to_string(cap) + " variables");
  std::vector<Assignment> models;
  Assignment a(c.var_count);
  std::uint64_t total = 1ull << c.var_count;
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    for (int v = 1; v <= c.var_count; ++v) a.bind(v, (bits >> (c.var_count - v)) & 1);
    if (evaluate(c, a)) models.push_back(a);
  }
  return models;
}

}  // namespace tc
