#include "tc/ac.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "tc/error.hpp"

namespace tc {
namespace {

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

std::vector<VarSet> ac_node_vars(const ArithmeticCircuit& ac) {
  int universe = static_cast<int>(ac.vars.size());
  std::vector<VarSet> vars(ac.node_count(), VarSet(universe));
  for (NodeId id = 0; id < ac.node_count(); ++id) {
    const AcNode& n = ac.node(id);
    if (n.kind == AcKind::Indicator) {
      vars[id].add(static_cast<int>(n.var) + 1);  // VarSet is 1-based
    } else {
      for (NodeId ch : ac.children(id)) vars[id] |= vars[ch];
    }
  }
  return vars;
}

}  // namespace

int ArithmeticCircuit::var_index(const std::string& name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i].name == name) return static_cast<int>(i);
  return -1;
}

AcBuilder::AcBuilder(std::vector<DiscreteVar> vars) {
  for (const auto& v : vars) {
    if (v.domain_size() < 2) fail_format("variable '" + v.name + "' needs at least two values");
    for (std::size_t i = 0; i < v.labels.size(); ++i)
      for (std::size_t j = i + 1; j < v.labels.size(); ++j)
        if (v.labels[i] == v.labels[j])
          fail_format("variable '" + v.name + "' has duplicate labels");
  }
  for (std::size_t i = 0; i < vars.size(); ++i)
    for (std::size_t j = i + 1; j < vars.size(); ++j)
      if (vars[i].name == vars[j].name) fail_format("duplicate variable '" + vars[i].name + "'");
  circuit_.vars = std::move(vars);
}

NodeId AcBuilder::append(AcNode n, const std::vector<NodeId>& children) {
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

NodeId AcBuilder::indicator(std::uint32_t var, std::uint32_t value) {
  if (var >= circuit_.vars.size() ||
      value >= static_cast<std::uint32_t>(circuit_.vars[var].domain_size()))
    fail_format("indicator (var,value) out of range");
  auto [it, inserted] = indicator_cache_.try_emplace({var, value}, 0);
  if (!inserted) return it->second;
  AcNode n{};
  n.kind = AcKind::Indicator;
  n.var = var;
  n.value = value;
  it->second = append(n, {});
  return it->second;
}

NodeId AcBuilder::constant(const Rat& v) {
  if (v < 0) fail_format("arithmetic circuit constants must be non-negative");
  auto [it, inserted] = constant_cache_.try_emplace(v, 0);
  if (!inserted) return it->second;
  AcNode n{};
  n.kind = AcKind::Constant;
  n.slot = static_cast<std::int32_t>(circuit_.constants_.size());
  circuit_.constants_.push_back(v);
  it->second = append(n, {});
  return it->second;
}

NodeId AcBuilder::param(const std::string& name, std::optional<Rat> bound) {
  auto [it, inserted] = param_cache_.try_emplace(name, 0);
  if (!inserted) return it->second;
  AcNode n{};
  n.kind = AcKind::Param;
  n.slot = static_cast<std::int32_t>(circuit_.params.size());
  circuit_.params.push_back({name, std::move(bound)});
  it->second = append(n, {});
  return it->second;
}

NodeId AcBuilder::add(std::vector<NodeId> children) {
  AcNode n{};
  n.kind = AcKind::Add;
  return append(n, children);
}

NodeId AcBuilder::mul(std::vector<NodeId> children) {
  AcNode n{};
  n.kind = AcKind::Mul;
  return append(n, children);
}

NodeId AcBuilder::value_gadget(std::uint32_t var) {
  auto [it, inserted] = gadget_cache_.try_emplace(var, 0);
  if (!inserted) return it->second;
  std::vector<NodeId> kids;
  for (int v = 0; v < circuit_.vars[var].domain_size(); ++v)
    kids.push_back(indicator(var, static_cast<std::uint32_t>(v)));
  it->second = add(std::move(kids));
  return it->second;
}

ArithmeticCircuit AcBuilder::take(NodeId root) {
  if (root + 1 != circuit_.nodes_.size()) {
    AcNode n{};
    n.kind = AcKind::Mul;
    append(n, {root});
  }
  return std::move(circuit_);
}

MaximizerCircuit maximizer_of(const ArithmeticCircuit& ac) { return MaximizerCircuit{ac}; }

IndicatorSetting IndicatorSetting::ones(const std::vector<DiscreteVar>& vars) {
  IndicatorSetting s;
  for (const auto& v : vars) s.per_var_.emplace_back(v.domain_size(), Rat(1));
  return s;
}

IndicatorSetting IndicatorSetting::of(const std::vector<DiscreteVar>& vars,
                                      const Instantiation& inst) {
  IndicatorSetting s = ones(vars);
  s.restrict_to(inst);
  return s;
}

void IndicatorSetting::restrict_to(const Instantiation& e) {
  for (std::size_t var = 0; var < per_var_.size(); ++var) {
    if (!e.bound(var)) continue;
    for (std::size_t val = 0; val < per_var_[var].size(); ++val)
      if (static_cast<int>(val) != e.value(var)) per_var_[var][val] = 0;
  }
}

template <class Num>
std::vector<Num> ac_forward(const ArithmeticCircuit& ac, const IndicatorSetting& s) {
  std::vector<Num> val(ac.node_count(), Num(0));
  for (NodeId id = 0; id < ac.node_count(); ++id) {
    const AcNode& n = ac.node(id);
    switch (n.kind) {
      case AcKind::Indicator:
        val[id] = from_rat<Num>(s.get(n.var, n.value));
        break;
      case AcKind::Constant:
        val[id] = from_rat<Num>(ac.constant(id));
        break;
      case AcKind::Param: {
        const SymbolicParam& p = ac.params[n.slot];
        if (!p.bound) fail_precondition("unbound symbolic parameter '" + p.name + "'");
        val[id] = from_rat<Num>(*p.bound);
        break;
      }
      case AcKind::Add: {
        Num v(0);
        for (NodeId ch : ac.children(id)) v += val[ch];
        val[id] = v;
        break;
      }
      case AcKind::Mul: {
        Num v(1);
        for (NodeId ch : ac.children(id)) v *= val[ch];
        val[id] = v;
        break;
      }
    }
  }
  return val;
}

template std::vector<double> ac_forward<double>(const ArithmeticCircuit&, const IndicatorSetting&);
template std::vector<Rat> ac_forward<Rat>(const ArithmeticCircuit&, const IndicatorSetting&);

template <class Num>
Num ac_evaluate(const ArithmeticCircuit& ac, const Instantiation& inst) {
  return ac_forward<Num>(ac, IndicatorSetting::of(ac.vars, inst))[ac.root()];
}

template double ac_evaluate<double>(const ArithmeticCircuit&, const Instantiation&);
template Rat ac_evaluate<Rat>(const ArithmeticCircuit&, const Instantiation&);

template <class Num>
FactorT<Num> circuit_factor(const ArithmeticCircuit& ac, std::size_t row_cap) {
  FactorT<Num> f;
  f.vars = ac.vars;
  std::size_t rows = f.row_count();
  if (rows > row_cap)
    fail_precondition("circuit_factor cap exceeded: " + std::to_string(rows) + " rows");
  f.values.reserve(rows);
  std::vector<int> row;
  Instantiation inst(ac.vars.size());
  for (std::size_t i = 0; i < rows; ++i) {
    f.decode(i, row);
    for (std::size_t k = 0; k < row.size(); ++k) inst.bind(k, row[k]);
    f.values.push_back(ac_evaluate<Num>(ac, inst));
  }
  return f;
}

template FactorT<double> circuit_factor<double>(const ArithmeticCircuit&, std::size_t);
template FactorT<Rat> circuit_factor<Rat>(const ArithmeticCircuit&, std::size_t);

AcProperties check_ac_properties(const ArithmeticCircuit& ac, std::size_t row_cap) {
  AcProperties out;
  out.decomposable.property = "decomposable";
  out.smooth.property = "smooth";
  out.deterministic.property = "deterministic";
  out.deterministic.method = PropertyReport::Method::exhaustive;

  std::vector<VarSet> vars = ac_node_vars(ac);
  int universe = static_cast<int>(ac.vars.size());
  for (NodeId id = 0; id < ac.node_count(); ++id) {
    const AcNode& n = ac.node(id);
    if (n.kind == AcKind::Mul) {
      VarSet seen(universe);
      for (NodeId ch : ac.children(id)) {
        if (!seen.disjoint(vars[ch])) {
          out.decomposable.add_witness(id, "multiplier children share variables");
          break;
        }
        seen |= vars[ch];
      }
    } else if (n.kind == AcKind::Add) {
      bool first = true;
      VarSet ref(universe);
      for (NodeId ch : ac.children(id)) {
        if (first) {
          ref = vars[ch];
          first = false;
        } else if (vars[ch] != ref) {
          out.smooth.add_witness(id, "adder children mention different variables");
          break;
        }
      }
    }
  }

  FactorT<Rat> probe;
  probe.vars = ac.vars;
  std::size_t rows = probe.row_count();
  if (rows > row_cap)
    fail_precondition("determinism check cap exceeded: " + std::to_string(rows) + " rows");
  std::vector<int> row;
  Instantiation inst(ac.vars.size());
  for (std::size_t i = 0; i < rows && out.deterministic.holds; ++i) {
    probe.decode(i, row);
    for (std::size_t k = 0; k < row.size(); ++k) inst.bind(k, row[k]);
    std::vector<Rat> val = ac_forward<Rat>(ac, IndicatorSetting::of(ac.vars, inst));
    for (NodeId id = 0; id < ac.node_count(); ++id) {
      if (ac.node(id).kind != AcKind::Add) continue;
      int nonzero = 0;
      for (NodeId ch : ac.children(id))
        if (val[ch] != 0) ++nonzero;
      if (nonzero > 1) {
        out.deterministic.add_witness(
            id, std::to_string(nonzero) + " non-zero adder inputs at row " + std::to_string(i));
        break;
      }
    }
  }
  return out;
}

void require_marginal_properties(const ArithmeticCircuit& ac) {
  std::vector<VarSet> vars = ac_node_vars(ac);
  int universe = static_cast<int>(ac.vars.size());
  for (NodeId id = 0; id < ac.node_count(); ++id) {
    const AcNode& n = ac.node(id);
    if (n.kind == AcKind::Mul) {
      VarSet seen(universe);
      for (NodeId ch : ac.children(id)) {
        if (!seen.disjoint(vars[ch]))
          fail_precondition("marginal requires decomposability; multiplier node " +
                            std::to_string(id) + " shares variables");
        seen |= vars[ch];
      }
    } else if (n.kind == AcKind::Add) {
      bool first = true;
      VarSet ref(universe);
      for (NodeId ch : ac.children(id)) {
        if (first) {
          ref = vars[ch];
          first = false;
        } else if (vars[ch] != ref) {
          fail_precondition("marginal requires smoothness; adder node " + std::to_string(id) +
                            " is not smooth");
        }
      }
    }
  }
}

template <class Num>
Num ac_marginal(const ArithmeticCircuit& ac, const Instantiation& e) {
  require_marginal_properties(ac);
  return ac_evaluate<Num>(ac, e);
}

template double ac_marginal<double>(const ArithmeticCircuit&, const Instantiation&);
template Rat ac_marginal<Rat>(const ArithmeticCircuit&, const Instantiation&);

ArithmeticCircuit depth_two_circuit(const Factor& f, std::size_t row_cap) {
  if (f.row_count() > row_cap)
    fail_precondition("depth_two_circuit cap exceeded: " + std::to_string(f.row_count()) + " rows");
  AcBuilder b(f.vars);
  std::vector<NodeId> monomials;
  std::vector<int> row;
  for (std::size_t i = 0; i < f.row_count(); ++i) {
    f.decode(i, row);
    std::vector<NodeId> parts{b.constant(f.values[i])};
    for (std::size_t k = 0; k < row.size(); ++k)
      parts.push_back(b.indicator(static_cast<std::uint32_t>(k), row[k]));
    monomials.push_back(b.mul(std::move(parts)));
  }
  return b.take(b.add(std::move(monomials)));
}

namespace {

// Structural copy into a builder, remapping variable positions and keeping
// symbolic parameters by name.
NodeId copy_into(AcBuilder& b, const ArithmeticCircuit& src, const std::vector<std::uint32_t>& var_map,
                 std::vector<NodeId>& map) {
  map.resize(src.node_count());
  for (NodeId id = 0; id < src.node_count(); ++id) {
    const AcNode& n = src.node(id);
    switch (n.kind) {
      case AcKind::Indicator:
        map[id] = b.indicator(var_map[n.var], n.value);
        break;
      case AcKind::Constant:
        map[id] = b.constant(src.constant(id));
        break;
      case AcKind::Param:
        map[id] = b.param(src.params[n.slot].name, src.params[n.slot].bound);
        break;
      case AcKind::Add: {
        std::vector<NodeId> ch;
        for (NodeId x : src.children(id)) ch.push_back(map[x]);
        map[id] = b.add(std::move(ch));
        break;
      }
      case AcKind::Mul: {
        std::vector<NodeId> ch;
        for (NodeId x : src.children(id)) ch.push_back(map[x]);
        map[id] = b.mul(std::move(ch));
        break;
      }
    }
  }
  return map[src.root()];
}

}  // namespace

ArithmeticCircuit multiply_circuits(const ArithmeticCircuit& a, const ArithmeticCircuit& b) {
  std::vector<DiscreteVar> vars = a.vars;
  std::vector<std::uint32_t> bmap;
  for (const auto& v : b.vars) {
    std::size_t at = vars.size();
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (vars[i].name == v.name) at = i;
    if (at == vars.size()) {
      vars.push_back(v);
      bmap.push_back(static_cast<std::uint32_t>(vars.size() - 1));
    } else {
      if (vars[at].labels != v.labels)
        fail_precondition("multiply_circuits: variable '" + v.name + "' has mismatched domains");
      bmap.push_back(static_cast<std::uint32_t>(at));
    }
  }
  std::vector<std::uint32_t> amap(a.vars.size());
  for (std::size_t i = 0; i < amap.size(); ++i) amap[i] = static_cast<std::uint32_t>(i);

  AcBuilder out(vars);
  std::vector<NodeId> m1, m2;
  NodeId ra = copy_into(out, a, amap, m1);
  NodeId rb = copy_into(out, b, bmap, m2);
  return out.take(out.mul({ra, rb}));
}

ArithmeticCircuit ac_smooth(const ArithmeticCircuit& ac) {
  std::vector<VarSet> vars = ac_node_vars(ac);
  AcBuilder b(ac.vars);
  std::vector<NodeId> map(ac.node_count());

  auto pad = [&](NodeId mapped, const VarSet& have, const VarSet& want) -> NodeId {
    VarSet missing = VarSet::difference(want, have);
    if (missing.empty()) return mapped;
    std::vector<NodeId> parts{mapped};
    for (int v : missing.to_vector()) parts.push_back(b.value_gadget(static_cast<std::uint32_t>(v - 1)));
    return b.mul(std::move(parts));
  };

  for (NodeId id = 0; id < ac.node_count(); ++id) {
    const AcNode& n = ac.node(id);
    switch (n.kind) {
      case AcKind::Indicator:
        map[id] = b.indicator(n.var, n.value);
        break;
      case AcKind::Constant:
        map[id] = b.constant(ac.constant(id));
        break;
      case AcKind::Param:
        map[id] = b.param(ac.params[n.slot].name, ac.params[n.slot].bound);
        break;
      case AcKind::Mul: {
        std::vector<NodeId> ch;
        for (NodeId x : ac.children(id)) ch.push_back(map[x]);
        map[id] = b.mul(std::move(ch));
        break;
      }
      case AcKind::Add: {
        std::vector<NodeId> ch;
        for (NodeId x : ac.children(id)) ch.push_back(pad(map[x], vars[x], vars[id]));
        map[id] = b.add(std::move(ch));
        break;
      }
    }
  }
  VarSet universe(static_cast<int>(ac.vars.size()));
  for (int v = 1; v <= static_cast<int>(ac.vars.size()); ++v) universe.add(v);
  return b.take(pad(map[ac.root()], vars[ac.root()], universe));
}

template <class Num>
MpeResult<Num> mpe(const MaximizerCircuit& mc, const Instantiation& e, const MpeOptions& opts) {
  const ArithmeticCircuit& ac = mc.circuit;
  if (!opts.skip_property_checks) {
    AcProperties props = check_ac_properties(ac, opts.row_cap);
    if (!props.all_hold())
      fail_precondition("mpe requires a deterministic, decomposable, smooth source circuit");
  }
  IndicatorSetting s = IndicatorSetting::of(ac.vars, e);
  std::vector<Num> val(ac.node_count(), Num(0));
  for (NodeId id = 0; id < ac.node_count(); ++id) {
    const AcNode& n = ac.node(id);
    switch (n.kind) {
      case AcKind::Indicator:
        val[id] = from_rat<Num>(s.get(n.var, n.value));
        break;
      case AcKind::Constant:
        val[id] = from_rat<Num>(ac.constant(id));
        break;
      case AcKind::Param: {
        const SymbolicParam& p = ac.params[n.slot];
        if (!p.bound) fail_precondition("unbound symbolic parameter '" + p.name + "'");
        val[id] = from_rat<Num>(*p.bound);
        break;
      }
      case AcKind::Add: {
        bool first = true;
        Num best(0);
        for (NodeId ch : ac.children(id)) {
          if (first || val[ch] > best) {
            best = val[ch];
            first = false;
          }
        }
        val[id] = best;
        break;
      }
      case AcKind::Mul: {
        Num v(1);
        for (NodeId ch : ac.children(id)) v *= val[ch];
        val[id] = v;
        break;
      }
    }
  }

  MpeResult<Num> out{val[ac.root()], Instantiation(ac.vars.size())};
  std::vector<NodeId> stack{ac.root()};
  std::vector<char> visited(ac.node_count(), 0);
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    if (visited[id]) continue;
    visited[id] = 1;
    const AcNode& n = ac.node(id);
    if (n.kind == AcKind::Indicator) {
      out.instantiation.bind(n.var, static_cast<int>(n.value));
    } else if (n.kind == AcKind::Mul) {
      for (NodeId ch : ac.children(id)) stack.push_back(ch);
    } else if (n.kind == AcKind::Add) {
      NodeId pick = 0;
      bool found = false;
      for (NodeId ch : ac.children(id)) {
        if (val[ch] == val[id] && (!found || ch < pick)) {
          pick = ch;
          found = true;
        }
      }
      if (found) stack.push_back(pick);
    }
  }
  // Evidence wins over the trace: when every compatible row is zero the max
  // subcircuit may run through zeroed indicators.
  for (std::size_t v = 0; v < ac.vars.size(); ++v) {
    if (e.bound(v))
      out.instantiation.bind(v, e.value(v));
    else if (!out.instantiation.bound(v))
      out.instantiation.bind(v, 0);
  }
  return out;
}

template MpeResult<double> mpe<double>(const MaximizerCircuit&, const Instantiation&,
                                       const MpeOptions&);
template MpeResult<Rat> mpe<Rat>(const MaximizerCircuit&, const Instantiation&, const MpeOptions&);

std::vector<CompleteSubcircuit> enumerate_complete_subcircuits(const ArithmeticCircuit& ac,
                                                               std::size_t cap) {
  struct Partial {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> term;
    std::vector<NodeId> consts;
    std::vector<std::pair<NodeId, NodeId>> edges;
  };
  auto merge_sorted = [](auto& into, const auto& from) {
    auto merged = into;
    merged.insert(merged.end(), from.begin(), from.end());
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    into = std::move(merged);
  };
  // Choices must stay consistent per adder across a shared sub-DAG;
  // multipliers legitimately keep all their outgoing edges.
  auto conflicting = [&ac](const std::vector<std::pair<NodeId, NodeId>>& edges) {
    for (std::size_t i = 1; i < edges.size(); ++i)
      if (edges[i].first == edges[i - 1].first && edges[i].second != edges[i - 1].second &&
          ac.node(edges[i].first).kind == AcKind::Add)
        return true;
    return false;
  };

  std::vector<std::vector<Partial>> memo(ac.node_count());
  for (NodeId id = 0; id < ac.node_count(); ++id) {
    const AcNode& n = ac.node(id);
    std::vector<Partial>& out = memo[id];
    switch (n.kind) {
      case AcKind::Indicator:
        out.push_back(Partial{{{n.var, n.value}}, {}, {}});
        break;
      case AcKind::Constant:
        out.push_back(Partial{{}, {id}, {}});
        break;
      case AcKind::Param: {
        if (!ac.params[n.slot].bound)
          fail_precondition("complete subcircuits need bound parameters");
        out.push_back(Partial{{}, {id}, {}});
        break;
      }
      case AcKind::Add: {
        for (NodeId ch : ac.children(id)) {
          for (const Partial& p : memo[ch]) {
            Partial q = p;
            merge_sorted(q.edges, std::vector<std::pair<NodeId, NodeId>>{{id, ch}});
            if (conflicting(q.edges)) continue;
            out.push_back(std::move(q));
            if (out.size() > cap) fail_precondition("subcircuit cap exceeded");
          }
        }
        break;
      }
      case AcKind::Mul: {
        out.push_back(Partial{});
        for (NodeId ch : ac.children(id)) {
          std::vector<Partial> next;
          for (const Partial& acc : out) {
            for (const Partial& p : memo[ch]) {
              Partial q = acc;
              merge_sorted(q.term, p.term);
              merge_sorted(q.consts, p.consts);
              merge_sorted(q.edges, p.edges);
              merge_sorted(q.edges, std::vector<std::pair<NodeId, NodeId>>{{id, ch}});
              if (conflicting(q.edges)) continue;
              next.push_back(std::move(q));
              if (next.size() > cap) fail_precondition("subcircuit cap exceeded");
            }
          }
          out = std::move(next);
        }
        break;
      }
    }
  }

  std::vector<CompleteSubcircuit> result;
  for (const auto& p : memo[ac.root()]) {
    CompleteSubcircuit s;
    s.term = p.term;
    s.coefficient = Rat(1);
    for (NodeId cid : p.consts) {
      const AcNode& n = ac.node(cid);
      s.coefficient *= n.kind == AcKind::Constant ? ac.constant(cid) : *ac.params[n.slot].bound;
    }
    s.edges = p.edges;
    result.push_back(std::move(s));
  }
  return result;
}

template <class Num>
BackpropResult<Num> backprop(const ArithmeticCircuit& ac, const IndicatorSetting& s) {
  std::vector<Num> val = ac_forward<Num>(ac, s);
  std::vector<Num> deriv(ac.node_count(), Num(0));
  deriv[ac.root()] = Num(1);
  std::vector<Num> prefix, suffix;
  for (NodeId id = ac.node_count(); id-- > 0;) {
    const AcNode& n = ac.node(id);
    auto ch = ac.children(id);
    if (n.kind == AcKind::Add) {
      for (NodeId x : ch) deriv[x] += deriv[id];
    } else if (n.kind == AcKind::Mul) {
      std::size_t k = ch.size();
      prefix.assign(k + 1, Num(1));
      suffix.assign(k + 1, Num(1));
      for (std::size_t i = 0; i < k; ++i) prefix[i + 1] = prefix[i] * val[ch[i]];
      for (std::size_t i = k; i-- > 0;) suffix[i] = suffix[i + 1] * val[ch[i]];
      for (std::size_t i = 0; i < k; ++i) deriv[ch[i]] += deriv[id] * prefix[i] * suffix[i + 1];
    }
  }
  return {val[ac.root()], std::move(deriv)};
}

template BackpropResult<double> backprop<double>(const ArithmeticCircuit&, const IndicatorSetting&);
template BackpropResult<Rat> backprop<Rat>(const ArithmeticCircuit&, const IndicatorSetting&);

Likelihoods Likelihoods::ones(const std::vector<DiscreteVar>& vars) {
  Likelihoods l;
  for (const auto& v : vars) l.per_var.emplace_back(v.domain_size(), Rat(1));
  return l;
}

Likelihoods parse_likelihoods(std::istream& in, const std::vector<DiscreteVar>& vars) {
  Likelihoods l = Likelihoods::ones(vars);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string name, label, value;
    if (!(ls >> name)) continue;
    if (name == "c") continue;
    if (!(ls >> label >> value)) fail_format("likelihood line needs '<var> <label> <value>'");
    std::size_t var = vars.size();
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (vars[i].name == name) var = i;
    if (var == vars.size()) fail_format("unknown variable '" + name + "' in likelihoods");
    int val = -1;
    for (std::size_t i = 0; i < vars[var].labels.size(); ++i)
      if (vars[var].labels[i] == label) val = static_cast<int>(i);
    if (val < 0) fail_format("unknown label '" + label + "' for variable '" + name + "'");
    Rat q = parse_decimal(value);
    if (q < 0) fail_format("likelihoods must be non-negative");
    l.per_var[var][val] = q;
  }
  return l;
}

double soft_evidence(const ArithmeticCircuit& ac, const Likelihoods& lik, const Instantiation& e,
                     double normalization_tolerance) {
  AcProperties props = check_ac_properties(ac);
  if (!props.all_hold())
    fail_precondition("soft evidence requires a deterministic, decomposable, smooth circuit");
  Instantiation empty(ac.vars.size());
  double total = ac_evaluate<double>(ac, empty);
  if (std::abs(total - 1.0) > normalization_tolerance)
    fail_precondition("soft evidence requires a circuit whose factor sums to 1");

  IndicatorSetting base = IndicatorSetting::ones(ac.vars);
  for (std::size_t var = 0; var < ac.vars.size(); ++var)
    for (std::size_t val = 0; val < lik.per_var[var].size(); ++val)
      base.set(var, val, lik.per_var[var][val]);
  double a = ac_forward<double>(ac, base)[ac.root()];
  if (a == 0) fail_precondition("soft evidence normalizer is zero");
  IndicatorSetting with_e = base;
  with_e.restrict_to(e);
  double b = ac_forward<double>(ac, with_e)[ac.root()];
  return b / a;
}

ArithmeticCircuit parse_ac(std::istream& in) {
  std::string line;
  bool saw_header = false;
  std::size_t declared_nodes = 0, declared_edges = 0;
  std::vector<DiscreteVar> vars;
  struct RawNode {
    char op;
    std::string a, b;
    std::vector<NodeId> children;
  };
  std::vector<RawNode> raw;
  std::size_t edges = 0;
  bool nodes_started = false;

  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "c" && !saw_header) continue;  // leading comments
    if (tok == "ac") {
      if (saw_header) fail_format("duplicate ac header");
      if (!(ls >> declared_nodes >> declared_edges)) fail_format("bad ac header");
      saw_header = true;
      continue;
    }
    if (!saw_header) fail_format("missing ac header");
    if (tok == "v") {
      if (nodes_started) fail_format("variable declarations must precede nodes");
      std::string name;
      int k;
      if (!(ls >> name >> k) || k < 2) fail_format("bad variable declaration");
      DiscreteVar v;
      v.name = name;
      std::string label;
      while (ls >> label) v.labels.push_back(label);
      if (v.labels.empty()) v = DiscreteVar::with_default_labels(name, k);
      if (v.domain_size() != k) fail_format("variable '" + name + "' label count mismatch");
      vars.push_back(std::move(v));
      continue;
    }
    RawNode r;
    r.op = tok[0];
    if (tok == "l") {
      if (!(ls >> r.a >> r.b)) fail_format("bad indicator line");
    } else if (tok == "c") {
      if (!(ls >> r.a)) fail_format("bad constant line");
    } else if (tok == "p") {
      if (!(ls >> r.a)) fail_format("bad parameter line");
    } else if (tok == "+" || tok == "*") {
      std::size_t count;
      if (!(ls >> count)) fail_format("missing child count");
      for (std::size_t i = 0; i < count; ++i) {
        long id;
        if (!(ls >> id)) fail_format("truncated child list");
        if (id < 0 || static_cast<std::size_t>(id) >= raw.size())
          fail_format("forward or dangling child reference");
        r.children.push_back(static_cast<NodeId>(id));
      }
      edges += count;
    } else {
      fail_format("bad ac opcode '" + tok + "'");
    }
    nodes_started = true;
    raw.push_back(std::move(r));
  }
  if (!saw_header) fail_format("missing ac header");
  if (raw.size() != declared_nodes) fail_format("ac node count mismatch");
  if (edges != declared_edges) fail_format("ac edge count mismatch");
  if (raw.empty()) fail_format("empty ac");

  AcBuilder b(vars);
  std::vector<NodeId> map(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const RawNode& r = raw[i];
    switch (r.op) {
      case 'l': {
        int var = -1;
        for (std::size_t k = 0; k < vars.size(); ++k)
          if (vars[k].name == r.a) var = static_cast<int>(k);
        if (var < 0) fail_format("indicator references unknown variable '" + r.a + "'");
        int val = -1;
        for (std::size_t k = 0; k < vars[var].labels.size(); ++k)
          if (vars[var].labels[k] == r.b) val = static_cast<int>(k);
        if (val < 0) fail_format("indicator references unknown label '" + r.b + "'");
        map[i] = b.indicator(static_cast<std::uint32_t>(var), static_cast<std::uint32_t>(val));
        break;
      }
      case 'c':
        map[i] = b.constant(parse_decimal(r.a));
        break;
      case 'p':
        map[i] = b.param(r.a);
        break;
      case '+': {
        std::vector<NodeId> ch;
        for (NodeId x : r.children) ch.push_back(map[x]);
        map[i] = b.add(std::move(ch));
        break;
      }
      case '*': {
        std::vector<NodeId> ch;
        for (NodeId x : r.children) ch.push_back(map[x]);
        map[i] = b.mul(std::move(ch));
        break;
      }
    }
  }
  return b.take(map[raw.size() - 1]);
}

ArithmeticCircuit parse_ac_string(const std::string& text) {
  std::istringstream in(text);
  return parse_ac(in);
}

void serialize_ac(const ArithmeticCircuit& ac, std::ostream& out) {
  out << "ac " << ac.node_count() << ' ' << ac.edge_count() << '\n';
  for (const auto& v : ac.vars) {
    out << "v " << v.name << ' ' << v.domain_size();
    for (const auto& l : v.labels) out << ' ' << l;
    out << '\n';
  }
  for (NodeId id = 0; id < ac.node_count(); ++id) {
    const AcNode& n = ac.node(id);
    switch (n.kind) {
      case AcKind::Indicator:
        out << "l " << ac.vars[n.var].name << ' ' << ac.vars[n.var].labels[n.value] << '\n';
        break;
      case AcKind::Constant:
        out << "c " << decimal_string(ac.constant(id)) << '\n';
        break;
      case AcKind::Param:
        out << "p " << ac.params[n.slot].name << '\n';
        break;
      case AcKind::Add: {
        out << "+ " << ac.children(id).size();
        for (NodeId ch : ac.children(id)) out << ' ' << ch;
        out << '\n';
        break;
      }
      case AcKind::Mul: {
        out << "* " << ac.children(id).size();
        for (NodeId ch : ac.children(id)) out << ' ' << ch;
        out << '\n';
        break;
      }
    }
  }
}

}  // namespace tc
