#include "tc/bn.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "tc/analysis.hpp"
#include "tc/error.hpp"

namespace tc {

int BayesNet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].var.name == name) return static_cast<int>(i);
  return -1;
}

std::vector<DiscreteVar> BayesNet::variables() const {
  std::vector<DiscreteVar> out;
  for (const auto& n : nodes) out.push_back(n.var);
  return out;
}

std::size_t BayesNet::cpt_rows(int node) const {
  std::size_t rows = nodes[node].var.domain_size();
  for (int p : nodes[node].parents) rows *= nodes[p].var.domain_size();
  return rows;
}

std::size_t BayesNet::cpt_row_of(int node, std::span<const int> full_row) const {
  std::size_t idx = 0;
  for (int p : nodes[node].parents) idx = idx * nodes[p].var.domain_size() + full_row[p];
  return idx * nodes[node].var.domain_size() + full_row[node];
}

BayesNet parse_bn(std::istream& in) {
  BayesNet bn;
  bool saw_header = false;
  std::string line;
  std::vector<int> cpt_given;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "c") continue;
    if (tok == "net") {
      if (saw_header) fail_format("duplicate net header");
      saw_header = true;
      continue;
    }
    if (!saw_header) fail_format("missing net header");
    if (tok == "var") {
      std::string name;
      int k;
      if (!(ls >> name >> k) || k < 2) fail_format("bad var line");
      if (bn.index_of(name) >= 0) fail_format("duplicate variable '" + name + "'");
      DiscreteVar v;
      v.name = name;
      std::string label;
      while (ls >> label) v.labels.push_back(label);
      if (v.labels.empty()) v = DiscreteVar::with_default_labels(name, k);
      if (v.domain_size() != k) fail_format("var '" + name + "' label count mismatch");
      bn.nodes.push_back(BayesNode{std::move(v), {}, {}});
      cpt_given.push_back(0);
    } else if (tok == "parents") {
      std::string name;
      if (!(ls >> name)) fail_format("bad parents line");
      int node = bn.index_of(name);
      if (node < 0) fail_format("parents line for unknown variable '" + name + "'");
      std::string pname;
      while (ls >> pname) {
        int p = bn.index_of(pname);
        if (p < 0) fail_format("unknown parent '" + pname + "'");
        if (p == node) fail_format("variable '" + name + "' cannot be its own parent");
        bn.nodes[node].parents.push_back(p);
      }
    } else if (tok == "cpt") {
      std::string name;
      if (!(ls >> name)) fail_format("bad cpt line");
      int node = bn.index_of(name);
      if (node < 0) fail_format("cpt line for unknown variable '" + name + "'");
      std::string value;
      while (ls >> value) bn.nodes[node].cpt.push_back(parse_decimal(value));
      cpt_given[node] = 1;
    } else {
      fail_format("bad bn line '" + line + "'");
    }
  }
  if (!saw_header) fail_format("missing net header");
  if (bn.nodes.empty()) fail_format("empty network");
  for (std::size_t i = 0; i < bn.nodes.size(); ++i) {
    if (!cpt_given[i]) fail_format("missing cpt for '" + bn.nodes[i].var.name + "'");
    if (bn.nodes[i].cpt.size() != bn.cpt_rows(static_cast<int>(i)))
      fail_format("cpt size mismatch for '" + bn.nodes[i].var.name + "'");
  }

  // Acyclicity.
  std::vector<int> state(bn.nodes.size(), 0);
  std::function<void(int)> dfs = [&](int v) {
    state[v] = 1;
    for (int p : bn.nodes[v].parents) {
      if (state[p] == 1) fail_format("cycle through variable '" + bn.nodes[p].var.name + "'");
      if (state[p] == 0) dfs(p);
    }
    state[v] = 2;
  };
  for (std::size_t i = 0; i < bn.nodes.size(); ++i)
    if (state[i] == 0) dfs(static_cast<int>(i));

  // Column normalization, 1e-9 in the floating view.
  for (std::size_t i = 0; i < bn.nodes.size(); ++i) {
    const BayesNode& n = bn.nodes[i];
    int k = n.var.domain_size();
    for (std::size_t base = 0; base < n.cpt.size(); base += k) {
      Rat total(0);
      for (int v = 0; v < k; ++v) {
        if (n.cpt[base + v] < 0) fail_format("negative cpt entry for '" + n.var.name + "'");
        total += n.cpt[base + v];
      }
      if (std::abs(total.get_d() - 1.0) > 1e-9)
        fail_format("cpt column for '" + n.var.name + "' does not sum to 1");
    }
  }
  return bn;
}

BayesNet parse_bn_string(const std::string& text) {
  std::istringstream in(text);
  return parse_bn(in);
}

void serialize_bn(const BayesNet& bn, std::ostream& out) {
  out << "net\n";
  for (const auto& n : bn.nodes) {
    out << "var " << n.var.name << ' ' << n.var.domain_size();
    for (const auto& l : n.var.labels) out << ' ' << l;
    out << '\n';
  }
  for (const auto& n : bn.nodes) {
    if (n.parents.empty()) continue;
    out << "parents " << n.var.name;
    for (int p : n.parents) out << ' ' << bn.nodes[p].var.name;
    out << '\n';
  }
  for (const auto& n : bn.nodes) {
    out << "cpt " << n.var.name;
    for (const Rat& v : n.cpt) out << ' ' << decimal_string(v);
    out << '\n';
  }
}

Factor joint_factor(const BayesNet& bn, std::size_t row_cap) {
  Factor f;
  f.vars = bn.variables();
  std::size_t rows = f.row_count();
  if (rows > row_cap) fail_precondition("joint_factor cap exceeded");
  f.values.reserve(rows);
  std::vector<int> row;
  for (std::size_t i = 0; i < rows; ++i) {
    f.decode(i, row);
    Rat value(1);
    for (std::size_t n = 0; n < bn.nodes.size(); ++n)
      value *= bn.nodes[n].cpt[bn.cpt_row_of(static_cast<int>(n), row)];
    f.values.push_back(value);
  }
  return f;
}

WmcEncoding encode_wmc(const BayesNet& bn) {
  WmcEncoding enc;
  enc.legend.push_back({});  // 1-based
  enc.indicator_base.assign(bn.nodes.size(), 0);

  int var_count = 0;
  for (std::size_t n = 0; n < bn.nodes.size(); ++n) {
    enc.indicator_base[n] = var_count + 1;
    for (int v = 0; v < bn.nodes[n].var.domain_size(); ++v) {
      ++var_count;
      WmcEncoding::LegendEntry entry;
      entry.kind = WmcEncoding::LegendEntry::Kind::indicator;
      entry.bn_node = static_cast<int>(n);
      entry.value = v;
      enc.legend.push_back(entry);
    }
  }
  std::vector<std::vector<Var>> param_vars(bn.nodes.size());
  for (std::size_t n = 0; n < bn.nodes.size(); ++n) {
    const BayesNode& node = bn.nodes[n];
    for (std::size_t row = 0; row < node.cpt.size(); ++row) {
      ++var_count;
      param_vars[n].push_back(var_count);
      WmcEncoding::LegendEntry entry;
      entry.kind = WmcEncoding::LegendEntry::Kind::parameter;
      entry.bn_node = static_cast<int>(n);
      entry.cpt_row = row;
      entry.theta = node.cpt[row];
      // Row name: child value given parent values.
      int k = node.var.domain_size();
      std::size_t parent_part = row / k;
      int child_value = static_cast<int>(row % k);
      std::string name = node.var.name + "=" + node.var.labels[child_value];
      if (!node.parents.empty()) {
        name += "|";
        std::vector<int> pvals(node.parents.size(), 0);
        std::size_t rem = parent_part;
        for (std::size_t p = node.parents.size(); p-- > 0;) {
          pvals[p] = static_cast<int>(rem % bn.nodes[node.parents[p]].var.domain_size());
          rem /= bn.nodes[node.parents[p]].var.domain_size();
        }
        for (std::size_t p = 0; p < node.parents.size(); ++p) {
          if (p) name += ",";
          const BayesNode& parent = bn.nodes[node.parents[p]];
          name += parent.var.name + "=" + parent.var.labels[pvals[p]];
        }
      }
      entry.param_name = name;
      enc.legend.push_back(entry);
    }
  }

  enc.cnf.var_count = var_count;
  enc.cnf.names.resize(var_count + 1);
  for (Var v = 1; v <= var_count; ++v) {
    const auto& entry = enc.legend[v];
    if (entry.kind == WmcEncoding::LegendEntry::Kind::indicator) {
      const BayesNode& node = bn.nodes[entry.bn_node];
      enc.cnf.names[v] = "I_" + node.var.name + "." + node.var.labels[entry.value];
    } else {
      enc.cnf.names[v] = "P" + std::to_string(v);
    }
  }

  // Exactly-one per network variable.
  for (std::size_t n = 0; n < bn.nodes.size(); ++n) {
    int k = bn.nodes[n].var.domain_size();
    Clause at_least;
    for (int v = 0; v < k; ++v) at_least.push_back(Literal{enc.indicator_var(static_cast<int>(n), v), true});
    enc.cnf.clauses.push_back(at_least);
    for (int v = 0; v < k; ++v)
      for (int w = v + 1; w < k; ++w)
        enc.cnf.clauses.push_back(
            {Literal{enc.indicator_var(static_cast<int>(n), v), false},
             Literal{enc.indicator_var(static_cast<int>(n), w), false}});
  }
  // Parameter-row equivalences.
  for (std::size_t n = 0; n < bn.nodes.size(); ++n) {
    const BayesNode& node = bn.nodes[n];
    int k = node.var.domain_size();
    for (std::size_t row = 0; row < node.cpt.size(); ++row) {
      Var pv = param_vars[n][row];
      std::size_t parent_part = row / k;
      int child_value = static_cast<int>(row % k);
      std::vector<Var> row_indicators;
      std::size_t rem = parent_part;
      for (std::size_t p = node.parents.size(); p-- > 0;) {
        int pval = static_cast<int>(rem % bn.nodes[node.parents[p]].var.domain_size());
        rem /= bn.nodes[node.parents[p]].var.domain_size();
        row_indicators.push_back(enc.indicator_var(node.parents[p], pval));
      }
      std::reverse(row_indicators.begin(), row_indicators.end());
      row_indicators.push_back(enc.indicator_var(static_cast<int>(n), child_value));

      Clause implies_param;  // indicators -> param
      for (Var iv : row_indicators) {
        implies_param.push_back(Literal{iv, false});
        enc.cnf.clauses.push_back({Literal{pv, false}, Literal{iv, true}});  // param -> indicator
      }
      implies_param.push_back(Literal{pv, true});
      enc.cnf.clauses.push_back(implies_param);
    }
  }

  enc.weights = WeightMap::units(var_count);
  for (std::size_t n = 0; n < bn.nodes.size(); ++n)
    for (std::size_t row = 0; row < bn.nodes[n].cpt.size(); ++row)
      enc.weights.set(Literal{param_vars[n][row], true}, bn.nodes[n].cpt[row]);
  return enc;
}

Assignment indicator_evidence(const WmcEncoding& enc, const BayesNet& bn, const Instantiation& e) {
  Assignment a(enc.cnf.var_count);
  for (std::size_t n = 0; n < bn.nodes.size(); ++n) {
    if (!e.bound(n)) continue;
    for (int v = 0; v < bn.nodes[n].var.domain_size(); ++v)
      a.bind(enc.indicator_var(static_cast<int>(n), v), v == e.value(n));
  }
  return a;
}

ArithmeticCircuit compile_to_ac(const BayesNet& bn, bool symbolic, const CompileOptions& copts) {
  WmcEncoding enc = encode_wmc(bn);
  NnfCircuit circuit = smooth(compile(enc.cnf, copts));

  AcBuilder b(bn.variables());
  // Weight-1 leaves (negative literals, True) vanish from products; the
  // sentinel avoids materializing constant-1 nodes.
  constexpr NodeId kIdentity = UINT32_MAX;
  std::vector<NodeId> map(circuit.node_count());

  for (NodeId id = 0; id < circuit.node_count(); ++id) {
    const NnfNode& n = circuit.node(id);
    switch (n.kind) {
      case NnfKind::True:
        map[id] = kIdentity;
        break;
      case NnfKind::False:
        map[id] = b.constant(Rat(0));
        break;
      case NnfKind::Literal: {
        const auto& entry = enc.legend[n.lit.var];
        if (!n.lit.positive) {
          map[id] = kIdentity;
        } else if (entry.kind == WmcEncoding::LegendEntry::Kind::indicator) {
          map[id] = b.indicator(static_cast<std::uint32_t>(entry.bn_node),
                                static_cast<std::uint32_t>(entry.value));
        } else if (symbolic) {
          map[id] = b.param(entry.param_name, entry.theta);
        } else {
          map[id] = b.constant(entry.theta);
        }
        break;
      }
      case NnfKind::And: {
        std::vector<NodeId> ch;
        for (NodeId x : circuit.children(id))
          if (map[x] != kIdentity) ch.push_back(map[x]);
        if (ch.empty())
          map[id] = kIdentity;
        else if (ch.size() == 1)
          map[id] = ch[0];
        else
          map[id] = b.mul(std::move(ch));
        break;
      }
      case NnfKind::Or: {
        std::vector<NodeId> ch;
        for (NodeId x : circuit.children(id))
          ch.push_back(map[x] == kIdentity ? b.constant(Rat(1)) : map[x]);
        map[id] = ch.size() == 1 ? ch[0] : b.add(std::move(ch));
        break;
      }
    }
  }
  NodeId root = map[circuit.root()] == kIdentity ? b.constant(Rat(1)) : map[circuit.root()];
  return ac_smooth(b.take(root));
}

ArithmeticCircuit bind_params(const ArithmeticCircuit& ac, const std::map<std::string, Rat>& values) {
  std::vector<std::string> missing;
  for (const auto& p : ac.params)
    if (!values.count(p.name)) missing.push_back(p.name);
  if (!missing.empty()) {
    std::string msg = "bind: missing values for";
    for (const auto& name : missing) msg += " '" + name + "'";
    fail_precondition(msg);
  }

  AcBuilder b(ac.vars);
  std::vector<NodeId> map(ac.node_count());
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
        map[id] = b.constant(values.at(ac.params[n.slot].name));
        break;
      case AcKind::Add: {
        std::vector<NodeId> ch;
        for (NodeId x : ac.children(id)) ch.push_back(map[x]);
        map[id] = b.add(std::move(ch));
        break;
      }
      case AcKind::Mul: {
        std::vector<NodeId> ch;
        for (NodeId x : ac.children(id)) ch.push_back(map[x]);
        map[id] = b.mul(std::move(ch));
        break;
      }
    }
  }
  return b.take(map[ac.root()]);
}

template <class Num>
BnMarginals<Num> bn_marginals(const ArithmeticCircuit& ac, const Instantiation& e) {
  require_marginal_properties(ac);
  BackpropResult<Num> bp = backprop<Num>(ac, IndicatorSetting::of(ac.vars, e));
  BnMarginals<Num> out;
  out.evidence_probability = bp.value;
  out.per_var.resize(ac.vars.size());
  for (std::size_t v = 0; v < ac.vars.size(); ++v)
    out.per_var[v].assign(ac.vars[v].domain_size(), Num(0));
  for (NodeId id = 0; id < ac.node_count(); ++id) {
    const AcNode& n = ac.node(id);
    if (n.kind != AcKind::Indicator) continue;
    out.per_var[n.var][n.value] += bp.partial[id];
  }
  return out;
}

template BnMarginals<double> bn_marginals<double>(const ArithmeticCircuit&, const Instantiation&);
template BnMarginals<Rat> bn_marginals<Rat>(const ArithmeticCircuit&, const Instantiation&);

}  // namespace tc
