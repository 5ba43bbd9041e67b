#include "tc/psdd.hpp"

#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "tc/error.hpp"

namespace tc {
namespace {

using Context = std::pair<SddId, VtreeId>;

// Visits every (node, vtree context) pair reachable from the root, reporting
// decision nodes and the variables that appear vacuously (these need
// Bernoulli parameters).
void scan_contexts(const SddManager& m, SddId root, std::set<SddId>* decisions,
                   std::set<Var>* free_vars) {
  const Vtree& vt = m.vtree();
  std::set<Context> seen;
  std::function<void(SddId, VtreeId)> walk = [&](SddId n, VtreeId v) {
    if (!seen.insert({n, v}).second) return;
    switch (m.kind(n)) {
      case SddManager::Kind::True:
        for (int y : vt.vars_below(v).to_vector()) free_vars->insert(y);
        break;
      case SddManager::Kind::False:
        break;
      case SddManager::Kind::Lit:
        for (int y : vt.vars_below(v).to_vector())
          if (y != m.lit(n).var) free_vars->insert(y);
        break;
      case SddManager::Kind::Decision: {
        VtreeId u = m.vtree_node(n);
        VarSet gap = VarSet::difference(vt.vars_below(v), vt.vars_below(u));
        for (int y : gap.to_vector()) free_vars->insert(y);
        decisions->insert(n);
        for (const SddElement& e : m.elements(n)) {
          // False-sub elements carry parameter zero and are never taken, so
          // nothing below them needs parameters.
          if (e.sub == m.false_node()) continue;
          walk(e.prime, vt.node(u).left);
          walk(e.sub, vt.node(u).right);
        }
        break;
      }
    }
  };
  walk(root, vt.root());
}

}  // namespace

Psdd attach_params(const SddManager& m, SddId root, PsddParams params) {
  if (root == m.false_node())
    fail_precondition("cannot parameterize an unsatisfiable SDD (empty support)");
  std::set<SddId> decisions;
  std::set<Var> free_vars;
  scan_contexts(m, root, &decisions, &free_vars);

  for (SddId d : decisions) {
    auto it = params.decisions.find(d);
    if (it == params.decisions.end())
      fail_precondition("missing parameters for decision node " + std::to_string(d));
    auto elems = m.elements(d);
    if (it->second.size() != elems.size())
      fail_precondition("parameter count mismatch at decision node " + std::to_string(d));
    Rat total(0);
    for (std::size_t i = 0; i < elems.size(); ++i) {
      const Rat& theta = it->second[i];
      if (theta < 0) fail_precondition("negative parameter at decision node " + std::to_string(d));
      if (elems[i].sub == m.false_node() && theta != 0)
        fail_precondition("nonzero parameter on a False-sub element at node " + std::to_string(d));
      total += theta;
    }
    if (total != 1)
      fail_precondition("non-normalized distribution at decision node " + std::to_string(d));
  }
  for (Var v : free_vars) {
    auto it = params.bernoullis.find(v);
    if (it == params.bernoullis.end())
      fail_precondition("missing Bernoulli parameter for variable " + std::to_string(v));
    if (it->second < 0 || it->second > 1)
      fail_precondition("Bernoulli parameter out of [0,1] for variable " + std::to_string(v));
  }
  return Psdd(&m, root, std::move(params), std::move(free_vars), std::move(decisions));
}

template <class Num>
Num psdd_evaluate(const Psdd& p, const Assignment& x) {
  const SddManager& m = p.manager();
  const Vtree& vt = m.vtree();
  if (!x.complete() || x.var_count() < vt.var_count())
    fail_precondition("psdd_evaluate needs a complete instantiation");

  auto bern = [&](Var y) -> Num {
    Rat theta = p.params().bernoullis.at(y);
    Rat v = x.value(y) ? theta : Rat(1) - theta;
    if constexpr (std::is_same_v<Num, double>)
      return v.get_d();
    else
      return v;
  };
  auto bern_product = [&](const VarSet& vars, Var skip) -> Num {
    Num out(1);
    for (int y : vars.to_vector())
      if (y != skip) out *= bern(y);
    return out;
  };

  std::map<Context, Num> memo;
  std::function<Num(SddId, VtreeId)> eval = [&](SddId n, VtreeId v) -> Num {
    auto it = memo.find({n, v});
    if (it != memo.end()) return it->second;
    Num out(0);
    switch (m.kind(n)) {
      case SddManager::Kind::True:
        out = bern_product(vt.vars_below(v), 0);
        break;
      case SddManager::Kind::False:
        out = Num(0);
        break;
      case SddManager::Kind::Lit: {
        Literal l = m.lit(n);
        if (x.value(l.var) != l.positive)
          out = Num(0);
        else
          out = bern_product(vt.vars_below(v), l.var);
        break;
      }
      case SddManager::Kind::Decision: {
        VtreeId u = m.vtree_node(n);
        VarSet gap = VarSet::difference(vt.vars_below(v), vt.vars_below(u));
        const std::vector<Rat>& thetas = p.params().decisions.at(n);
        auto elems = m.elements(n);
        for (std::size_t i = 0; i < elems.size(); ++i) {
          if (!m.evaluate(elems[i].prime, x)) continue;
          // The primes partition: exactly this element fires.
          if (thetas[i] == 0) break;
          Num theta = [&] {
            if constexpr (std::is_same_v<Num, double>)
              return thetas[i].get_d();
            else
              return thetas[i];
          }();
          out = theta * eval(elems[i].prime, vt.node(u).left) *
                eval(elems[i].sub, vt.node(u).right);
          break;
        }
        out = out * bern_product(gap, 0);
        break;
      }
    }
    memo.emplace(Context{n, v}, out);
    return out;
  };
  return eval(p.root(), vt.root());
}

template double psdd_evaluate<double>(const Psdd&, const Assignment&);
template Rat psdd_evaluate<Rat>(const Psdd&, const Assignment&);

ArithmeticCircuit psdd_to_ac(const Psdd& p) {
  const SddManager& m = p.manager();
  const Vtree& vt = m.vtree();
  std::vector<DiscreteVar> vars;
  for (int v = 1; v <= vt.var_count(); ++v)
    vars.push_back(DiscreteVar{"v" + std::to_string(v), {"0", "1"}});
  AcBuilder b(std::move(vars));

  // value index 1 <-> true
  auto indicator = [&](Var y, bool value) {
    return b.indicator(static_cast<std::uint32_t>(y - 1), value ? 1u : 0u);
  };
  std::map<Var, NodeId> bern_gadgets;
  auto bern_gadget = [&](Var y) {
    auto it = bern_gadgets.find(y);
    if (it != bern_gadgets.end()) return it->second;
    Rat theta = p.params().bernoullis.at(y);
    NodeId hi = b.mul({b.constant(theta), indicator(y, true)});
    NodeId lo = b.mul({b.constant(Rat(1) - theta), indicator(y, false)});
    NodeId g = b.add({hi, lo});
    bern_gadgets.emplace(y, g);
    return g;
  };
  auto pad = [&](std::vector<NodeId> parts, const VarSet& vars_to_fill, Var skip) {
    for (int y : vars_to_fill.to_vector())
      if (y != skip) parts.push_back(bern_gadget(y));
    return parts;
  };

  std::map<Context, NodeId> memo;
  std::function<NodeId(SddId, VtreeId)> build = [&](SddId n, VtreeId v) -> NodeId {
    auto it = memo.find({n, v});
    if (it != memo.end()) return it->second;
    NodeId out = 0;
    switch (m.kind(n)) {
      case SddManager::Kind::True: {
        std::vector<NodeId> parts = pad({}, vt.vars_below(v), 0);
        out = parts.size() == 1 ? parts[0] : b.mul(std::move(parts));
        break;
      }
      case SddManager::Kind::False:
        fail_precondition("False sub reached during AC extraction");
        break;
      case SddManager::Kind::Lit: {
        Literal l = m.lit(n);
        std::vector<NodeId> parts = pad({indicator(l.var, l.positive)}, vt.vars_below(v), l.var);
        out = parts.size() == 1 ? parts[0] : b.mul(std::move(parts));
        break;
      }
      case SddManager::Kind::Decision: {
        VtreeId u = m.vtree_node(n);
        const std::vector<Rat>& thetas = p.params().decisions.at(n);
        auto elems = m.elements(n);
        std::vector<NodeId> branches;
        for (std::size_t i = 0; i < elems.size(); ++i) {
          if (elems[i].sub == m.false_node()) continue;  // parameter pinned to 0
          branches.push_back(b.mul({b.constant(thetas[i]),
                                    build(elems[i].prime, vt.node(u).left),
                                    build(elems[i].sub, vt.node(u).right)}));
        }
        NodeId inner = branches.size() == 1 ? branches[0] : b.add(std::move(branches));
        VarSet gap = VarSet::difference(vt.vars_below(v), vt.vars_below(u));
        std::vector<NodeId> parts = pad({inner}, gap, 0);
        out = parts.size() == 1 ? parts[0] : b.mul(std::move(parts));
        break;
      }
    }
    memo.emplace(Context{n, v}, out);
    return out;
  };
  return b.take(build(p.root(), vt.root()));
}

Assignment Dataset::row_assignment(std::size_t i) const {
  Assignment a(var_count);
  for (int v = 1; v <= var_count; ++v) a.bind(v, rows[i][v - 1] != 0);
  return a;
}

long Dataset::total_count() const {
  long total = 0;
  for (long c : counts) total += c;
  return total;
}

Dataset parse_dataset(std::istream& in) {
  Dataset d;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<long> fields;
    std::string tok;
    std::istringstream ls(line);
    while (std::getline(ls, tok, ',')) {
      std::size_t a = tok.find_first_not_of(" \t");
      if (a == std::string::npos) fail_format("empty field in dataset row");
      try {
        fields.push_back(std::stol(tok));
      } catch (...) {
        fail_format("non-numeric dataset field '" + tok + "'");
      }
    }
    if (fields.empty()) continue;
    bool has_count = false;
    // A trailing field other than 0/1 is a multiplicity.
    if (fields.back() != 0 && fields.back() != 1) has_count = true;
    if (d.var_count != 0) {
      int expect_bits = d.var_count;
      if (static_cast<int>(fields.size()) == expect_bits + 1) has_count = true;
      else if (static_cast<int>(fields.size()) != expect_bits)
        fail_format("dataset row arity mismatch");
    }
    long count = 1;
    if (has_count) {
      count = fields.back();
      fields.pop_back();
      if (count < 1) fail_format("dataset multiplicity must be positive");
    }
    std::vector<char> row;
    for (long f : fields) {
      if (f != 0 && f != 1) fail_format("dataset values must be 0 or 1");
      row.push_back(static_cast<char>(f));
    }
    if (d.var_count == 0)
      d.var_count = static_cast<int>(row.size());
    else if (static_cast<int>(row.size()) != d.var_count)
      fail_format("dataset row arity mismatch");
    d.rows.push_back(std::move(row));
    d.counts.push_back(count);
  }
  if (d.rows.empty()) fail_format("empty dataset");
  return d;
}

LearnResult learn_ml_complete(const SddManager& m, SddId root, const Dataset& d,
                              const LearnOptions& opts) {
  if (root == m.false_node()) fail_precondition("cannot learn over an unsatisfiable SDD");
  if (d.rows.empty()) fail_precondition("empty dataset");
  if (d.var_count != m.vtree().var_count())
    fail_precondition("dataset arity does not match the vtree");
  const Vtree& vt = m.vtree();

  std::set<SddId> decisions;
  std::set<Var> free_vars;
  scan_contexts(m, root, &decisions, &free_vars);

  std::map<SddId, std::vector<long>> element_counts;
  for (SddId dnode : decisions) element_counts[dnode].assign(m.elements(dnode).size(), 0);
  std::map<Var, std::pair<long, long>> bern_counts;  // var -> (true count, total)
  for (Var v : free_vars) bern_counts[v] = {0, 0};
  std::size_t rejected = 0;

  bool any_routed = false;
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    Assignment a = d.row_assignment(i);
    long c = d.counts[i];
    if (!m.evaluate(root, a)) {
      rejected += static_cast<std::size_t>(c);
      continue;
    }
    any_routed = true;
    std::function<void(SddId, VtreeId)> route = [&](SddId n, VtreeId v) {
      auto count_free = [&](const VarSet& vars, Var skip) {
        for (int y : vars.to_vector()) {
          if (y == skip) continue;
          auto& [t, total] = bern_counts[y];
          if (a.value(y)) t += c;
          total += c;
        }
      };
      switch (m.kind(n)) {
        case SddManager::Kind::True:
          count_free(vt.vars_below(v), 0);
          break;
        case SddManager::Kind::False:
          break;
        case SddManager::Kind::Lit:
          count_free(vt.vars_below(v), m.lit(n).var);
          break;
        case SddManager::Kind::Decision: {
          VtreeId u = m.vtree_node(n);
          count_free(VarSet::difference(vt.vars_below(v), vt.vars_below(u)), 0);
          auto elems = m.elements(n);
          for (std::size_t k = 0; k < elems.size(); ++k) {
            if (!m.evaluate(elems[k].prime, a)) continue;
            element_counts[n][k] += c;
            route(elems[k].prime, vt.node(u).left);
            route(elems[k].sub, vt.node(u).right);
            break;
          }
          break;
        }
      }
    };
    route(root, vt.root());
  }
  if (!any_routed) fail_precondition("every dataset row falsifies the SDD");

  const Rat& alpha = opts.alpha;
  PsddParams params;
  for (SddId dnode : decisions) {
    auto elems = m.elements(dnode);
    const std::vector<long>& counts = element_counts[dnode];
    std::size_t feasible = 0;
    long total = 0;
    for (std::size_t k = 0; k < elems.size(); ++k) {
      if (elems[k].sub != m.false_node()) ++feasible;
      total += counts[k];
    }
    std::vector<Rat> thetas(elems.size(), Rat(0));
    Rat denom = Rat(total) + alpha * Rat(static_cast<long>(feasible));
    for (std::size_t k = 0; k < elems.size(); ++k) {
      if (elems[k].sub == m.false_node()) continue;  // pinned to 0
      if (denom == 0)
        thetas[k] = make_rat(1, static_cast<long>(feasible));
      else
        thetas[k] = (Rat(counts[k]) + alpha) / denom;
    }
    params.decisions.emplace(dnode, std::move(thetas));
  }
  for (Var v : free_vars) {
    auto [t, total] = bern_counts[v];
    Rat denom = Rat(total) + alpha * 2;
    Rat theta = denom == 0 ? make_rat(1, 2) : (Rat(t) + alpha) / denom;
    theta.canonicalize();
    params.bernoullis.emplace(v, theta);
  }
  for (auto& [node, thetas] : params.decisions)
    for (Rat& t : thetas) t.canonicalize();

  return LearnResult{attach_params(m, root, std::move(params)), rejected};
}

double log_likelihood(const Psdd& p, const Dataset& d) {
  double ll = 0;
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    double v = psdd_evaluate<double>(p, d.row_assignment(i));
    ll += d.counts[i] * std::log(v);
  }
  return ll;
}

Psdd parse_psdd(std::istream& in, SddManager& m) {
  PsddTextParams raw;
  ParsedSdd parsed = parse_sdd(in, m, &raw);
  PsddParams params;
  for (const auto& [file_id, thetas] : raw.decisions) {
    if (file_id >= parsed.by_file_id.size()) fail_format("P line references unknown node");
    SddId node = parsed.by_file_id[file_id];
    const std::vector<SddElement>& file_elems = parsed.file_elements[file_id];
    if (m.kind(node) != SddManager::Kind::Decision || file_elems.empty())
      fail_format("P line on a non-decision node");
    auto elems = m.elements(node);
    if (elems.size() != file_elems.size() || thetas.size() != file_elems.size())
      fail_format("P line arity mismatch (file decision not canonical?)");
    std::vector<Rat> aligned(elems.size(), Rat(0));
    for (std::size_t i = 0; i < file_elems.size(); ++i) {
      std::size_t at = elems.size();
      for (std::size_t k = 0; k < elems.size(); ++k)
        if (elems[k].prime == file_elems[i].prime && elems[k].sub == file_elems[i].sub) at = k;
      if (at == elems.size()) fail_format("P line element mismatch (file decision not canonical?)");
      aligned[at] = parse_decimal(thetas[i]);
    }
    params.decisions.emplace(node, std::move(aligned));
  }
  for (const auto& [leaf, theta] : raw.bernoullis) {
    if (leaf >= m.vtree().node_count() || !m.vtree().node(leaf).is_leaf())
      fail_format("B line must reference a vtree leaf");
    params.bernoullis.emplace(m.vtree().node(leaf).var, parse_decimal(theta));
  }
  return attach_params(m, parsed.root, std::move(params));
}

void serialize_psdd(const Psdd& p, std::ostream& out) {
  const SddManager& m = p.manager();
  std::ostringstream sdd_text;
  serialize_sdd(m, p.root(), sdd_text);
  out << sdd_text.str();

  // Recover the emission ids to address P lines.
  std::vector<SddId> order;
  std::map<SddId, std::size_t> index;
  std::function<void(SddId)> visit = [&](SddId id) {
    if (index.count(id)) return;
    if (m.kind(id) == SddManager::Kind::Decision) {
      for (const SddElement& e : m.elements(id)) {
        visit(e.prime);
        visit(e.sub);
      }
    }
    index.emplace(id, order.size());
    order.push_back(id);
  };
  visit(p.root());
  for (SddId id : order) {
    if (m.kind(id) != SddManager::Kind::Decision) continue;
    auto it = p.params().decisions.find(id);
    if (it == p.params().decisions.end()) continue;
    out << "P " << index[id];
    for (const Rat& t : it->second) out << ' ' << decimal_string(t);
    out << '\n';
  }
  for (const auto& [var, theta] : p.params().bernoullis)
    out << "B " << m.vtree().leaf_of(var) << ' ' << decimal_string(theta) << '\n';
}

}  // namespace tc
