#include "tc/sdd.hpp"

#include <algorithm>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "tc/error.hpp"

namespace tc {
namespace {

std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t elements_hash(VtreeId v, const std::vector<SddElement>& elems) {
  std::uint64_t h = hash_mix(0x2545f4914f6cdd1dull, v);
  for (const SddElement& e : elems) {
    h = hash_mix(h, e.prime);
    h = hash_mix(h, e.sub);
  }
  return h;
}

}  // namespace

SddManager::SddManager(Vtree vtree) : vtree_(std::move(vtree)) {
  Node t{};
  t.kind = Kind::True;
  Node f{};
  f.kind = Kind::False;
  nodes_.push_back(t);
  nodes_.push_back(f);
  nodes_[kTrue].negation = kFalse;
  nodes_[kFalse].negation = kTrue;
}

SddId SddManager::literal(Literal l) {
  if (l.var < 1 || l.var > vtree_.var_count())
    fail_precondition("literal variable " + std::to_string(l.var) + " not in the vtree");
  std::uint64_t key = (static_cast<std::uint64_t>(l.var) << 1) | (l.positive ? 1 : 0);
  auto [it, inserted] = literal_table_.try_emplace(key, 0);
  if (!inserted) return it->second;
  Node n{};
  n.kind = Kind::Lit;
  n.lit = l;
  n.vtree = vtree_.leaf_of(l.var);
  nodes_.push_back(n);
  SddId id = static_cast<SddId>(nodes_.size() - 1);
  it->second = id;
  std::uint64_t complement = (static_cast<std::uint64_t>(l.var) << 1) | (l.positive ? 0 : 1);
  if (auto other = literal_table_.find(complement); other != literal_table_.end()) {
    nodes_[id].negation = other->second;
    nodes_[other->second].negation = id;
  }
  return id;
}

SddId SddManager::make_decision(VtreeId v, std::vector<SddElement> elements) {
  // Compression: elements sharing a sub merge by disjoining their primes.
  std::map<SddId, std::vector<SddId>> by_sub;
  for (const SddElement& e : elements) by_sub[e.sub].push_back(e.prime);
  std::vector<SddElement> compressed;
  for (auto& [sub, primes] : by_sub) {
    SddId prime = primes[0];
    for (std::size_t i = 1; i < primes.size(); ++i) prime = apply(prime, primes[i], BoolOp::disjoin);
    compressed.push_back({prime, sub});
  }

  // Trimming.
  if (compressed.size() == 1) {
    // Primes form a partition, so a lone prime is valid: the node is its sub.
    return compressed[0].sub;
  }
  if (compressed.size() == 2) {
    if (compressed[0].sub == kTrue && compressed[1].sub == kFalse) return compressed[0].prime;
    if (compressed[1].sub == kTrue && compressed[0].sub == kFalse) return compressed[1].prime;
  }

  std::sort(compressed.begin(), compressed.end(),
            [](const SddElement& a, const SddElement& b) { return a.prime < b.prime; });
  std::uint64_t h = elements_hash(v, compressed);
  auto& bucket = unique_table_[h];
  for (SddId cand : bucket) {
    if (nodes_[cand].vtree == v && nodes_[cand].elements.size() == compressed.size()) {
      bool same = true;
      for (std::size_t i = 0; i < compressed.size(); ++i)
        if (nodes_[cand].elements[i].prime != compressed[i].prime ||
            nodes_[cand].elements[i].sub != compressed[i].sub) {
          same = false;
          break;
        }
      if (same) return cand;
    }
  }
  Node n{};
  n.kind = Kind::Decision;
  n.vtree = v;
  n.elements = std::move(compressed);
  nodes_.push_back(n);
  SddId id = static_cast<SddId>(nodes_.size() - 1);
  bucket.push_back(id);
  return id;
}

// The operand as an element list of the decision at v.
std::vector<SddElement> SddManager::normalize_to(SddId x, VtreeId v) {
  VtreeId vx = nodes_[x].vtree;
  if (nodes_[x].kind == Kind::Decision && vx == v) return nodes_[x].elements;
  const Vtree::Node& vn = vtree_.node(v);
  if (vtree_.inside(vx, vn.left)) return {{x, kTrue}, {negate(x), kFalse}};
  if (vtree_.inside(vx, vn.right)) return {{kTrue, x}};
  fail_precondition("operand does not respect the vtree");
}

SddId SddManager::apply(SddId a, SddId b, BoolOp op) {
  if (op == BoolOp::conjoin) {
    if (a == kFalse || b == kFalse) return kFalse;
    if (a == kTrue) return b;
    if (b == kTrue) return a;
    if (a == b) return a;
    if (nodes_[a].negation == b) return kFalse;
  } else {
    if (a == kTrue || b == kTrue) return kTrue;
    if (a == kFalse) return b;
    if (b == kFalse) return a;
    if (a == b) return a;
    if (nodes_[a].negation == b) return kTrue;
  }
  if (a > b) std::swap(a, b);
  std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
  auto& cache = apply_cache_[op == BoolOp::conjoin ? 0 : 1];
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  VtreeId v = vtree_.lowest_common_ancestor(nodes_[a].vtree, nodes_[b].vtree);
  if (vtree_.node(v).is_leaf()) {
    // Two distinct, non-complementary nodes at one leaf cannot happen.
    fail_precondition("apply reached a vtree leaf with distinct operands");
  }
  std::vector<SddElement> ea = normalize_to(a, v);
  std::vector<SddElement> eb = normalize_to(b, v);
  std::vector<SddElement> out;
  for (const SddElement& x : ea) {
    for (const SddElement& y : eb) {
      SddId prime = apply(x.prime, y.prime, BoolOp::conjoin);
      if (prime == kFalse) continue;
      SddId sub = apply(x.sub, y.sub, op);
      out.push_back({prime, sub});
    }
  }
  SddId result = make_decision(v, std::move(out));
  cache.emplace(key, result);
  return result;
}

SddId SddManager::negate(SddId a) {
  if (nodes_[a].negation != kInvalid) return nodes_[a].negation;
  SddId result;
  if (nodes_[a].kind == Kind::Lit) {
    result = literal(nodes_[a].lit.negated());
  } else {
    std::vector<SddElement> flipped = nodes_[a].elements;
    for (SddElement& e : flipped) e.sub = negate(e.sub);
    result = make_decision(nodes_[a].vtree, std::move(flipped));
  }
  nodes_[a].negation = result;
  nodes_[result].negation = a;
  return result;
}

SddId SddManager::decision(VtreeId v, std::vector<SddElement> elements) {
  if (v >= vtree_.node_count() || vtree_.node(v).is_leaf())
    fail_precondition("decision vtree node must be internal");
  const Vtree::Node& vn = vtree_.node(v);
  SddId cover = kFalse;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    SddId p = elements[i].prime;
    SddId s = elements[i].sub;
    if (p == kFalse) fail_precondition("decision prime must be consistent");
    if (p != kTrue && !vtree_.inside(nodes_[p].vtree, vn.left))
      fail_precondition("decision prime outside the left subtree");
    if (s != kTrue && s != kFalse && !vtree_.inside(nodes_[s].vtree, vn.right))
      fail_precondition("decision sub outside the right subtree");
    for (std::size_t j = i + 1; j < elements.size(); ++j)
      if (conjoin(p, elements[j].prime) != kFalse)
        fail_precondition("decision primes are not mutually exclusive");
    cover = disjoin(cover, p);
  }
  if (cover != kTrue) fail_precondition("decision primes are not exhaustive");
  return make_decision(v, std::move(elements));
}

SddId SddManager::compile_cnf(const CnfFormula& f) {
  if (f.var_count > vtree_.var_count())
    fail_precondition("formula has more variables than the vtree");
  SddId acc = kTrue;
  for (const Clause& clause : f.clauses) {
    SddId c = kFalse;
    for (const Literal& l : clause) c = disjoin(c, literal(l));
    acc = conjoin(acc, c);
  }
  return acc;
}

bool SddManager::evaluate(SddId id, const Assignment& a) const {
  switch (nodes_[id].kind) {
    case Kind::True:
      return true;
    case Kind::False:
      return false;
    case Kind::Lit:
      return a.value(nodes_[id].lit.var) == nodes_[id].lit.positive;
    case Kind::Decision:
      for (const SddElement& e : nodes_[id].elements)
        if (evaluate(e.prime, a)) return evaluate(e.sub, a);
      return false;
  }
  return false;
}

NnfCircuit sdd_to_nnf(const SddManager& m, SddId root) {
  NnfBuilder b(m.vtree().var_count());
  std::unordered_map<SddId, NodeId> memo;
  std::function<NodeId(SddId)> expand = [&](SddId id) -> NodeId {
    auto it = memo.find(id);
    if (it != memo.end()) return it->second;
    NodeId out;
    switch (m.kind(id)) {
      case SddManager::Kind::True:
        out = b.constant(true);
        break;
      case SddManager::Kind::False:
        out = b.constant(false);
        break;
      case SddManager::Kind::Lit:
        out = b.literal(m.lit(id));
        break;
      case SddManager::Kind::Decision: {
        auto elems = m.elements(id);
        std::vector<NodeId> branches;
        for (const SddElement& e : elems)
          branches.push_back(b.add_and({expand(e.prime), expand(e.sub)}));
        Var decision = 0;
        if (elems.size() == 2 && m.kind(elems[0].prime) == SddManager::Kind::Lit &&
            m.kind(elems[1].prime) == SddManager::Kind::Lit &&
            m.lit(elems[0].prime).var == m.lit(elems[1].prime).var)
          decision = m.lit(elems[0].prime).var;
        out = b.add_or(decision, std::move(branches));
        break;
      }
    }
    memo.emplace(id, out);
    return out;
  };
  return b.take(expand(root));
}

ObddView obdd_export(const SddManager& m, SddId root) {
  if (!m.vtree().right_linear())
    fail_precondition("obdd export requires a right-linear vtree");
  ObddView view;
  std::unordered_map<SddId, std::uint32_t> memo;
  std::function<std::uint32_t(SddId)> walk = [&](SddId id) -> std::uint32_t {
    auto it = memo.find(id);
    if (it != memo.end()) return it->second;
    std::uint32_t out;
    switch (m.kind(id)) {
      case SddManager::Kind::False:
        out = 0;
        break;
      case SddManager::Kind::True:
        out = 1;
        break;
      case SddManager::Kind::Lit: {
        Literal l = m.lit(id);
        view.nodes.push_back({l.var, l.positive ? 0u : 1u, l.positive ? 1u : 0u});
        out = static_cast<std::uint32_t>(view.nodes.size() - 1 + 2);
        break;
      }
      case SddManager::Kind::Decision: {
        auto elems = m.elements(id);
        if (elems.size() != 2 || m.kind(elems[0].prime) != SddManager::Kind::Lit ||
            m.kind(elems[1].prime) != SddManager::Kind::Lit ||
            m.lit(elems[0].prime).var != m.lit(elems[1].prime).var ||
            m.lit(elems[0].prime).positive == m.lit(elems[1].prime).positive)
          fail_precondition("decision without literal primes under a right-linear vtree "
                            "(canonicalization bug)");
        const SddElement& pos = m.lit(elems[0].prime).positive ? elems[0] : elems[1];
        const SddElement& neg = m.lit(elems[0].prime).positive ? elems[1] : elems[0];
        std::uint32_t high = walk(pos.sub);
        std::uint32_t low = walk(neg.sub);
        view.nodes.push_back({m.lit(pos.prime).var, low, high});
        out = static_cast<std::uint32_t>(view.nodes.size() - 1 + 2);
        break;
      }
    }
    memo.emplace(id, out);
    return out;
  };
  view.root = walk(root);
  return view;
}

bool ObddView::evaluate(const Assignment& a) const {
  std::uint32_t cur = root;
  while (cur >= 2) {
    const Node& n = nodes[cur - 2];
    cur = a.value(n.var) ? n.high : n.low;
  }
  return cur == 1;
}

void serialize_obdd(const ObddView& v, std::ostream& out) {
  out << "obdd " << v.nodes.size() << ' ' << v.root << '\n';
  for (std::size_t i = 0; i < v.nodes.size(); ++i)
    out << "n " << i + 2 << ' ' << v.nodes[i].var << ' ' << v.nodes[i].low << ' '
        << v.nodes[i].high << '\n';
}

ParsedSdd parse_sdd(std::istream& in, SddManager& m, PsddTextParams* params) {
  std::string line;
  bool saw_header = false;
  std::size_t declared = 0;
  ParsedSdd out;
  std::vector<char> defined;

  auto resolve = [&](std::size_t file_id) -> SddId {
    if (file_id >= out.by_file_id.size() || !defined[file_id])
      fail_format("sdd node " + std::to_string(file_id) + " referenced before definition");
    return out.by_file_id[file_id];
  };

  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "c") continue;
    if (tok == "sdd" || tok == "psdd") {
      if (saw_header) fail_format("duplicate sdd header");
      if (!(ls >> declared)) fail_format("bad sdd header");
      out.by_file_id.assign(declared, 0);
      out.file_elements.assign(declared, {});
      defined.assign(declared, 0);
      saw_header = true;
      continue;
    }
    if (!saw_header) fail_format("missing sdd header");
    if (tok == "P" || tok == "B") {
      if (!params) fail_format("parameter line in a plain sdd file: '" + line + "'");
      if (tok == "P") {
        std::size_t id;
        if (!(ls >> id)) fail_format("bad P line");
        std::vector<std::string> thetas;
        std::string t;
        while (ls >> t) thetas.push_back(t);
        params->decisions.emplace_back(id, std::move(thetas));
      } else {
        std::size_t leaf;
        std::string theta;
        if (!(ls >> leaf >> theta)) fail_format("bad B line");
        params->bernoullis.emplace_back(leaf, theta);
      }
      continue;
    }
    std::size_t id;
    if (!(ls >> id) || id >= declared || defined[id]) fail_format("bad sdd node id in '" + line + "'");
    if (tok == "T") {
      out.by_file_id[id] = m.true_node();
    } else if (tok == "F") {
      out.by_file_id[id] = m.false_node();
    } else if (tok == "L") {
      std::size_t vtree_id;
      int lit;
      if (!(ls >> vtree_id >> lit) || lit == 0) fail_format("bad sdd literal line");
      Literal l = Literal::from_dimacs(lit);
      if (l.var > m.vtree().var_count() || m.vtree().leaf_of(l.var) != vtree_id)
        fail_format("sdd literal line does not match the vtree");
      out.by_file_id[id] = m.literal(l);
    } else if (tok == "D") {
      std::size_t vtree_id, count;
      if (!(ls >> vtree_id >> count) || count < 1) fail_format("bad sdd decision line");
      if (vtree_id >= m.vtree().node_count()) fail_format("sdd decision vtree id out of range");
      std::vector<SddElement> elems;
      for (std::size_t i = 0; i < count; ++i) {
        std::size_t p, s;
        if (!(ls >> p >> s)) fail_format("truncated sdd decision line");
        elems.push_back({resolve(p), resolve(s)});
      }
      out.file_elements[id] = elems;
      out.by_file_id[id] = m.decision(static_cast<VtreeId>(vtree_id), std::move(elems));
    } else {
      fail_format("bad sdd opcode '" + tok + "'");
    }
    defined[id] = 1;
  }
  if (!saw_header) fail_format("missing sdd header");
  for (std::size_t i = 0; i < declared; ++i)
    if (!defined[i]) fail_format("sdd node " + std::to_string(i) + " undeclared");
  if (declared == 0) fail_format("empty sdd file");
  out.root = out.by_file_id[declared - 1];
  return out;
}

void serialize_sdd(const SddManager& m, SddId root, std::ostream& out) {
  // Emission order: children before parents, root last.
  std::vector<SddId> order;
  std::unordered_map<SddId, std::size_t> index;
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
  visit(root);
  out << "sdd " << order.size() << '\n';
  for (std::size_t i = 0; i < order.size(); ++i) {
    SddId id = order[i];
    switch (m.kind(id)) {
      case SddManager::Kind::True:
        out << "T " << i << '\n';
        break;
      case SddManager::Kind::False:
        out << "F " << i << '\n';
        break;
      case SddManager::Kind::Lit:
        out << "L " << i << ' ' << m.vtree_node(id) << ' ' << m.lit(id).dimacs() << '\n';
        break;
      case SddManager::Kind::Decision: {
        out << "D " << i << ' ' << m.vtree_node(id) << ' ' << m.elements(id).size();
        for (const SddElement& e : m.elements(id)) out << ' ' << index[e.prime] << ' ' << index[e.sub];
        out << '\n';
        break;
      }
    }
  }
}

}  // namespace tc
