#include "tc/compiler.hpp"

#include <algorithm>
#include <list>
#include <map>
#include <numeric>
#include <unordered_map>

#include "tc/error.hpp"

namespace tc {
namespace {

// Residual clause sets are kept normalized (sorted literals, sorted clauses)
// so the canonical cache key is the clause set itself.
using ClauseSet = std::vector<Clause>;

void normalize(ClauseSet& cs) {
  for (Clause& c : cs) std::sort(c.begin(), c.end());
  std::sort(cs.begin(), cs.end(), [](const Clause& a, const Clause& b) {
    return std::lexicographical_compare(
        a.begin(), a.end(), b.begin(), b.end(), [](const Literal& x, const Literal& y) {
          return x.var != y.var ? x.var < y.var : x.positive < y.positive;
        });
  });
}

std::vector<int> encode_key(const ClauseSet& cs) {
  std::vector<int> key;
  for (const Clause& c : cs) {
    for (const Literal& l : c) key.push_back(l.dimacs());
    key.push_back(0);
  }
  return key;
}

struct KeyHash {
  std::size_t operator()(const std::vector<int>& key) const {
    std::size_t h = 1469598103934665603ull;
    for (int v : key) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }
};

// Plain LRU over canonical residual keys.
class ComponentCache {
 public:
  explicit ComponentCache(std::size_t capacity) : capacity_(capacity) {}

  bool lookup(const std::vector<int>& key, NodeId* out) {
    if (capacity_ == 0) return false;
    auto it = map_.find(key);
    if (it == map_.end()) return false;
    order_.splice(order_.begin(), order_, it->second.second);
    *out = it->second.first;
    return true;
  }

  void insert(const std::vector<int>& key, NodeId node) {
    if (capacity_ == 0) return;
    auto it = map_.find(key);
    if (it != map_.end()) return;
    order_.push_front(key);
    map_.emplace(key, std::make_pair(node, order_.begin()));
    if (map_.size() > capacity_) {
      map_.erase(order_.back());
      order_.pop_back();
    }
  }

 private:
  std::size_t capacity_;
  std::list<std::vector<int>> order_;
  std::unordered_map<std::vector<int>, std::pair<NodeId, std::list<std::vector<int>>::iterator>,
                     KeyHash>
      map_;
};

class Compilation {
 public:
  Compilation(const CnfFormula& f, const CompileOptions& opts, CompileStats* stats)
      : opts_(opts),
        stats_(stats),
        builder_(f.var_count),
        cache_(opts.cache_capacity),
        x_first_(f.var_count) {
    for (Var v : opts.x_first) {
      if (v < 1 || v > f.var_count) fail_usage("x_first variable out of range");
      x_first_.add(v);
    }
  }

  NnfCircuit run(const CnfFormula& f) {
    ClauseSet cs = f.clauses;
    normalize(cs);
    NodeId root = compile_clauses(cs);
    NnfCircuit out = builder_.take(root);
    out.names = f.names;
    return out;
  }

 private:
  // Clauses conditioned on l: satisfied clauses drop, falsified literals
  // shrink their clause.
  static ClauseSet restrict(const ClauseSet& cs, Literal l) {
    ClauseSet out;
    out.reserve(cs.size());
    for (const Clause& c : cs) {
      bool satisfied = false;
      for (const Literal& x : c)
        if (x == l) satisfied = true;
      if (satisfied) continue;
      Clause reduced;
      for (const Literal& x : c)
        if (x.var != l.var) reduced.push_back(x);
      out.push_back(std::move(reduced));
    }
    return out;
  }

  Var pick_branch_var(const ClauseSet& cs) {
    std::map<Var, int> occurrences;
    for (const Clause& c : cs)
      for (const Literal& l : c) ++occurrences[l.var];
    bool any_x = false;
    for (const auto& [v, _] : occurrences)
      if (x_first_.contains(v)) any_x = true;
    Var best = 0;
    int best_count = -1;
    for (const auto& [v, count] : occurrences) {
      if (any_x && !x_first_.contains(v)) continue;
      if (opts_.heuristic == DecisionHeuristic::lowest_index) {
        if (best == 0) best = v;
      } else if (count > best_count) {
        best = v;
        best_count = count;
      }
    }
    return best;
  }

  NodeId compile_clauses(const ClauseSet& clauses) {
    Assignment nothing;
    UnitPropagationResult up = unit_propagate(clauses, nothing);
    if (up.conflict) return builder_.constant(false);

    ClauseSet residual = std::move(up.residual);
    normalize(residual);
    NodeId core = compile_residual(residual);
    if (up.implied.empty()) return core;
    if (builder_.is_false(core)) return core;
    std::vector<NodeId> parts;
    for (Literal l : up.implied) parts.push_back(builder_.literal(l));
    if (!builder_.is_true(core)) parts.push_back(core);
    if (parts.size() == 1) return parts[0];
    return builder_.add_and(std::move(parts));
  }

  // Unit-free, normalized clause set.
  NodeId compile_residual(const ClauseSet& clauses) {
    if (clauses.empty()) return builder_.constant(true);
    std::vector<int> key = encode_key(clauses);
    NodeId hit;
    if (cache_.lookup(key, &hit)) {
      if (stats_) ++stats_->cache_hits;
      return hit;
    }
    if (stats_) ++stats_->cache_misses;

    NodeId result;
    std::vector<ClauseSet> comps = components(clauses);
    if (comps.size() > 1) {
      std::vector<NodeId> parts;
      bool dead = false;
      for (ClauseSet& comp : comps) {
        normalize(comp);
        NodeId part = compile_residual(comp);
        if (builder_.is_false(part)) dead = true;
        if (!builder_.is_true(part)) parts.push_back(part);
      }
      if (dead)
        result = builder_.constant(false);
      else if (parts.empty())
        result = builder_.constant(true);
      else if (parts.size() == 1)
        result = parts[0];
      else
        result = builder_.add_and(std::move(parts));
    } else {
      Var x = pick_branch_var(clauses);
      if (stats_) ++stats_->decisions;
      NodeId hi = compile_clauses(restrict(clauses, Literal{x, true}));
      NodeId lo = compile_clauses(restrict(clauses, Literal{x, false}));
      bool hi_dead = builder_.is_false(hi);
      bool lo_dead = builder_.is_false(lo);
      if (hi_dead && lo_dead) {
        result = builder_.constant(false);
      } else if (hi_dead) {
        result = conjoin_literal(Literal{x, false}, lo);
      } else if (lo_dead) {
        result = conjoin_literal(Literal{x, true}, hi);
      } else {
        NodeId hi_branch = conjoin_literal(Literal{x, true}, hi);
        NodeId lo_branch = conjoin_literal(Literal{x, false}, lo);
        result = builder_.add_or(x, {hi_branch, lo_branch});
      }
    }
    cache_.insert(key, result);
    return result;
  }

  NodeId conjoin_literal(Literal l, NodeId node) {
    NodeId lit = builder_.literal(l);
    if (builder_.is_true(node)) return lit;
    return builder_.add_and({lit, node});
  }

  const CompileOptions& opts_;
  CompileStats* stats_;
  NnfBuilder builder_;
  ComponentCache cache_;
  VarSet x_first_;
};

}  // namespace

UnitPropagationResult unit_propagate(const std::vector<Clause>& clauses, const Assignment& a) {
  UnitPropagationResult out;
  // Values fixed so far: input assignment plus implied units.
  std::unordered_map<Var, bool> fixed;
  for (Var v : a.bound_vars()) fixed[v] = a.value(v);

  std::vector<Clause> work = clauses;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<Clause> next;
    for (const Clause& c : work) {
      Clause reduced;
      bool satisfied = false;
      for (const Literal& l : c) {
        auto it = fixed.find(l.var);
        if (it == fixed.end()) {
          reduced.push_back(l);
        } else if (it->second == l.positive) {
          satisfied = true;
          break;
        }
      }
      if (satisfied) continue;
      if (reduced.empty()) {
        out.conflict = true;
        out.implied.clear();
        out.residual.clear();
        return out;
      }
      if (reduced.size() == 1) {
        Literal unit = reduced[0];
        auto it = fixed.find(unit.var);
        if (it != fixed.end()) {
          if (it->second != unit.positive) {
            out.conflict = true;
            out.implied.clear();
            out.residual.clear();
            return out;
          }
        } else {
          fixed[unit.var] = unit.positive;
          out.implied.push_back(unit);
          changed = true;
        }
        continue;
      }
      next.push_back(std::move(reduced));
    }
    work = std::move(next);
  }
  out.residual = std::move(work);
  std::sort(out.implied.begin(), out.implied.end());
  return out;
}

std::vector<std::vector<Clause>> components(const std::vector<Clause>& clauses) {
  std::vector<int> parent(clauses.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::unordered_map<Var, int> owner;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    for (const Literal& l : clauses[i]) {
      auto [it, inserted] = owner.try_emplace(l.var, static_cast<int>(i));
      if (!inserted) parent[find(static_cast<int>(i))] = find(it->second);
    }
  }
  std::map<int, std::vector<Clause>> groups;
  for (std::size_t i = 0; i < clauses.size(); ++i)
    groups[find(static_cast<int>(i))].push_back(clauses[i]);
  std::vector<std::vector<Clause>> out;
  for (auto& [_, group] : groups) out.push_back(std::move(group));
  return out;
}

NnfCircuit compile(const CnfFormula& f, const CompileOptions& opts, CompileStats* stats) {
  Compilation run(f, opts, stats);
  return run.run(f);
}

}  // namespace tc
