#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "tc/cnf.hpp"
#include "tc/nnf.hpp"
#include "tc/types.hpp"
#include "tc/vtree.hpp"

namespace tc {

using SddId = std::uint32_t;

struct SddElement {
  SddId prime, sub;
};

enum class BoolOp { conjoin, disjoin };

// Canonical SDD store under a fixed vtree. Decisions are compressed (equal
// subs merged by disjoining primes), trimmed ({(true,a)} -> a and
// {(p,true),(!p,false)} -> p), and unique: structurally identical canonical
// decisions share one identity, so identity equality is function equality.
class SddManager {
 public:
  explicit SddManager(Vtree vtree);

  const Vtree& vtree() const { return vtree_; }

  SddId true_node() const { return kTrue; }
  SddId false_node() const { return kFalse; }
  SddId literal(Literal l);
  SddId constant(bool value) const { return value ? kTrue : kFalse; }

  SddId apply(SddId a, SddId b, BoolOp op);
  SddId conjoin(SddId a, SddId b) { return apply(a, b, BoolOp::conjoin); }
  SddId disjoin(SddId a, SddId b) { return apply(a, b, BoolOp::disjoin); }
  SddId negate(SddId a);

  // Canonical decision from raw elements. Validates the vtree split and that
  // the primes are consistent, pairwise exclusive, and exhaustive.
  SddId decision(VtreeId v, std::vector<SddElement> elements);

  // Clauses disjoined from literals, formula conjoined from clauses.
  SddId compile_cnf(const CnfFormula& f);

  enum class Kind : std::uint8_t { True, False, Lit, Decision };
  Kind kind(SddId id) const { return nodes_[id].kind; }
  Literal lit(SddId id) const { return nodes_[id].lit; }
  VtreeId vtree_node(SddId id) const { return nodes_[id].vtree; }
  std::span<const SddElement> elements(SddId id) const {
    return {nodes_[id].elements.data(), nodes_[id].elements.size()};
  }
  std::size_t node_count() const { return nodes_.size(); }

  bool evaluate(SddId id, const Assignment& a) const;

 private:
  struct Node {
    Kind kind;
    Literal lit;       // Lit only
    VtreeId vtree = 0; // Lit: leaf, Decision: internal node
    std::vector<SddElement> elements;
    SddId negation = kInvalid;
  };
  static constexpr SddId kTrue = 0, kFalse = 1, kInvalid = UINT32_MAX;

  SddId make_decision(VtreeId v, std::vector<SddElement> elements);
  std::vector<SddElement> normalize_to(SddId x, VtreeId v);

  Vtree vtree_;
  std::vector<Node> nodes_;
  std::unordered_map<std::uint64_t, SddId> literal_table_;
  std::unordered_map<std::uint64_t, std::vector<SddId>> unique_table_;  // hash buckets
  std::unordered_map<std::uint64_t, SddId> apply_cache_[2];
};

// Multiplexer expansion of an SDD into an NNF circuit: each decision becomes
// an or-gate over binary and-gates (prime, sub). Structured by the manager's
// vtree; decision variables are declared when the primes are a literal pair.
NnfCircuit sdd_to_nnf(const SddManager& m, SddId root);

// OBDD view of an SDD under a right-linear vtree. Ids 0/1 are the false/true
// terminals; every decision node has literal primes {X, !X} with high = the
// X sub and low = the !X sub.
struct ObddView {
  struct Node {
    Var var;
    std::uint32_t low, high;
  };
  std::vector<Node> nodes;  // ids offset by 2; terminals are implicit
  std::uint32_t root = 0;

  bool evaluate(const Assignment& a) const;
  std::size_t node_count() const { return nodes.size(); }
};
ObddView obdd_export(const SddManager& m, SddId root);
void serialize_obdd(const ObddView& v, std::ostream& out);

// Text format: header `sdd N`; lines `T id`, `F id`, `L id vtree-id lit`,
// `D id vtree-id m p1 s1 ... pm sm`; ids reference earlier lines, root last.
struct ParsedSdd {
  SddId root = 0;
  std::vector<SddId> by_file_id;
  // Built element lists in file order, per file id (decisions only); the
  // PSDD reader aligns parameter lines against these.
  std::vector<std::vector<SddElement>> file_elements;
};

// `P id t1 .. tm` and `B vtree-leaf t` lines from the PSDD extension of the
// format; plain SDD parsing rejects them.
struct PsddTextParams {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> decisions;
  std::vector<std::pair<std::size_t, std::string>> bernoullis;
};

ParsedSdd parse_sdd(std::istream& in, SddManager& m, PsddTextParams* params = nullptr);
void serialize_sdd(const SddManager& m, SddId root, std::ostream& out);

}  // namespace tc
