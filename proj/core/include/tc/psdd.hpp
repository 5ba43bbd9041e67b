#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <vector>

#include "tc/ac.hpp"
#include "tc/numeric.hpp"
#include "tc/sdd.hpp"

namespace tc {

// Local distributions over decision elements, plus one Bernoulli per variable
// covering its free (vacuous) appearances: True terminals, the slack inside
// literal contexts, and the vtree gaps of a trimmed SDD.
struct PsddParams {
  std::map<SddId, std::vector<Rat>> decisions;  // aligned with the manager's element order
  std::map<Var, Rat> bernoullis;
};

// A parameterized SDD: a distribution over the base SDD's models, zero
// elsewhere regardless of the parameters.
class Psdd {
 public:
  const SddManager& manager() const { return *manager_; }
  SddId root() const { return root_; }
  const PsddParams& params() const { return params_; }
  const std::set<Var>& free_vars() const { return free_vars_; }
  const std::set<SddId>& reachable_decisions() const { return decisions_; }

 private:
  Psdd(const SddManager* m, SddId root, PsddParams params, std::set<Var> free_vars,
       std::set<SddId> decisions)
      : manager_(m),
        root_(root),
        params_(std::move(params)),
        free_vars_(std::move(free_vars)),
        decisions_(std::move(decisions)) {}

  const SddManager* manager_;
  SddId root_;
  PsddParams params_;
  std::set<Var> free_vars_;
  std::set<SddId> decisions_;
  friend Psdd attach_params(const SddManager&, SddId, PsddParams);
};

// Validates shape: distributions over reachable decisions sum to one,
// False-sub elements carry exactly zero, Bernoullis cover the free variables,
// and the base SDD is satisfiable.
Psdd attach_params(const SddManager& m, SddId root, PsddParams params);

template <class Num>
Num psdd_evaluate(const Psdd& p, const Assignment& x);

// Literals become indicators, parameters become constants on element
// branches, or/and become add/mul; free variables expand to Bernoulli
// gadgets. The result is deterministic, decomposable, and smooth.
ArithmeticCircuit psdd_to_ac(const Psdd& p);

// Complete boolean rows with multiplicities. CSV of 0/1 per variable with an
// optional trailing count column.
struct Dataset {
  int var_count = 0;
  std::vector<std::vector<char>> rows;
  std::vector<long> counts;

  Assignment row_assignment(std::size_t i) const;
  long total_count() const;
};
Dataset parse_dataset(std::istream& in);

struct LearnOptions {
  Rat alpha = Rat(0);  // add-alpha smoothing; default is the pure ML closed form
};
struct LearnResult {
  Psdd psdd;
  std::size_t rejected_rows = 0;  // rows falsifying the base SDD
};
// Closed-form maximum likelihood from complete data: each parameter is the
// fraction of rows routed through its element; unvisited nodes fall back to
// uniform over feasible elements.
LearnResult learn_ml_complete(const SddManager& m, SddId root, const Dataset& d,
                              const LearnOptions& opts = {});

double log_likelihood(const Psdd& p, const Dataset& d);

// PSDD text = SDD text plus `P id t1 .. tm` lines per decision and
// `B vtree-leaf t` Bernoulli lines.
Psdd parse_psdd(std::istream& in, SddManager& m);
void serialize_psdd(const Psdd& p, std::ostream& out);

}  // namespace tc
