#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tc/types.hpp"

namespace tc {

using Clause = std::vector<Literal>;

struct CnfFormula {
  int var_count = 0;
  std::vector<Clause> clauses;
  VarNames names;  // from `c var <index> <name>` comments, may be empty

  std::string var_name(Var v) const {
    if (v < static_cast<int>(names.size()) && !names[v].empty()) return names[v];
    return std::to_string(v);
  }
};

// DIMACS CNF. Comment lines `c ...`; `c var <index> <name>` comments carry
// variable names through the pipeline.
CnfFormula parse_cnf(std::istream& in);
CnfFormula parse_cnf_string(const std::string& text);
void serialize_cnf(const CnfFormula& f, std::ostream& out);

}  // namespace tc
