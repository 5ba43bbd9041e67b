#pragma once

// Test-only brute-force oracles. These stay independent of the linear-time
// circuit passes they cross-check: CNF semantics are evaluated clause by
// clause, counts and maxima by full enumeration.

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tc/bn.hpp"
#include "tc/cnf.hpp"
#include "tc/factor.hpp"
#include "tc/nnf.hpp"
#include "tc/numeric.hpp"
#include "tc/queries.hpp"

namespace tc::testing {

// Bit i-1 of the mask carries variable i.
Assignment mask_assignment(int var_count, std::uint64_t mask);
std::uint64_t assignment_mask(const Assignment& a);

bool cnf_satisfied(const CnfFormula& f, const Assignment& a);
std::set<std::uint64_t> cnf_models(const CnfFormula& f);
std::set<std::uint64_t> circuit_models(const NnfCircuit& c);

BigInt count_by_enumeration(const NnfCircuit& c, const Assignment& evidence);
Rat weighted_by_enumeration(const NnfCircuit& c, const WeightMap& w, const Assignment& evidence);

// max over complete x on vars X of the weighted count conditioned on x.
std::pair<Rat, std::uint64_t> emajsat_by_enumeration(const NnfCircuit& c, const VarSet& x,
                                                     const WeightMap& w);

CnfFormula random_cnf(std::mt19937& rng, int var_count, int clause_count, int clause_width = 3);
WeightMap random_weights(std::mt19937& rng, int var_count);
Factor random_factor(std::mt19937& rng, int max_vars = 3, int max_domain = 3);
BayesNet random_bn(std::mt19937& rng, int max_nodes = 6, int max_domain = 3);

// Fixture access: $TC_FIXTURES or the path passed to the acceptance binary.
std::string fixture_path(const std::string& name);
std::string read_file(const std::string& path);

}  // namespace tc::testing
