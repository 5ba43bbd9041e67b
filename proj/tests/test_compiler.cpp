#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tc/analysis.hpp"
#include "tc/compiler.hpp"
#include "tc/queries.hpp"

using namespace tc;
namespace oracle = tc::testing;

TEST_CASE("unit propagation") {
  Assignment empty;
  // {A} implies A with empty residual.
  auto r1 = unit_propagate({{Literal{1, true}}}, empty);
  CHECK_FALSE(r1.conflict);
  CHECK(r1.implied == std::vector<Literal>{Literal{1, true}});
  CHECK(r1.residual.empty());

  // {A}, {notA} conflicts.
  auto r2 = unit_propagate({{Literal{1, true}}, {Literal{1, false}}}, empty);
  CHECK(r2.conflict);

  // {A or B, notA}: A=0 then B=1.
  auto r3 = unit_propagate({{Literal{1, true}, Literal{2, true}}, {Literal{1, false}}}, empty);
  CHECK_FALSE(r3.conflict);
  CHECK(r3.implied == std::vector<Literal>{Literal{1, false}, Literal{2, true}});
  CHECK(r3.residual.empty());

  // Respects the input assignment.
  Assignment a(2);
  a.bind(1, false);
  auto r4 = unit_propagate({{Literal{1, true}, Literal{2, true}}}, a);
  CHECK(r4.implied == std::vector<Literal>{Literal{2, true}});
}

TEST_CASE("component partition") {
  std::vector<Clause> two = {{Literal{1, true}, Literal{2, true}},
                             {Literal{3, true}, Literal{4, true}}};
  CHECK(components(two).size() == 2);
  std::vector<Clause> one = {{Literal{1, true}, Literal{2, true}},
                             {Literal{2, true}, Literal{3, true}}};
  CHECK(components(one).size() == 1);
  CHECK(components({}).empty());
}

TEST_CASE("compile basics") {
  CnfFormula f = parse_cnf_string("p cnf 2 2\n1 2 0\n-1 2 0\n");
  NnfCircuit c = compile(f);
  CHECK(check_decomposability(c).holds);
  CHECK(check_decision(c).holds);
  CHECK(model_count(smooth(c)) == 2);

  CnfFormula empty = parse_cnf_string("p cnf 5 0\n");
  NnfCircuit top = compile(empty);
  CHECK(top.node(top.root()).kind == NnfKind::True);
  CHECK(model_count(smooth(top)) == 32);

  CnfFormula contradiction = parse_cnf_string("p cnf 3 1\n0\n");
  NnfCircuit bottom = compile(contradiction);
  CHECK(bottom.node(bottom.root()).kind == NnfKind::False);
  CHECK(model_count(smooth(bottom)) == 0);
}

TEST_CASE("compilation is equivalent to the formula") {
  std::mt19937 rng(53);
  std::uniform_int_distribution<int> nvars(2, 12);
  for (int round = 0; round < 60; ++round) {
    int n = nvars(rng);
    CnfFormula f = oracle::random_cnf(rng, n, (3 * n) / 2 + 1);
    NnfCircuit c = compile(f);
    CHECK(check_decomposability(c).holds);
    CHECK(check_decision(c).holds);
    auto model_set = oracle::circuit_models(smooth(c));
    CHECK(model_set == oracle::cnf_models(f));
  }
}

TEST_CASE("structural guarantees hold for both heuristics") {
  std::mt19937 rng(59);
  for (DecisionHeuristic h : {DecisionHeuristic::most_occurring, DecisionHeuristic::lowest_index}) {
    CompileOptions opts;
    opts.heuristic = h;
    for (int round = 0; round < 10; ++round) {
      CnfFormula f = oracle::random_cnf(rng, 8, 11);
      NnfCircuit c = compile(f, opts);
      CHECK(check_decision(c).holds);
      CHECK(oracle::circuit_models(smooth(c)) == oracle::cnf_models(f));
    }
  }
}

TEST_CASE("cache soundness: disabling the cache changes nothing semantic") {
  std::mt19937 rng(61);
  for (int round = 0; round < 15; ++round) {
    CnfFormula f = oracle::random_cnf(rng, 9, 12);
    CompileOptions cached;
    CompileOptions uncached;
    uncached.cache_capacity = 0;
    NnfCircuit c1 = compile(f, cached);
    NnfCircuit c2 = compile(f, uncached);
    CHECK(oracle::circuit_models(smooth(c1)) == oracle::circuit_models(smooth(c2)));
    CHECK(model_count(smooth(c1)) == model_count(smooth(c2)));
  }
}

TEST_CASE("cache reuses nodes across identical residuals") {
  // Both branches on variable 1 leave the residual (2 or 3).
  CnfFormula f = parse_cnf_string("p cnf 3 2\n1 2 3 0\n-1 2 3 0\n");
  CompileStats stats;
  NnfCircuit c = compile(f, {}, &stats);
  CHECK(stats.cache_hits >= 1);
  CHECK(model_count(smooth(c)) == 6);

  CompileStats cold;
  CompileOptions off;
  off.cache_capacity = 0;
  compile(f, off, &cold);
  CHECK(cold.cache_hits == 0);
}

TEST_CASE("tiny cache capacities force eviction without changing results") {
  std::mt19937 rng(71);
  for (int round = 0; round < 10; ++round) {
    CnfFormula f = oracle::random_cnf(rng, 10, 14);
    CompileOptions tiny;
    tiny.cache_capacity = 4;  // constant churn through the LRU
    NnfCircuit c = compile(f, tiny);
    CHECK(oracle::circuit_models(smooth(c)) == oracle::cnf_models(f));
  }
}

TEST_CASE("x_first makes compilations x-constrained") {
  std::mt19937 rng(67);
  for (int round = 0; round < 20; ++round) {
    CnfFormula f = oracle::random_cnf(rng, 9, 12);
    CompileOptions opts;
    opts.x_first = {2, 4, 6};
    VarSet x(9);
    for (Var v : opts.x_first) x.add(v);
    NnfCircuit c = smooth(compile(f, opts));
    CHECK(check_decision(c).holds);
    CHECK(check_x_constrained(c, x));
    CHECK(oracle::circuit_models(c) == oracle::cnf_models(f));
  }
}
