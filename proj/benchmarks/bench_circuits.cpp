#include <benchmark/benchmark.h>

#include <random>

#include "tc/analysis.hpp"
#include "tc/bn.hpp"
#include "tc/compiler.hpp"
#include "tc/queries.hpp"
#include "tc/sdd.hpp"

namespace {

using namespace tc;

CnfFormula bench_cnf(int var_count, int clause_count) {
  std::mt19937 rng(1234);
  std::uniform_int_distribution<int> var(1, var_count);
  std::uniform_int_distribution<int> coin(0, 1);
  CnfFormula f;
  f.var_count = var_count;
  for (int i = 0; i < clause_count; ++i) {
    Clause c;
    for (int k = 0; k < 3; ++k) c.push_back(Literal{var(rng), coin(rng) == 1});
    f.clauses.push_back(c);
  }
  return f;
}

void BM_Compile(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  CnfFormula f = bench_cnf(n, 2 * n);
  for (auto _ : state) {
    NnfCircuit c = compile(f);
    benchmark::DoNotOptimize(c.node_count());
  }
}
BENCHMARK(BM_Compile)->Arg(12)->Arg(16)->Arg(20);

void BM_ModelCount(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  NnfCircuit c = smooth(compile(bench_cnf(n, 2 * n)));
  CountOptions opts;
  opts.assume_deterministic = true;  // decision structure holds by construction
  for (auto _ : state) {
    BigInt count = model_count(c, opts);
    benchmark::DoNotOptimize(count.get_ui());
  }
  state.SetLabel("nodes=" + std::to_string(c.node_count()));
}
BENCHMARK(BM_ModelCount)->Arg(12)->Arg(16)->Arg(20);

void BM_Smooth(benchmark::State& state) {
  NnfCircuit c = compile(bench_cnf(16, 32));
  for (auto _ : state) {
    NnfCircuit s = smooth(c);
    benchmark::DoNotOptimize(s.node_count());
  }
}
BENCHMARK(BM_Smooth);

void BM_SddCompile(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  CnfFormula f = bench_cnf(n, (3 * n) / 2);
  for (auto _ : state) {
    SddManager m(Vtree::balanced(n));
    SddId root = m.compile_cnf(f);
    benchmark::DoNotOptimize(root);
  }
}
BENCHMARK(BM_SddCompile)->Arg(10)->Arg(14);

void BM_BnPipeline(benchmark::State& state) {
  std::string net =
      "net\n"
      "var A 2\nvar B 2\nvar C 2\nvar D 3\nvar E 2\n"
      "parents B A\nparents C A\nparents D B C\nparents E D\n"
      "cpt A .3 .7\n"
      "cpt B .2 .8 .6 .4\n"
      "cpt C .5 .5 .1 .9\n"
      "cpt D .2 .3 .5 .1 .8 .1 .3 .3 .4 .25 .25 .5\n"
      "cpt E .9 .1 .5 .5 .2 .8\n";
  BayesNet bn = parse_bn_string(net);
  for (auto _ : state) {
    ArithmeticCircuit ac = compile_to_ac(bn);
    benchmark::DoNotOptimize(ac.node_count());
  }
}
BENCHMARK(BM_BnPipeline);

void BM_Backprop(benchmark::State& state) {
  BayesNet bn = parse_bn_string(
      "net\nvar A 2\nvar B 2\nvar C 2\nparents B A\nparents C B\n"
      "cpt A .4 .6\ncpt B .3 .7 .8 .2\ncpt C .5 .5 .9 .1\n");
  ArithmeticCircuit ac = compile_to_ac(bn);
  IndicatorSetting s = IndicatorSetting::ones(ac.vars);
  for (auto _ : state) {
    auto bp = backprop<double>(ac, s);
    benchmark::DoNotOptimize(bp.value);
  }
}
BENCHMARK(BM_Backprop);

}  // namespace

BENCHMARK_MAIN();
