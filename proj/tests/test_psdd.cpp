#include <functional>
#include <memory>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "tc/error.hpp"
#include "tc/psdd.hpp"

using namespace tc;
namespace oracle = tc::testing;

namespace {

// The manager's address must outlive the Psdd, so it lives behind a pointer.
struct Fig10 {
  std::unique_ptr<SddManager> manager;
  std::unique_ptr<Psdd> psdd;
};

Fig10 load_fig10() {
  Fig10 fx;
  Vtree vt = parse_vtree_string(oracle::read_file(oracle::fixture_path("fig10.vtree")));
  fx.manager = std::make_unique<SddManager>(vt);
  std::istringstream in(oracle::read_file(oracle::fixture_path("fig10.psdd")));
  fx.psdd = std::make_unique<Psdd>(parse_psdd(in, *fx.manager));
  return fx;
}

// Random valid parameters for a base SDD.
PsddParams random_params(const SddManager& m, SddId root, std::mt19937& rng) {
  std::set<SddId> decisions;
  std::set<Var> free_vars;
  std::function<void(SddId, VtreeId)> walk = [&](SddId n, VtreeId v) {
    switch (m.kind(n)) {
      case SddManager::Kind::True:
        for (int y : m.vtree().vars_below(v).to_vector()) free_vars.insert(y);
        break;
      case SddManager::Kind::False:
        break;
      case SddManager::Kind::Lit:
        for (int y : m.vtree().vars_below(v).to_vector())
          if (y != m.lit(n).var) free_vars.insert(y);
        break;
      case SddManager::Kind::Decision: {
        VtreeId u = m.vtree_node(n);
        for (int y : VarSet::difference(m.vtree().vars_below(v), m.vtree().vars_below(u)).to_vector())
          free_vars.insert(y);
        decisions.insert(n);
        for (const SddElement& e : m.elements(n)) {
          walk(e.prime, m.vtree().node(u).left);
          if (e.sub != m.false_node()) walk(e.sub, m.vtree().node(u).right);
        }
        break;
      }
    }
  };
  walk(root, m.vtree().root());

  std::uniform_int_distribution<int> weight(1, 9);
  PsddParams params;
  for (SddId d : decisions) {
    auto elems = m.elements(d);
    std::vector<Rat> thetas(elems.size(), Rat(0));
    int total = 0;
    std::vector<int> raw(elems.size(), 0);
    for (std::size_t i = 0; i < elems.size(); ++i) {
      if (elems[i].sub == m.false_node()) continue;
      raw[i] = weight(rng);
      total += raw[i];
    }
    for (std::size_t i = 0; i < elems.size(); ++i)
      if (raw[i]) thetas[i] = make_rat(raw[i], total);
    params.decisions.emplace(d, std::move(thetas));
  }
  for (Var v : free_vars) params.bernoullis.emplace(v, make_rat(weight(rng), 10));
  return params;
}

}  // namespace

TEST_CASE("attach validation") {
  Vtree vt = Vtree::balanced(1);
  SddManager m(vt);

  PsddParams uniform;
  uniform.bernoullis[1] = make_rat(1, 2);
  Psdd p = attach_params(m, m.true_node(), uniform);
  CHECK(psdd_evaluate<Rat>(p, oracle::mask_assignment(1, 0)) == make_rat(1, 2));
  CHECK(psdd_evaluate<Rat>(p, oracle::mask_assignment(1, 1)) == make_rat(1, 2));

  // Nonzero parameter on a False-sub element is rejected.
  Vtree vt2 = Vtree::balanced(2);
  SddManager m2(vt2);
  SddId conj = m2.conjoin(m2.literal(Literal{1, true}), m2.literal(Literal{2, true}));
  REQUIRE(m2.kind(conj) == SddManager::Kind::Decision);
  PsddParams bad;
  {
    auto elems = m2.elements(conj);
    std::vector<Rat> thetas(elems.size(), Rat(0));
    for (std::size_t i = 0; i < elems.size(); ++i)
      thetas[i] = Rat(1, static_cast<long>(elems.size()));
    bad.decisions.emplace(conj, thetas);
  }
  CHECK_THROWS_AS(attach_params(m2, conj, bad), error);

  // Non-normalized distribution is rejected.
  PsddParams off;
  {
    auto elems = m2.elements(conj);
    std::vector<Rat> thetas(elems.size(), Rat(0));
    thetas[0] = make_rat(1, 2);
    off.decisions.emplace(conj, thetas);
  }
  CHECK_THROWS_AS(attach_params(m2, conj, off), error);

  // Empty support is rejected outright.
  CHECK_THROWS_AS(attach_params(m2, m2.false_node(), PsddParams{}), error);
}

TEST_CASE("fig10 fixture accepts its parameters and zeroes C=f rows") {
  Fig10 fx = load_fig10();
  // Rows (A,B,C) with C false are all zero.
  for (std::uint64_t mask = 0; mask < 8; ++mask) {
    Rat v = psdd_evaluate<Rat>(*fx.psdd, oracle::mask_assignment(3, mask));
    if (!(mask & 0b100)) CHECK(v == Rat(0));
  }
  CHECK(psdd_evaluate<Rat>(*fx.psdd, oracle::mask_assignment(3, 0b111)) == make_rat(6, 25));   // .4*.6
  CHECK(psdd_evaluate<Rat>(*fx.psdd, oracle::mask_assignment(3, 0b101)) == make_rat(4, 25));   // .4*.4
  CHECK(psdd_evaluate<Rat>(*fx.psdd, oracle::mask_assignment(3, 0b110)) == make_rat(3, 5));    // .6
  Rat total(0);
  for (std::uint64_t mask = 0; mask < 8; ++mask)
    total += psdd_evaluate<Rat>(*fx.psdd, oracle::mask_assignment(3, mask));
  CHECK(total == Rat(1));
}

TEST_CASE("normalization and zero guarantee under random parameters") {
  std::mt19937 rng(131);
  for (int round = 0; round < 20; ++round) {
    int n = 3 + static_cast<int>(rng() % 3);
    CnfFormula f = oracle::random_cnf(rng, n, n + 2);
    Vtree vt = Vtree::balanced(n);
    SddManager m(vt);
    SddId base = m.compile_cnf(f);
    if (base == m.false_node()) continue;
    Psdd p = attach_params(m, base, random_params(m, base, rng));
    Rat total(0);
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
      Assignment a = oracle::mask_assignment(n, mask);
      Rat v = psdd_evaluate<Rat>(p, a);
      if (!m.evaluate(base, a)) CHECK(v == Rat(0));
      CHECK(v >= 0);
      total += v;
    }
    CHECK(total == Rat(1));
  }
}

TEST_CASE("psdd_to_ac matches evaluation row by row") {
  std::mt19937 rng(137);
  Fig10 fx = load_fig10();
  ArithmeticCircuit ac = psdd_to_ac(*fx.psdd);
  AcProperties props = check_ac_properties(ac);
  CHECK(props.decomposable.holds);
  CHECK(props.smooth.holds);
  CHECK(props.deterministic.holds);
  Factor f = circuit_factor<Rat>(ac);
  std::vector<int> row;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    f.decode(i, row);
    std::uint64_t mask = 0;
    for (std::size_t k = 0; k < row.size(); ++k)
      if (row[k] == 1) mask |= 1ull << k;
    CHECK(f.values[i] == psdd_evaluate<Rat>(*fx.psdd, oracle::mask_assignment(3, mask)));
  }

  for (int round = 0; round < 10; ++round) {
    int n = 3 + static_cast<int>(rng() % 2);
    CnfFormula cnf = oracle::random_cnf(rng, n, n + 1);
    SddManager m(Vtree::balanced(n));
    SddId base = m.compile_cnf(cnf);
    if (base == m.false_node()) continue;
    Psdd p = attach_params(m, base, random_params(m, base, rng));
    ArithmeticCircuit pac = psdd_to_ac(p);
    CHECK(check_ac_properties(pac).all_hold());
    Factor pf = circuit_factor<Rat>(pac);
    std::vector<int> prow;
    for (std::size_t i = 0; i < pf.values.size(); ++i) {
      pf.decode(i, prow);
      std::uint64_t mask = 0;
      for (std::size_t k = 0; k < prow.size(); ++k)
        if (prow[k] == 1) mask |= 1ull << k;
      CHECK(pf.values[i] == psdd_evaluate<Rat>(p, oracle::mask_assignment(n, mask)));
    }
  }
}

TEST_CASE("single bernoulli expands to theta lambda_x plus complement") {
  Vtree vt = Vtree::balanced(1);
  SddManager m(vt);
  PsddParams params;
  params.bernoullis[1] = make_rat(3, 10);
  Psdd p = attach_params(m, m.true_node(), params);
  ArithmeticCircuit ac = psdd_to_ac(p);
  Factor f = circuit_factor<Rat>(ac);
  CHECK(f.values == std::vector<Rat>{make_rat(7, 10), make_rat(3, 10)});
}

TEST_CASE("dataset parsing") {
  std::istringstream in("1,0,1\n0,0,1,3\n");
  Dataset d = parse_dataset(in);
  CHECK(d.var_count == 3);
  REQUIRE(d.rows.size() == 2);
  CHECK(d.counts[0] == 1);
  CHECK(d.counts[1] == 3);
  CHECK(d.total_count() == 4);

  std::istringstream bad("1,2,0\n");
  CHECK_THROWS_AS(parse_dataset(bad), error);
  std::istringstream empty("");
  CHECK_THROWS_AS(parse_dataset(empty), error);
}

TEST_CASE("closed-form learning: simple proportions") {
  Vtree vt = Vtree::balanced(1);
  SddManager m(vt);
  Dataset d;
  d.var_count = 1;
  d.rows = {{1}, {0}};
  d.counts = {3, 1};
  LearnResult r = learn_ml_complete(m, m.true_node(), d);
  CHECK(r.rejected_rows == 0);
  CHECK(r.psdd.params().bernoullis.at(1) == make_rat(3, 4));
}

TEST_CASE("learning rejects infeasible rows and degenerates cleanly") {
  Vtree vt = parse_vtree_string(oracle::read_file(oracle::fixture_path("fig10.vtree")));
  SddManager m(vt);
  std::istringstream in(oracle::read_file(oracle::fixture_path("fig10.sdd")));
  ParsedSdd parsed = parse_sdd(in, m);

  Dataset d;
  d.var_count = 3;
  d.rows = {{1, 1, 1}, {1, 1, 0}};  // second row violates C
  d.counts = {5, 2};
  LearnResult r = learn_ml_complete(m, parsed.root, d);
  CHECK(r.rejected_rows == 2);
  // All surviving rows identical: the learned distribution is degenerate.
  CHECK(psdd_evaluate<Rat>(r.psdd, oracle::mask_assignment(3, 0b111)) == Rat(1));

  Dataset all_bad;
  all_bad.var_count = 3;
  all_bad.rows = {{0, 0, 1}};
  all_bad.counts = {1};
  CHECK_THROWS_AS(learn_ml_complete(m, parsed.root, all_bad), error);
}

TEST_CASE("learned parameters maximize training likelihood locally") {
  std::mt19937 rng(139);
  int wins = 0, trials = 0;
  for (int round = 0; round < 10; ++round) {
    int n = 3 + static_cast<int>(rng() % 2);
    CnfFormula cnf = oracle::random_cnf(rng, n, n);
    SddManager m(Vtree::balanced(n));
    SddId base = m.compile_cnf(cnf);
    if (base == m.false_node()) continue;

    // Sample feasible rows uniformly with random multiplicities.
    Dataset d;
    d.var_count = n;
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
      if (!m.evaluate(base, oracle::mask_assignment(n, mask))) continue;
      if (rng() % 3 == 0) continue;
      std::vector<char> row;
      for (int v = 1; v <= n; ++v) row.push_back((mask >> (v - 1)) & 1);
      d.rows.push_back(row);
      d.counts.push_back(1 + static_cast<long>(rng() % 7));
    }
    if (d.rows.empty()) continue;

    LearnResult r = learn_ml_complete(m, base, d);
    double best = log_likelihood(r.psdd, d);
    for (int trial = 0; trial < 25; ++trial) {
      Psdd perturbed = attach_params(m, base, random_params(m, base, rng));
      CHECK(log_likelihood(perturbed, d) <= best + 1e-9);
      ++trials;
    }
    ++wins;
  }
  CHECK(wins > 0);
  CHECK(trials > 0);
}

TEST_CASE("laplace smoothing moves parameters off the boundary") {
  Vtree vt = Vtree::balanced(1);
  SddManager m(vt);
  Dataset d;
  d.var_count = 1;
  d.rows = {{1}};
  d.counts = {1};
  LearnOptions opts;
  opts.alpha = Rat(1);
  LearnResult r = learn_ml_complete(m, m.true_node(), d, opts);
  CHECK(r.psdd.params().bernoullis.at(1) == make_rat(2, 3));
}

TEST_CASE("psdd text round trip") {
  Fig10 fx = load_fig10();
  std::ostringstream out;
  serialize_psdd(*fx.psdd, out);
  Vtree vt = parse_vtree_string(oracle::read_file(oracle::fixture_path("fig10.vtree")));
  SddManager m2(vt);
  std::istringstream in(out.str());
  Psdd back = parse_psdd(in, m2);
  for (std::uint64_t mask = 0; mask < 8; ++mask)
    CHECK(psdd_evaluate<Rat>(back, oracle::mask_assignment(3, mask)) ==
          psdd_evaluate<Rat>(*fx.psdd, oracle::mask_assignment(3, mask)));
}
