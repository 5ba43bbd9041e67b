#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "tc/cnf.hpp"
#include "tc/error.hpp"
#include "tc/nnf.hpp"
#include "tc/vtree.hpp"

using namespace tc;
namespace oracle = tc::testing;

TEST_CASE("dimacs parsing") {
  CnfFormula f = parse_cnf_string("p cnf 2 2\n1 2 0\n-1 2 0\n");
  CHECK(f.var_count == 2);
  REQUIRE(f.clauses.size() == 2);
  CHECK(f.clauses[0] == Clause{Literal{1, true}, Literal{2, true}});
  CHECK(f.clauses[1] == Clause{Literal{1, false}, Literal{2, true}});

  CnfFormula trivial = parse_cnf_string("p cnf 1 0\n");
  CHECK(trivial.var_count == 1);
  CHECK(trivial.clauses.empty());

  CHECK_THROWS_AS(parse_cnf_string("p cnf 2 1\n3 0\n"), error);       // literal out of range
  CHECK_THROWS_AS(parse_cnf_string("1 2 0\n"), error);                // missing header
  CHECK_THROWS_AS(parse_cnf_string("p cnf 2 1\np cnf 2 1\n1 0\n"), error);  // duplicate header
  CHECK_THROWS_AS(parse_cnf_string("p cnf 2 2\n1 0\n"), error);       // clause count mismatch
  CHECK_THROWS_AS(parse_cnf_string("p cnf 2 1\n1 x 0\n"), error);     // non-integer token
}

TEST_CASE("dimacs round trip") {
  CnfFormula f = parse_cnf_string("c var 1 A\nc var 2 B\np cnf 2 2\n1 2 0\n-1 2 0\n");
  std::ostringstream out;
  serialize_cnf(f, out);
  CnfFormula g = parse_cnf_string(out.str());
  CHECK(g.var_count == f.var_count);
  CHECK(g.clauses == f.clauses);
  CHECK(g.var_name(1) == "A");
  std::ostringstream out2;
  serialize_cnf(g, out2);
  CHECK(out.str() == out2.str());
}

TEST_CASE("nnf parsing basics") {
  NnfCircuit single = parse_nnf_string("nnf 1 0 1\nL 1\n");
  CHECK(single.node_count() == 1);
  CHECK(single.node(single.root()).kind == NnfKind::Literal);
  CHECK(single.node(single.root()).lit.dimacs() == 1);

  NnfCircuit taut = parse_nnf_string("nnf 3 2 1\nL 1\nL -1\nO 1 2 0 1\n");
  CHECK(taut.node(taut.root()).kind == NnfKind::Or);
  CHECK(taut.node(taut.root()).decision_var == 1);

  CHECK_THROWS_AS(parse_nnf_string("nnf 2 1 1\nA 1 1\nL 1\n"), error);  // forward reference
  CHECK_THROWS_AS(parse_nnf_string("nnf 2 0 1\nL 1\n"), error);         // node count mismatch
  CHECK_THROWS_AS(parse_nnf_string("nnf 1 1 1\nL 1\n"), error);         // edge count mismatch
  CHECK_THROWS_AS(parse_nnf_string("nnf 1 0 1\nX 1\n"), error);         // bad opcode
}

TEST_CASE("nnf serialize then parse is identity") {
  std::string text = oracle::read_file(oracle::fixture_path("fig4.nnf"));
  NnfCircuit c = parse_nnf_string(text);
  std::string once = serialize_nnf_string(c);
  CHECK(once == text);  // the fixture is already whitespace-normalized
  NnfCircuit c2 = parse_nnf_string(once);
  std::string twice = serialize_nnf_string(c2);
  CHECK(once == twice);
  CHECK(c2.node_count() == c.node_count());
  CHECK(c2.edge_count() == c.edge_count());
  for (NodeId id = 0; id < c.node_count(); ++id) {
    CHECK(c2.node(id).kind == c.node(id).kind);
    CHECK(c2.children(id).size() == c.children(id).size());
  }
}

TEST_CASE("constants are zero-child gates") {
  NnfCircuit t = parse_nnf_string("nnf 1 0 0\nA 0\n");
  CHECK(t.node(t.root()).kind == NnfKind::True);
  NnfCircuit f = parse_nnf_string("nnf 1 0 0\nO 0 0\n");
  CHECK(f.node(f.root()).kind == NnfKind::False);
}

TEST_CASE("evaluate gate semantics") {
  NnfCircuit taut = parse_nnf_string("nnf 3 2 1\nL 1\nL -1\nO 1 2 0 1\n");
  CHECK(evaluate(taut, oracle::mask_assignment(1, 0)));
  CHECK(evaluate(taut, oracle::mask_assignment(1, 1)));

  NnfCircuit conj = parse_nnf_string("nnf 3 2 2\nL 1\nL 2\nA 2 0 1\n");
  CHECK_FALSE(evaluate(conj, oracle::mask_assignment(2, 0b01)));  // A=1, B=0
  CHECK(evaluate(conj, oracle::mask_assignment(2, 0b11)));

  Assignment partial(2);
  partial.bind(1, true);
  CHECK_THROWS_AS(evaluate(conj, partial), error);
}

TEST_CASE("fig4 fixture evaluates like its truth table") {
  NnfCircuit c = parse_nnf_string(oracle::read_file(oracle::fixture_path("fig4.nnf")));
  // (K or L) and (A or P), transcription pinned by the published counts.
  auto models = oracle::circuit_models(c);
  CHECK(models.size() == 9);
  CHECK(evaluate(c, oracle::mask_assignment(4, 0b1111)));
  for (std::uint64_t m = 0; m < 16; ++m) {
    Assignment a = oracle::mask_assignment(4, m);
    bool formula = (a.value(2) || a.value(3)) && (a.value(1) || a.value(4));
    CHECK(evaluate(c, a) == formula);
  }
}

TEST_CASE("node_vars unions children") {
  NnfCircuit c = parse_nnf_string("nnf 5 4 2\nL 1\nL 2\nL -2\nO 2 2 1 2\nA 2 0 3\n");
  auto vars = node_vars(c);
  CHECK(vars[0].to_vector() == std::vector<int>{1});
  CHECK(vars[3].to_vector() == std::vector<int>{2});
  CHECK(vars[4].to_vector() == std::vector<int>{1, 2});
}

TEST_CASE("topological validity is enforced by the builder") {
  NnfBuilder b(2);
  NodeId a = b.literal(1);
  NodeId n = b.add_and({a});
  NnfCircuit c = b.take(n);
  for (NodeId id = 0; id < c.node_count(); ++id)
    for (NodeId ch : c.children(id)) CHECK(ch < id);
}

TEST_CASE("vtree parse and classify") {
  Vtree right = parse_vtree_string(oracle::read_file(oracle::fixture_path("fig3_right.vtree")));
  VarSet none(5);
  CHECK(vtree_classify(right, none).right_linear);

  Vtree balanced = parse_vtree_string(oracle::read_file(oracle::fixture_path("fig3_left.vtree")));
  VarSet none4(4);
  CHECK_FALSE(vtree_classify(balanced, none4).right_linear);
  // X = empty is constrained with u = root.
  auto klass = vtree_classify(balanced, none4);
  CHECK(klass.constrained_for_x);
  CHECK(klass.constrained_node == balanced.root());

  Vtree mid = parse_vtree_string(oracle::read_file(oracle::fixture_path("fig3_mid.vtree")));
  VarSet abd(5);
  abd.add(1);
  abd.add(2);
  abd.add(4);
  CHECK(vtree_classify(mid, abd).constrained_for_x);
  VarSet ab(5);
  ab.add(1);
  ab.add(2);
  CHECK_FALSE(vtree_classify(mid, ab).constrained_for_x);

  Vtree leaf = parse_vtree_string("vtree 1\nL 0 1\n");
  CHECK(leaf.var_count() == 1);

  CHECK_THROWS_AS(parse_vtree_string("vtree 2\nL 0 1\nL 1 1\n"), error);  // duplicate var
  CHECK_THROWS_AS(parse_vtree_string("vtree 3\nL 0 1\nL 1 2\nI 2 0 0\n"), error);
}

TEST_CASE("vtree round trip and fullness") {
  for (const char* name : {"fig3_left.vtree", "fig3_mid.vtree", "fig3_right.vtree"}) {
    Vtree v = parse_vtree_string(oracle::read_file(oracle::fixture_path(name)));
    int leaves = 0, internals = 0;
    for (VtreeId id = 0; id < v.node_count(); ++id)
      (v.node(id).is_leaf() ? leaves : internals)++;
    CHECK(internals == leaves - 1);
    std::string once = serialize_vtree_string(v);
    Vtree v2 = parse_vtree_string(once);
    CHECK(serialize_vtree_string(v2) == once);
    CHECK(v2.var_count() == v.var_count());
  }
}
