#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "oracles.hpp"

// End-to-end driver tests: every query subcommand against its oracle twin,
// plus the exit-code contract.

namespace {

struct RunResult {
  int exit_code;
  std::string out;
};

std::string tc_bin() {
  const char* env = std::getenv("TC_BIN");
  REQUIRE(env != nullptr);
  return env;
}

RunResult run(const std::string& args) {
  std::string cmd = tc_bin() + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[512];
  while (std::size_t got = fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
  int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::string last_line(const std::string& text) {
  std::size_t end = text.find_last_not_of('\n');
  if (end == std::string::npos) return "";
  std::size_t start = text.rfind('\n', end);
  return text.substr(start == std::string::npos ? 0 : start + 1, end - (start == std::string::npos ? 0 : start + 1) + 1);
}

std::string fixture(const std::string& name) { return tc::testing::fixture_path(name); }

std::filesystem::path scratch() {
  auto dir = std::filesystem::temp_directory_path() / "tc_cli_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& content) {
  auto path = scratch() / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

}  // namespace

TEST_CASE("count prints the fig4 numbers") {
  RunResult all = run("count --nnf " + fixture("fig4.nnf"));
  CHECK(all.exit_code == 0);
  CHECK(last_line(all.out) == "9");

  RunResult cond = run("count --nnf " + fixture("fig4.nnf") + " --evidence \"A=1,K=0\"");
  CHECK(cond.exit_code == 0);
  CHECK(last_line(cond.out) == "2");
}

TEST_CASE("identical invocations are byte-identical") {
  std::string cmd = "wmc --nnf " + fixture("fig4.nnf") + " --weights " +
                    write_file("w.txt", "1 0.25\n-1 0.75\n2 0.5\n-2 0.5\n3 0.125\n-3 0.875\n4 1\n-4 1\n");
  RunResult a = run(cmd);
  RunResult b = run(cmd);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("check exits 2 with a witness on violation") {
  std::string bad = write_file("shared.nnf", "nnf 4 4 2\nL 1\nL 2\nA 2 0 1\nA 2 0 2\n");
  RunResult r = run("check --nnf " + bad + " --props decomposable");
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("PROPERTY decomposable FAILS") != std::string::npos);
  CHECK(r.out.find("WITNESS node=") != std::string::npos);
}

TEST_CASE("exit codes: usage and format errors") {
  CHECK(run("count").exit_code == 1);                       // missing required option
  CHECK(run("nonsense").exit_code == 1);                    // unknown subcommand
  CHECK(run("count --nnf /does/not/exist").exit_code == 3); // io error
  std::string garbage = write_file("garbage.nnf", "not an nnf file\n");
  CHECK(run("count --nnf " + garbage).exit_code == 3);
}

TEST_CASE("compile then count matches oracle count") {
  std::string cnf = write_file("f.cnf", "p cnf 5 4\n1 2 0\n-1 3 0\n-3 4 5 0\n2 -5 0\n");
  std::string nnf = (scratch() / "f.nnf").string();
  std::string smoothed = (scratch() / "f_s.nnf").string();
  CHECK(run("compile --cnf " + cnf + " --out " + nnf).exit_code == 0);
  CHECK(run("smooth --nnf " + nnf + " --out " + smoothed).exit_code == 0);
  RunResult counted = run("count --nnf " + smoothed);
  RunResult oracle = run("oracle count --cnf " + cnf);
  CHECK(counted.exit_code == 0);
  CHECK(last_line(counted.out) == last_line(oracle.out));

  RunResult wmc = run("wmc --nnf " + smoothed);
  RunResult woracle = run("oracle count --cnf " + cnf + " --weights " + write_file("u.w", ""));
  CHECK(last_line(wmc.out) == last_line(woracle.out));
}

TEST_CASE("oracle models twin agrees with enumerate") {
  std::string cnf = write_file("m.cnf", "p cnf 3 2\n1 2 0\n-1 3 0\n");
  std::string nnf = (scratch() / "m.nnf").string();
  std::string smoothed = (scratch() / "m_s.nnf").string();
  run("compile --cnf " + cnf + " --out " + nnf);
  run("smooth --nnf " + nnf + " --out " + smoothed);
  RunResult from_cnf = run("oracle models --cnf " + cnf);
  RunResult from_nnf = run("oracle models --nnf " + smoothed);
  CHECK(from_cnf.out == from_nnf.out);
}

TEST_CASE("bn pipeline via the driver") {
  std::string ac = (scratch() / "fig9.ac").string();
  CHECK(run("bn compile --net " + fixture("fig9.net") + " --out " + ac).exit_code == 0);
  RunResult p = run("bn query --ac " + ac + " --kind evidence_prob --evidence \"A=a2,B=b2,C=c2\"");
  CHECK(last_line(p.out) == "0.576");
  RunResult oracle = run("oracle joint --net " + fixture("fig9.net") + " --evidence \"A=a2,B=b2,C=c2\"");
  CHECK(last_line(oracle.out) == "0.576");

  RunResult marg = run("bn query --ac " + ac + " --kind marginals");
  CHECK(marg.exit_code == 0);
  CHECK(marg.out.find("marginal A=a1 0.1") != std::string::npos);
  CHECK(last_line(marg.out) == "1");

  RunResult mpe = run("bn query --ac " + ac + " --kind mpe");
  CHECK(mpe.out.find("mpe A=a2,B=b2,C=c2") != std::string::npos);
  CHECK(last_line(mpe.out) == "0.576");
}

TEST_CASE("emajsat via the driver") {
  std::string cnf = write_file("e.cnf", "p cnf 4 3\n1 3 0\n-1 4 0\n2 3 4 0\n");
  std::string nnf = (scratch() / "e.nnf").string();
  std::string smoothed = (scratch() / "e_s.nnf").string();
  run("compile --cnf " + cnf + " --x-first 1,2 --out " + nnf);
  run("smooth --nnf " + nnf + " --out " + smoothed);
  RunResult r = run("emajsat --nnf " + smoothed + " --x 1,2");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("witness") != std::string::npos);
  CHECK(last_line(r.out) == "2");  // every x leaves two satisfying completions
}

TEST_CASE("oracle twins for emajsat and ac queries") {
  std::string cnf = write_file("e2.cnf", "p cnf 5 3\n1 3 0\n-1 4 5 0\n2 -4 0\n");
  std::string nnf = (scratch() / "e2.nnf").string();
  std::string smoothed = (scratch() / "e2_s.nnf").string();
  run("compile --cnf " + cnf + " --x-first 1,2 --out " + nnf);
  run("smooth --nnf " + nnf + " --out " + smoothed);
  RunResult fast = run("emajsat --nnf " + smoothed + " --x 1,2");
  RunResult slow = run("oracle emajsat --nnf " + smoothed + " --x 1,2");
  CHECK(last_line(fast.out) == last_line(slow.out));

  RunResult m1 = run("ac marginal --ac " + fixture("ac2.ac") + " --evidence \"B=~b\"");
  RunResult m2 = run("oracle ac --kind marginal --ac " + fixture("ac2.ac") + " --evidence \"B=~b\"");
  CHECK(last_line(m1.out) == last_line(m2.out));
  RunResult p1 = run("ac mpe --ac " + fixture("ac2.ac"));
  RunResult p2 = run("oracle ac --kind mpe --ac " + fixture("ac2.ac"));
  CHECK(last_line(p1.out) == last_line(p2.out));
}

TEST_CASE("ac queries via the driver") {
  RunResult ev = run("ac eval --ac " + fixture("ac1.ac") + " --evidence \"A=a\"");
  CHECK(last_line(ev.out) == "8");
  RunResult marginal = run("ac marginal --ac " + fixture("ac2.ac") + " --evidence \"A=a\"");
  CHECK(last_line(marginal.out) == "7");
  RunResult not_reasoning = run("ac marginal --ac " + fixture("ac1.ac") + " --evidence \"A=a\"");
  CHECK(not_reasoning.exit_code == 2);  // precondition fails: not decomposable
  RunResult mpe = run("ac mpe --ac " + fixture("ac2.ac"));
  CHECK(last_line(mpe.out) == "12");
  RunResult forced = run("ac mpe --ac " + fixture("ac3.ac") + " --force");
  CHECK(last_line(forced.out) == "63");
  RunResult subs = run("ac subcircuits --ac " + fixture("ac2.ac"));
  CHECK(last_line(subs.out) == "4");
  RunResult grad = run("ac grad --ac " + fixture("ac2.ac"));
  CHECK(last_line(grad.out) == "29");
}

TEST_CASE("psdd via the driver") {
  RunResult ev = run("psdd eval --psdd " + fixture("fig10.psdd") + " --vtree " +
                     fixture("fig10.vtree") + " --row 1,1,1");
  CHECK(last_line(ev.out) == "0.24");
  RunResult zero = run("psdd eval --psdd " + fixture("fig10.psdd") + " --vtree " +
                       fixture("fig10.vtree") + " --row 1,1,0");
  CHECK(last_line(zero.out) == "0");

  std::string data = write_file("d.csv", "1,1,1,5\n1,0,1,3\n0,1,1,2\n");
  std::string out = (scratch() / "learned.psdd").string();
  RunResult learn = run("psdd learn --sdd " + fixture("fig10.sdd") + " --vtree " +
                        fixture("fig10.vtree") + " --data " + data + " --out " + out);
  CHECK(learn.exit_code == 0);
  RunResult lev = run("psdd eval --psdd " + out + " --vtree " + fixture("fig10.vtree") + " --row 1,1,1");
  CHECK(last_line(lev.out) == "0.5");
}

TEST_CASE("sdd subcommands via the driver") {
  std::string cnf = write_file("s.cnf", "p cnf 3 2\n1 2 0\n-2 3 0\n");
  std::string vtree = write_file("s.vtree", "vtree 5\nL 0 1\nL 1 2\nL 2 3\nI 3 1 2\nI 4 0 3\n");
  std::string sdd = (scratch() / "s.sdd").string();
  std::string nnf = (scratch() / "s_sdd.nnf").string();
  std::string smoothed = (scratch() / "s_sdd_s.nnf").string();
  std::string obdd = (scratch() / "s.obdd").string();
  CHECK(run("sdd compile --cnf " + cnf + " --vtree " + vtree + " --out " + sdd).exit_code == 0);
  CHECK(run("sdd export-nnf --sdd " + sdd + " --vtree " + vtree + " --out " + nnf).exit_code == 0);
  CHECK(run("smooth --nnf " + nnf + " --out " + smoothed).exit_code == 0);
  RunResult count = run("count --nnf " + smoothed + " --assume-deterministic");
  RunResult oracle = run("oracle count --cnf " + cnf);
  CHECK(last_line(count.out) == last_line(oracle.out));
  CHECK(run("sdd export-obdd --sdd " + sdd + " --vtree " + vtree + " --out " + obdd).exit_code == 0);
  // The balanced vtree is not right-linear: export must fail with code 2.
  std::string bal = write_file("bal.vtree", "vtree 5\nL 0 1\nL 1 2\nI 2 0 1\nL 3 3\nI 4 2 3\n");
  std::string sdd2 = (scratch() / "s2.sdd").string();
  run("sdd compile --cnf " + cnf + " --vtree " + bal + " --out " + sdd2);
  CHECK(run("sdd export-obdd --sdd " + sdd2 + " --vtree " + bal + " --out " + obdd).exit_code == 2);
}
