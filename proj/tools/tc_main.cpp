// tc: compile, check, transform, and query tractable circuits.
//
// Exit codes: 0 success, 1 usage error, 2 property-precondition failure,
// 3 I/O or format error. Query subcommands print their numeric answer as the
// final stdout line.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tc/ac.hpp"
#include "tc/analysis.hpp"
#include "tc/bn.hpp"
#include "tc/cnf.hpp"
#include "tc/compiler.hpp"
#include "tc/error.hpp"
#include "tc/nnf.hpp"
#include "tc/psdd.hpp"
#include "tc/queries.hpp"
#include "tc/sdd.hpp"
#include "tc/vtree.hpp"

namespace {

using namespace tc;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_format("cannot open '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail_format("cannot write '" + path + "'");
  return out;
}

NnfCircuit read_nnf(const std::string& path) {
  auto in = open_input(path);
  return parse_nnf(in);
}

CnfFormula read_cnf(const std::string& path) {
  auto in = open_input(path);
  return parse_cnf(in);
}

Vtree read_vtree(const std::string& path) {
  auto in = open_input(path);
  return parse_vtree(in);
}

ArithmeticCircuit read_ac(const std::string& path) {
  auto in = open_input(path);
  return parse_ac(in);
}

BayesNet read_bn(const std::string& path) {
  auto in = open_input(path);
  return parse_bn(in);
}

WeightMap read_weights(const std::string& path, int var_count) {
  if (path.empty()) return WeightMap::units(var_count);
  auto in = open_input(path);
  std::vector<Var> defaulted;
  WeightMap w = parse_weights(in, var_count, &defaulted);
  if (!defaulted.empty()) {
    std::cerr << "warning: weights default to 1 for " << defaulted.size() << " variable(s)\n";
  }
  return w;
}

std::vector<Var> parse_var_list(const std::string& text, int var_count, const VarNames& names) {
  std::vector<Var> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    Var v = 0;
    for (std::size_t i = 1; i < names.size(); ++i)
      if (names[i] == item) v = static_cast<Var>(i);
    if (v == 0) {
      try {
        v = std::stoi(item);
      } catch (...) {
        fail_usage("unknown variable '" + item + "'");
      }
    }
    if (v < 1 || v > var_count) fail_usage("variable '" + item + "' out of range");
    out.push_back(v);
  }
  return out;
}

std::string assignment_string(const Assignment& a, const VarNames& names) {
  std::string out;
  auto name = [&](Var v) {
    if (v < static_cast<int>(names.size()) && !names[v].empty()) return names[v];
    return std::to_string(v);
  };
  for (Var v = 1; v <= a.var_count(); ++v) {
    if (!a.bound(v)) continue;
    if (!out.empty()) out += ",";
    out += name(v) + "=" + (a.value(v) ? "1" : "0");
  }
  return out;
}

Instantiation row_instantiation(const std::string& text, std::size_t var_count) {
  Instantiation inst(var_count);
  std::size_t var = 0;
  for (char c : text) {
    if (c == ',' || c == ' ') continue;
    if (c != '0' && c != '1') fail_format("row must be 0/1 characters");
    if (var >= var_count) fail_format("row longer than the variable count");
    inst.bind(var++, c == '1');
  }
  if (var != var_count) fail_format("row shorter than the variable count");
  return inst;
}

// ---- subcommand bodies ----

struct CompileArgs {
  std::string cnf, out, x_first, heuristic = "most-occurring";
  std::size_t cache_capacity = 1u << 20;
};

int run_compile(const CompileArgs& args) {
  CnfFormula f = read_cnf(args.cnf);
  CompileOptions opts;
  opts.cache_capacity = args.cache_capacity;
  if (args.heuristic == "lowest-index")
    opts.heuristic = DecisionHeuristic::lowest_index;
  else if (args.heuristic != "most-occurring")
    fail_usage("unknown heuristic '" + args.heuristic + "'");
  if (!args.x_first.empty()) opts.x_first = parse_var_list(args.x_first, f.var_count, f.names);
  CompileStats stats;
  NnfCircuit c = compile(f, opts, &stats);
  auto out = open_output(args.out);
  serialize_nnf(c, out);
  std::cerr << "cache hits " << stats.cache_hits << ", misses " << stats.cache_misses
            << ", decisions " << stats.decisions << "\n";
  std::cout << "nodes " << c.node_count() << " edges " << c.edge_count() << "\n";
  return 0;
}

int run_check(const std::string& nnf_path, const std::string& props, const std::string& vtree_path,
              const std::string& x_list, int oracle_cap) {
  NnfCircuit c = read_nnf(nnf_path);
  bool all_hold = true;
  std::stringstream ss(props);
  std::string prop;
  while (std::getline(ss, prop, ',')) {
    PropertyReport report;
    if (prop == "decomposable") {
      report = check_decomposability(c);
    } else if (prop == "smooth") {
      report = check_smoothness(c);
    } else if (prop == "smooth-exclude-unsat") {
      report = check_smoothness(c, true, oracle_cap);
    } else if (prop == "deterministic") {
      report = check_determinism_exhaustive(c, oracle_cap);
    } else if (prop == "decision") {
      report = check_decision(c);
    } else if (prop == "structured") {
      if (vtree_path.empty()) fail_usage("structured check needs --vtree");
      Vtree v = read_vtree(vtree_path);
      report = check_structured(c, v);
    } else if (prop == "x-constrained") {
      if (x_list.empty()) fail_usage("x-constrained check needs --x");
      VarSet x(c.var_count);
      for (Var v : parse_var_list(x_list, c.var_count, c.names)) x.add(v);
      report.property = "x-constrained";
      if (!check_x_constrained(c, x)) report.add_witness(c.root(), "an X-decision sits below a Y-decision");
    } else {
      fail_usage("unknown property '" + prop + "'");
    }
    render_report(report, std::cout);
    all_hold = all_hold && report.holds;
  }
  return all_hold ? 0 : 2;
}

int run_count(const std::string& nnf_path, const std::string& weights_path,
              const std::string& evidence, bool weighted, bool assume_deterministic,
              bool rational) {
  NnfCircuit c = read_nnf(nnf_path);
  CountOptions opts;
  opts.assume_deterministic = assume_deterministic;
  Assignment e(c.var_count);
  if (!evidence.empty()) e = parse_evidence(evidence, c.var_count, c.names);
  if (!weighted) {
    BigInt result = evidence.empty() ? model_count(c, opts) : conditioned_count(c, e, opts);
    std::cout << result.get_str() << "\n";
    return 0;
  }
  WeightMap w = read_weights(weights_path, c.var_count);
  if (rational) {
    std::cout << decimal_string(weighted_count<Rat>(c, w, e)) << "\n";
  } else {
    std::cout << format_number(weighted_count<double>(c, w, e)) << "\n";
  }
  return 0;
}

int run_emajsat(const std::string& nnf_path, const std::string& x_list,
                const std::string& weights_path) {
  NnfCircuit c = read_nnf(nnf_path);
  VarSet x(c.var_count);
  for (Var v : parse_var_list(x_list, c.var_count, c.names)) x.add(v);
  WeightMap w = read_weights(weights_path, c.var_count);
  auto r = e_majsat<double>(c, x, w);
  std::cout << "witness " << assignment_string(r.witness, c.names) << "\n";
  std::cout << format_number(r.value) << "\n";
  return 0;
}

int run_ac_query(const std::string& kind, const std::string& ac_path, const std::string& evidence,
                 const std::string& soft_path, bool force) {
  ArithmeticCircuit ac = read_ac(ac_path);
  Instantiation e(ac.vars.size());
  if (!evidence.empty()) e = parse_instantiation(evidence, ac.vars);

  if (kind == "eval") {
    if (!soft_path.empty()) {
      auto in = open_input(soft_path);
      Likelihoods lik = parse_likelihoods(in, ac.vars);
      std::cout << format_number(soft_evidence(ac, lik, e)) << "\n";
    } else {
      std::cout << format_number(ac_evaluate<double>(ac, e)) << "\n";
    }
  } else if (kind == "marginal") {
    std::cout << format_number(ac_marginal<double>(ac, e)) << "\n";
  } else if (kind == "mpe") {
    MaximizerCircuit mc = maximizer_of(ac);
    MpeOptions opts;
    opts.skip_property_checks = force;
    auto r = mpe<double>(mc, e, opts);
    std::cout << "mpe " << instantiation_string(r.instantiation, ac.vars) << "\n";
    std::cout << format_number(r.value) << "\n";
  } else if (kind == "subcircuits") {
    auto subs = enumerate_complete_subcircuits(ac);
    for (const auto& s : subs) {
      std::cout << "subcircuit term=";
      for (std::size_t i = 0; i < s.term.size(); ++i) {
        if (i) std::cout << ",";
        std::cout << ac.vars[s.term[i].first].name << "="
                  << ac.vars[s.term[i].first].labels[s.term[i].second];
      }
      std::cout << " coefficient=" << decimal_string(s.coefficient) << "\n";
    }
    std::cout << subs.size() << "\n";
  } else if (kind == "grad") {
    auto bp = backprop<double>(ac, IndicatorSetting::of(ac.vars, e));
    std::vector<std::vector<double>> grads(ac.vars.size());
    for (std::size_t v = 0; v < ac.vars.size(); ++v)
      grads[v].assign(ac.vars[v].domain_size(), 0.0);
    for (NodeId id = 0; id < ac.node_count(); ++id) {
      const AcNode& n = ac.node(id);
      if (n.kind == AcKind::Indicator) grads[n.var][n.value] += bp.partial[id];
    }
    for (std::size_t v = 0; v < ac.vars.size(); ++v)
      for (int val = 0; val < ac.vars[v].domain_size(); ++val)
        std::cout << "grad " << ac.vars[v].name << "=" << ac.vars[v].labels[val] << " "
                  << format_number(grads[v][val]) << "\n";
    std::cout << format_number(bp.value) << "\n";
  } else {
    fail_usage("unknown ac subcommand '" + kind + "'");
  }
  return 0;
}

int run_oracle_count(const std::string& cnf_path, const std::string& nnf_path,
                     const std::string& weights_path, const std::string& evidence, int cap) {
  // Brute-force twin of count/wmc.
  int var_count = 0;
  std::function<bool(const Assignment&)> satisfied;
  VarNames names;
  CnfFormula f;
  NnfCircuit c;
  if (!cnf_path.empty()) {
    f = read_cnf(cnf_path);
    var_count = f.var_count;
    names = f.names;
    satisfied = [&f](const Assignment& a) {
      for (const auto& clause : f.clauses) {
        bool ok = false;
        for (const auto& l : clause)
          if (a.value(l.var) == l.positive) ok = true;
        if (!ok) return false;
      }
      return true;
    };
  } else if (!nnf_path.empty()) {
    c = read_nnf(nnf_path);
    var_count = c.var_count;
    names = c.names;
    satisfied = [&c](const Assignment& a) { return evaluate(c, a); };
  } else {
    fail_usage("oracle count needs --cnf or --nnf");
  }
  if (var_count > cap) fail_precondition("oracle capped at " + std::to_string(cap) + " variables");

  Assignment e(var_count);
  if (!evidence.empty()) e = parse_evidence(evidence, var_count, names);
  bool weighted = !weights_path.empty();
  WeightMap w = read_weights(weights_path, var_count);

  Rat total(0);
  BigInt count = 0;
  for (std::uint64_t mask = 0; mask < (1ull << var_count); ++mask) {
    Assignment a(var_count);
    bool compatible = true;
    for (Var v = 1; v <= var_count; ++v) {
      a.bind(v, (mask >> (v - 1)) & 1);
      if (e.bound(v) && e.value(v) != a.value(v)) compatible = false;
    }
    if (!compatible || !satisfied(a)) continue;
    ++count;
    if (weighted) {
      Rat row(1);
      for (Var v = 1; v <= var_count; ++v) row *= w.weight(Literal{v, a.value(v)});
      total += row;
    }
  }
  if (weighted)
    std::cout << format_number(total.get_d()) << "\n";
  else
    std::cout << count.get_str() << "\n";
  return 0;
}

int run_oracle_models(const std::string& cnf_path, const std::string& nnf_path, int cap) {
  if (!cnf_path.empty()) {
    CnfFormula f = read_cnf(cnf_path);
    if (f.var_count > cap) fail_precondition("oracle capped at " + std::to_string(cap) + " variables");
    for (std::uint64_t mask = 0; mask < (1ull << f.var_count); ++mask) {
      Assignment a(f.var_count);
      std::string bits;
      for (Var v = 1; v <= f.var_count; ++v) {
        bool bit = (mask >> (f.var_count - v)) & 1;  // lexicographic: var 1 most significant
        a.bind(v, bit);
        bits += bit ? '1' : '0';
      }
      bool ok = true;
      for (const auto& clause : f.clauses) {
        bool sat_clause = false;
        for (const auto& l : clause)
          if (a.value(l.var) == l.positive) sat_clause = true;
        if (!sat_clause) ok = false;
      }
      if (ok) std::cout << bits << "\n";
    }
    return 0;
  }
  if (nnf_path.empty()) fail_usage("oracle models needs --cnf or --nnf");
  NnfCircuit c = read_nnf(nnf_path);
  for (const Assignment& a : enumerate_models(c, cap)) {
    std::string bits;
    for (Var v = 1; v <= c.var_count; ++v) bits += a.value(v) ? '1' : '0';
    std::cout << bits << "\n";
  }
  return 0;
}

int run_oracle_emajsat(const std::string& nnf_path, const std::string& x_list,
                       const std::string& weights_path, int cap) {
  NnfCircuit c = read_nnf(nnf_path);
  if (c.var_count > cap) fail_precondition("oracle capped at " + std::to_string(cap) + " variables");
  std::vector<Var> xvars = parse_var_list(x_list, c.var_count, c.names);
  WeightMap w = read_weights(weights_path, c.var_count);
  // Double loop: every X instantiation, weighted enumeration over the rest.
  Rat best(0);
  std::uint64_t best_mask = 0;
  bool first = true;
  for (std::uint64_t xm = 0; xm < (1ull << xvars.size()); ++xm) {
    Rat total(0);
    for (std::uint64_t mask = 0; mask < (1ull << c.var_count); ++mask) {
      Assignment a(c.var_count);
      for (Var v = 1; v <= c.var_count; ++v) a.bind(v, (mask >> (v - 1)) & 1);
      bool compatible = true;
      for (std::size_t i = 0; i < xvars.size(); ++i)
        if (a.value(xvars[i]) != static_cast<bool>((xm >> i) & 1)) compatible = false;
      if (!compatible || !evaluate(c, a)) continue;
      Rat row(1);
      for (Var v = 1; v <= c.var_count; ++v) row *= w.weight(Literal{v, a.value(v)});
      total += row;
    }
    if (first || total > best) {
      best = total;
      best_mask = xm;
      first = false;
    }
  }
  Assignment witness(c.var_count);
  for (std::size_t i = 0; i < xvars.size(); ++i) witness.bind(xvars[i], (best_mask >> i) & 1);
  std::cout << "witness " << assignment_string(witness, c.names) << "\n";
  std::cout << format_number(best.get_d()) << "\n";
  return 0;
}

int run_oracle_ac(const std::string& kind, const std::string& ac_path,
                  const std::string& evidence) {
  ArithmeticCircuit ac = read_ac(ac_path);
  Factor f = circuit_factor<Rat>(ac);
  Instantiation e(ac.vars.size());
  if (!evidence.empty()) e = parse_instantiation(evidence, ac.vars);
  if (kind == "marginal") {
    std::cout << format_number(f.marginal(e).get_d()) << "\n";
  } else if (kind == "mpe") {
    auto [best, row] = f.argmax(e);
    Instantiation inst(ac.vars.size());
    for (std::size_t i = 0; i < row.size(); ++i) inst.bind(i, row[i]);
    std::cout << "mpe " << instantiation_string(inst, ac.vars) << "\n";
    std::cout << format_number(best.get_d()) << "\n";
  } else {
    fail_usage("oracle ac kind must be marginal or mpe");
  }
  return 0;
}

int run_oracle_joint(const std::string& net_path, const std::string& evidence) {
  BayesNet bn = read_bn(net_path);
  Factor joint = joint_factor(bn);
  if (!evidence.empty()) {
    Instantiation e = parse_instantiation(evidence, joint.vars);
    std::cout << format_number(joint.marginal(e).get_d()) << "\n";
    return 0;
  }
  std::vector<int> row;
  Rat total(0);
  for (std::size_t i = 0; i < joint.values.size(); ++i) {
    joint.decode(i, row);
    Instantiation inst(joint.vars.size());
    for (std::size_t k = 0; k < row.size(); ++k) inst.bind(k, row[k]);
    std::cout << "row " << instantiation_string(inst, joint.vars) << " "
              << format_number(joint.values[i].get_d()) << "\n";
    total += joint.values[i];
  }
  std::cout << format_number(total.get_d()) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tractable Boolean and arithmetic circuit toolkit"};
  app.require_subcommand(1);

  // compile
  CompileArgs cargs;
  auto* cmd_compile = app.add_subcommand("compile", "compile CNF into a Decision-DNNF");
  cmd_compile->add_option("--cnf", cargs.cnf)->required();
  cmd_compile->add_option("--out", cargs.out)->required();
  cmd_compile->add_option("--x-first", cargs.x_first);
  cmd_compile->add_option("--heuristic", cargs.heuristic);
  cmd_compile->add_option("--cache-capacity", cargs.cache_capacity);

  // check
  std::string chk_nnf, chk_props, chk_vtree, chk_x;
  int chk_cap = 20;
  auto* cmd_check = app.add_subcommand("check", "verify circuit properties");
  cmd_check->add_option("--nnf", chk_nnf)->required();
  cmd_check->add_option("--props", chk_props)->required();
  cmd_check->add_option("--vtree", chk_vtree);
  cmd_check->add_option("--x", chk_x);
  cmd_check->add_option("--oracle-cap", chk_cap);

  // smooth
  std::string sm_nnf, sm_out;
  auto* cmd_smooth = app.add_subcommand("smooth", "apply the smoothing transform");
  cmd_smooth->add_option("--nnf", sm_nnf)->required();
  cmd_smooth->add_option("--out", sm_out)->required();

  // count / wmc
  std::string cnt_nnf, cnt_weights, cnt_evidence;
  bool cnt_assume = false, cnt_rational = false;
  auto* cmd_count = app.add_subcommand("count", "model count (optionally under evidence)");
  cmd_count->add_option("--nnf", cnt_nnf)->required();
  cmd_count->add_option("--evidence", cnt_evidence);
  cmd_count->add_flag("--assume-deterministic", cnt_assume);
  std::string wmc_nnf, wmc_weights, wmc_evidence;
  bool wmc_assume = false, wmc_rational = false;
  auto* cmd_wmc = app.add_subcommand("wmc", "weighted model count");
  cmd_wmc->add_option("--nnf", wmc_nnf)->required();
  cmd_wmc->add_option("--weights", wmc_weights);
  cmd_wmc->add_option("--evidence", wmc_evidence);
  cmd_wmc->add_flag("--assume-deterministic", wmc_assume);
  cmd_wmc->add_flag("--rational", wmc_rational);

  // emajsat
  std::string em_nnf, em_x, em_weights;
  auto* cmd_em = app.add_subcommand("emajsat", "E-MajSat on an X-constrained Decision-DNNF");
  cmd_em->add_option("--nnf", em_nnf)->required();
  cmd_em->add_option("--x", em_x)->required();
  cmd_em->add_option("--weights", em_weights);

  // sdd group
  auto* cmd_sdd = app.add_subcommand("sdd", "SDD construction and export");
  cmd_sdd->require_subcommand(1);
  std::string sc_cnf, sc_vtree, sc_out;
  auto* cmd_sdd_compile = cmd_sdd->add_subcommand("compile", "bottom-up CNF compilation");
  cmd_sdd_compile->add_option("--cnf", sc_cnf)->required();
  cmd_sdd_compile->add_option("--vtree", sc_vtree)->required();
  cmd_sdd_compile->add_option("--out", sc_out)->required();
  std::string sa_left, sa_right, sa_op, sa_vtree, sa_out;
  auto* cmd_sdd_apply = cmd_sdd->add_subcommand("apply", "combine two SDDs");
  cmd_sdd_apply->add_option("--left", sa_left)->required();
  cmd_sdd_apply->add_option("--right", sa_right)->required();
  cmd_sdd_apply->add_option("--op", sa_op)->required()->check(CLI::IsMember({"and", "or"}));
  cmd_sdd_apply->add_option("--vtree", sa_vtree)->required();
  cmd_sdd_apply->add_option("--out", sa_out)->required();
  std::string sn_sdd, sn_vtree, sn_out;
  auto* cmd_sdd_nnf = cmd_sdd->add_subcommand("export-nnf", "multiplexer expansion to NNF");
  cmd_sdd_nnf->add_option("--sdd", sn_sdd)->required();
  cmd_sdd_nnf->add_option("--vtree", sn_vtree)->required();
  cmd_sdd_nnf->add_option("--out", sn_out)->required();
  std::string so_sdd, so_vtree, so_out;
  auto* cmd_sdd_obdd = cmd_sdd->add_subcommand("export-obdd", "OBDD view (right-linear vtree)");
  cmd_sdd_obdd->add_option("--sdd", so_sdd)->required();
  cmd_sdd_obdd->add_option("--vtree", so_vtree)->required();
  cmd_sdd_obdd->add_option("--out", so_out)->required();

  // ac group
  auto* cmd_ac = app.add_subcommand("ac", "arithmetic circuit queries");
  cmd_ac->require_subcommand(1);
  struct {
    std::string ac, evidence, soft;
    bool force = false;
  } acq[5];
  const char* ac_kinds[5] = {"eval", "marginal", "mpe", "subcircuits", "grad"};
  for (int i = 0; i < 5; ++i) {
    auto* sub = cmd_ac->add_subcommand(ac_kinds[i]);
    sub->add_option("--ac", acq[i].ac)->required();
    sub->add_option("--evidence", acq[i].evidence);
    if (std::string(ac_kinds[i]) == "eval") sub->add_option("--soft", acq[i].soft);
    if (std::string(ac_kinds[i]) == "mpe") sub->add_flag("--force", acq[i].force);
  }

  // psdd group
  auto* cmd_psdd = app.add_subcommand("psdd", "PSDD learning and evaluation");
  cmd_psdd->require_subcommand(1);
  std::string pl_sdd, pl_vtree, pl_data, pl_out, pl_alpha = "0";
  auto* cmd_psdd_learn = cmd_psdd->add_subcommand("learn", "closed-form ML parameters");
  cmd_psdd_learn->add_option("--sdd", pl_sdd)->required();
  cmd_psdd_learn->add_option("--vtree", pl_vtree)->required();
  cmd_psdd_learn->add_option("--data", pl_data)->required();
  cmd_psdd_learn->add_option("--out", pl_out)->required();
  cmd_psdd_learn->add_option("--alpha", pl_alpha);
  std::string pe_psdd, pe_vtree, pe_row;
  auto* cmd_psdd_eval = cmd_psdd->add_subcommand("eval", "probability of a complete row");
  cmd_psdd_eval->add_option("--psdd", pe_psdd)->required();
  cmd_psdd_eval->add_option("--vtree", pe_vtree)->required();
  cmd_psdd_eval->add_option("--row", pe_row)->required();

  // bn group
  auto* cmd_bn = app.add_subcommand("bn", "Bayesian network pipeline");
  cmd_bn->require_subcommand(1);
  std::string bc_net, bc_out;
  bool bc_symbolic = false;
  auto* cmd_bn_compile = cmd_bn->add_subcommand("compile", "network to arithmetic circuit");
  cmd_bn_compile->add_option("--net", bc_net)->required();
  cmd_bn_compile->add_option("--out", bc_out)->required();
  cmd_bn_compile->add_flag("--symbolic", bc_symbolic);
  std::string bq_ac, bq_kind, bq_evidence, bq_soft;
  auto* cmd_bn_query = cmd_bn->add_subcommand("query", "probability queries on a compiled circuit");
  cmd_bn_query->add_option("--ac", bq_ac)->required();
  cmd_bn_query->add_option("--kind", bq_kind)
      ->required()
      ->check(CLI::IsMember({"evidence_prob", "marginals", "mpe", "soft"}));
  cmd_bn_query->add_option("--evidence", bq_evidence);
  cmd_bn_query->add_option("--soft", bq_soft);

  // oracle group
  auto* cmd_oracle = app.add_subcommand("oracle", "brute-force reference queries");
  cmd_oracle->require_subcommand(1);
  std::string oc_cnf, oc_nnf, oc_weights, oc_evidence;
  int oc_cap = 24;
  auto* cmd_oracle_count = cmd_oracle->add_subcommand("count", "enumerate and count");
  cmd_oracle_count->add_option("--cnf", oc_cnf);
  cmd_oracle_count->add_option("--nnf", oc_nnf);
  cmd_oracle_count->add_option("--weights", oc_weights);
  cmd_oracle_count->add_option("--evidence", oc_evidence);
  cmd_oracle_count->add_option("--cap", oc_cap);
  std::string om_cnf, om_nnf;
  int om_cap = 20;
  auto* cmd_oracle_models = cmd_oracle->add_subcommand("models", "list satisfying assignments");
  cmd_oracle_models->add_option("--cnf", om_cnf);
  cmd_oracle_models->add_option("--nnf", om_nnf);
  cmd_oracle_models->add_option("--cap", om_cap);
  std::string oj_net, oj_evidence;
  auto* cmd_oracle_joint = cmd_oracle->add_subcommand("joint", "joint factor of a network");
  cmd_oracle_joint->add_option("--net", oj_net)->required();
  cmd_oracle_joint->add_option("--evidence", oj_evidence);
  std::string oe_nnf, oe_x, oe_weights;
  int oe_cap = 20;
  auto* cmd_oracle_em = cmd_oracle->add_subcommand("emajsat", "double-loop maximum");
  cmd_oracle_em->add_option("--nnf", oe_nnf)->required();
  cmd_oracle_em->add_option("--x", oe_x)->required();
  cmd_oracle_em->add_option("--weights", oe_weights);
  cmd_oracle_em->add_option("--cap", oe_cap);
  std::string oa_kind, oa_ac, oa_evidence;
  auto* cmd_oracle_ac = cmd_oracle->add_subcommand("ac", "row enumeration of a circuit factor");
  cmd_oracle_ac->add_option("--kind", oa_kind)->required()->check(CLI::IsMember({"marginal", "mpe"}));
  cmd_oracle_ac->add_option("--ac", oa_ac)->required();
  cmd_oracle_ac->add_option("--evidence", oa_evidence);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*cmd_compile) return run_compile(cargs);
    if (*cmd_check) return run_check(chk_nnf, chk_props, chk_vtree, chk_x, chk_cap);
    if (*cmd_smooth) {
      NnfCircuit c = read_nnf(sm_nnf);
      NnfCircuit s = smooth(c);
      auto out = open_output(sm_out);
      serialize_nnf(s, out);
      std::cout << "nodes " << s.node_count() << " edges " << s.edge_count() << "\n";
      return 0;
    }
    if (*cmd_count) return run_count(cnt_nnf, "", cnt_evidence, false, cnt_assume, cnt_rational);
    if (*cmd_wmc) return run_count(wmc_nnf, wmc_weights, wmc_evidence, true, wmc_assume, wmc_rational);
    if (*cmd_em) return run_emajsat(em_nnf, em_x, em_weights);
    if (*cmd_sdd_compile) {
      CnfFormula f = read_cnf(sc_cnf);
      SddManager m(read_vtree(sc_vtree));
      SddId root = m.compile_cnf(f);
      auto out = open_output(sc_out);
      serialize_sdd(m, root, out);
      std::cout << "manager nodes " << m.node_count() << "\n";
      return 0;
    }
    if (*cmd_sdd_apply) {
      SddManager m(read_vtree(sa_vtree));
      auto lin = open_input(sa_left);
      SddId left = parse_sdd(lin, m).root;
      auto rin = open_input(sa_right);
      SddId right = parse_sdd(rin, m).root;
      SddId result = m.apply(left, right, sa_op == "and" ? BoolOp::conjoin : BoolOp::disjoin);
      auto out = open_output(sa_out);
      serialize_sdd(m, result, out);
      std::cout << "manager nodes " << m.node_count() << "\n";
      return 0;
    }
    if (*cmd_sdd_nnf) {
      SddManager m(read_vtree(sn_vtree));
      auto in = open_input(sn_sdd);
      SddId root = parse_sdd(in, m).root;
      NnfCircuit c = sdd_to_nnf(m, root);
      auto out = open_output(sn_out);
      serialize_nnf(c, out);
      std::cout << "nodes " << c.node_count() << " edges " << c.edge_count() << "\n";
      return 0;
    }
    if (*cmd_sdd_obdd) {
      SddManager m(read_vtree(so_vtree));
      auto in = open_input(so_sdd);
      SddId root = parse_sdd(in, m).root;
      ObddView v = obdd_export(m, root);
      auto out = open_output(so_out);
      serialize_obdd(v, out);
      std::cout << "nodes " << v.node_count() << "\n";
      return 0;
    }
    for (int i = 0; i < 5; ++i) {
      if (*cmd_ac->get_subcommand(ac_kinds[i]))
        return run_ac_query(ac_kinds[i], acq[i].ac, acq[i].evidence, acq[i].soft, acq[i].force);
    }
    if (*cmd_psdd_learn) {
      SddManager m(read_vtree(pl_vtree));
      auto in = open_input(pl_sdd);
      SddId root = parse_sdd(in, m).root;
      auto din = open_input(pl_data);
      Dataset d = parse_dataset(din);
      LearnOptions opts;
      opts.alpha = parse_decimal(pl_alpha);
      LearnResult r = learn_ml_complete(m, root, d, opts);
      auto out = open_output(pl_out);
      serialize_psdd(r.psdd, out);
      std::cerr << "rejected rows " << r.rejected_rows << "\n";
      std::cout << format_number(log_likelihood(r.psdd, d)) << "\n";
      return 0;
    }
    if (*cmd_psdd_eval) {
      SddManager m(read_vtree(pe_vtree));
      auto in = open_input(pe_psdd);
      Psdd p = parse_psdd(in, m);
      Instantiation row = row_instantiation(pe_row, m.vtree().var_count());
      Assignment a(m.vtree().var_count());
      for (int v = 1; v <= m.vtree().var_count(); ++v) a.bind(v, row.value(v - 1) == 1);
      std::cout << format_number(psdd_evaluate<double>(p, a)) << "\n";
      return 0;
    }
    if (*cmd_bn_compile) {
      BayesNet bn = read_bn(bc_net);
      ArithmeticCircuit ac = compile_to_ac(bn, bc_symbolic);
      auto out = open_output(bc_out);
      serialize_ac(ac, out);
      std::cout << "nodes " << ac.node_count() << " edges " << ac.edge_count() << "\n";
      return 0;
    }
    if (*cmd_bn_query) {
      ArithmeticCircuit ac = read_ac(bq_ac);
      Instantiation e(ac.vars.size());
      if (!bq_evidence.empty()) e = parse_instantiation(bq_evidence, ac.vars);
      if (bq_kind == "evidence_prob") {
        std::cout << format_number(ac_marginal<double>(ac, e)) << "\n";
      } else if (bq_kind == "marginals") {
        BnMarginals<double> m = bn_marginals<double>(ac, e);
        for (std::size_t v = 0; v < ac.vars.size(); ++v)
          for (int val = 0; val < ac.vars[v].domain_size(); ++val)
            std::cout << "marginal " << ac.vars[v].name << "=" << ac.vars[v].labels[val] << " "
                      << format_number(m.per_var[v][val]) << "\n";
        std::cout << format_number(m.evidence_probability) << "\n";
      } else if (bq_kind == "mpe") {
        auto r = mpe<double>(maximizer_of(ac), e);
        std::cout << "mpe " << instantiation_string(r.instantiation, ac.vars) << "\n";
        std::cout << format_number(r.value) << "\n";
      } else {  // soft
        if (bq_soft.empty()) fail_usage("soft query needs --soft");
        auto in = open_input(bq_soft);
        Likelihoods lik = parse_likelihoods(in, ac.vars);
        std::cout << format_number(soft_evidence(ac, lik, e)) << "\n";
      }
      return 0;
    }
    if (*cmd_oracle_count) return run_oracle_count(oc_cnf, oc_nnf, oc_weights, oc_evidence, oc_cap);
    if (*cmd_oracle_models) return run_oracle_models(om_cnf, om_nnf, om_cap);
    if (*cmd_oracle_joint) return run_oracle_joint(oj_net, oj_evidence);
    if (*cmd_oracle_em) return run_oracle_emajsat(oe_nnf, oe_x, oe_weights, oe_cap);
    if (*cmd_oracle_ac) return run_oracle_ac(oa_kind, oa_ac, oa_evidence);
    fail_usage("no subcommand");
  } catch (const tc::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
