#include "tc/cnf.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "tc/error.hpp"

namespace tc {
namespace {

bool is_integer_token(const std::string& t) {
  if (t.empty()) return false;
  std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
  if (i == t.size()) return false;
  for (; i < t.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
  return true;
}

int parse_int_token(const std::string& t, const char* context) {
  if (!is_integer_token(t)) fail_format(std::string("non-integer token '") + t + "' in " + context);
  return std::stoi(t);
}

}  // namespace

CnfFormula parse_cnf(std::istream& in) {
  CnfFormula f;
  bool saw_header = false;
  int declared_clauses = 0;
  Clause current;
  bool clause_open = false;

  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "c") {
      std::string kw;
      if (ls >> kw && kw == "var") {
        int idx;
        std::string name;
        if (ls >> idx >> name) {
          if (static_cast<int>(f.names.size()) <= idx) f.names.resize(idx + 1);
          f.names[idx] = name;
        }
      }
      continue;
    }
    if (tok == "p") {
      if (saw_header) fail_format("duplicate DIMACS header");
      std::string fmt;
      if (!(ls >> fmt) || fmt != "cnf") fail_format("expected 'p cnf V C' header");
      std::string v, c;
      if (!(ls >> v >> c)) fail_format("truncated DIMACS header");
      f.var_count = parse_int_token(v, "header");
      declared_clauses = parse_int_token(c, "header");
      if (f.var_count < 0 || declared_clauses < 0) fail_format("negative counts in header");
      saw_header = true;
      continue;
    }
    if (!saw_header) fail_format("missing DIMACS header before clauses");
    // literal tokens, 0-terminated
    do {
      int code = parse_int_token(tok, "clause");
      if (code == 0) {
        f.clauses.push_back(current);
        current.clear();
        clause_open = false;
      } else {
        Literal l = Literal::from_dimacs(code);
        if (l.var > f.var_count)
          fail_format("literal " + std::to_string(code) + " out of range (V=" +
                      std::to_string(f.var_count) + ")");
        current.push_back(l);
        clause_open = true;
      }
    } while (ls >> tok);
  }
  if (!saw_header) fail_format("missing DIMACS header");
  if (clause_open) fail_format("unterminated clause (missing trailing 0)");
  if (static_cast<int>(f.clauses.size()) != declared_clauses)
    fail_format("clause count mismatch: header says " + std::to_string(declared_clauses) +
                ", found " + std::to_string(f.clauses.size()));
  if (static_cast<int>(f.names.size()) <= f.var_count && !f.names.empty())
    f.names.resize(f.var_count + 1);
  return f;
}

CnfFormula parse_cnf_string(const std::string& text) {
  std::istringstream in(text);
  return parse_cnf(in);
}

void serialize_cnf(const CnfFormula& f, std::ostream& out) {
  for (std::size_t v = 1; v < f.names.size(); ++v)
    if (!f.names[v].empty()) out << "c var " << v << ' ' << f.names[v] << '\n';
  out << "p cnf " << f.var_count << ' ' << f.clauses.size() << '\n';
  for (const auto& clause : f.clauses) {
    for (const auto& l : clause) out << l.dimacs() << ' ';
    out << "0\n";
  }
}

}  // namespace tc
