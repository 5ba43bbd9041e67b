#include "tc/factor.hpp"

#include <algorithm>
#include <cctype>

#include "tc/error.hpp"

namespace tc {

DiscreteVar DiscreteVar::with_default_labels(std::string name, int k) {
  DiscreteVar v;
  std::string base = name;
  std::transform(base.begin(), base.end(), base.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  v.name = std::move(name);
  for (int i = 1; i <= k; ++i) v.labels.push_back(base + std::to_string(i));
  return v;
}

Instantiation parse_instantiation(const std::string& text, const std::vector<DiscreteVar>& vars) {
  Instantiation inst(vars.size());
  auto trim = [](std::string s) {
    std::size_t a = s.find_first_not_of(" \t");
    std::size_t b = s.find_last_not_of(" \t");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    pos = comma == std::string::npos ? text.size() : comma + 1;
    item = trim(item);
    if (item.empty()) continue;
    std::size_t eq = item.find('=');
    if (eq == std::string::npos) fail_format("instantiation item '" + item + "' is not name=value");
    std::string name = trim(item.substr(0, eq));
    std::string value = trim(item.substr(eq + 1));
    std::size_t var = vars.size();
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (vars[i].name == name) var = i;
    if (var == vars.size()) fail_format("unknown variable '" + name + "'");
    int val = -1;
    for (std::size_t i = 0; i < vars[var].labels.size(); ++i)
      if (vars[var].labels[i] == value) val = static_cast<int>(i);
    if (val < 0) {
      bool numeric = !value.empty() && std::all_of(value.begin(), value.end(), [](unsigned char c) {
        return std::isdigit(c);
      });
      if (numeric) {
        int idx = std::stoi(value);
        if (idx >= 1 && idx <= vars[var].domain_size()) val = idx - 1;
      }
    }
    if (val < 0)
      fail_format("value '" + value + "' not in the domain of '" + name + "'");
    if (inst.bound(var) && inst.value(var) != val)
      fail_format("conflicting values for '" + name + "'");
    inst.bind(var, val);
  }
  return inst;
}

std::string instantiation_string(const Instantiation& inst, const std::vector<DiscreteVar>& vars) {
  std::string out;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (!inst.bound(i)) continue;
    if (!out.empty()) out += ",";
    out += vars[i].name + "=" + vars[i].labels[inst.value(i)];
  }
  return out;
}

FactorD to_double(const Factor& f) {
  FactorD out;
  out.vars = f.vars;
  out.values.reserve(f.values.size());
  for (const Rat& q : f.values) out.values.push_back(q.get_d());
  return out;
}

Factor multiply_factors(const Factor& a, const Factor& b) {
  Factor out;
  out.vars = a.vars;
  std::vector<int> b_pos;  // position of each b var in out.vars
  for (const auto& v : b.vars) {
    std::size_t at = out.vars.size();
    for (std::size_t i = 0; i < out.vars.size(); ++i)
      if (out.vars[i].name == v.name) at = i;
    if (at == out.vars.size()) {
      out.vars.push_back(v);
      b_pos.push_back(static_cast<int>(out.vars.size() - 1));
    } else {
      if (out.vars[at].labels != v.labels)
        fail_precondition("factor product: variable '" + v.name + "' has mismatched domains");
      b_pos.push_back(static_cast<int>(at));
    }
  }
  out.values.assign(out.row_count(), Rat(0));
  std::vector<int> row, arow(a.vars.size()), brow(b.vars.size());
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.decode(i, row);
    for (std::size_t k = 0; k < a.vars.size(); ++k) arow[k] = row[k];
    for (std::size_t k = 0; k < b.vars.size(); ++k) brow[k] = row[b_pos[k]];
    out.values[i] = a.at(arow) * b.at(brow);
  }
  return out;
}

}  // namespace tc
