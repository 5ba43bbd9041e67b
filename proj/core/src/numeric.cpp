#include "tc/numeric.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

#include "tc/error.hpp"

namespace tc {

Rat parse_decimal(const std::string& text) {
  std::string s = text;
  if (std::size_t slash = s.find('/'); slash != std::string::npos) {
    // Fraction form "num/den", used where a decimal expansion would not
    // terminate.
    Rat num = parse_decimal(s.substr(0, slash));
    Rat den = parse_decimal(s.substr(slash + 1));
    if (den == 0) fail_format("zero denominator in '" + text + "'");
    Rat q = num / den;
    q.canonicalize();
    return q;
  }
  bool negative = false;
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
    negative = s[i] == '-';
    ++i;
  }
  std::string int_part, frac_part;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) int_part.push_back(s[i++]);
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) frac_part.push_back(s[i++]);
  }
  if (i != s.size() || (int_part.empty() && frac_part.empty()))
    fail_format("not a decimal number: '" + text + "'");
  BigInt num(int_part.empty() ? "0" : int_part);
  for (char c : frac_part) {
    num *= 10;
    num += c - '0';
  }
  BigInt den = 1;
  for (std::size_t k = 0; k < frac_part.size(); ++k) den *= 10;
  Rat q(num, den);
  q.canonicalize();
  if (negative) q = -q;
  return q;
}

std::string decimal_string(const Rat& q, int max_digits) {
  if (q == 0) return "0";
  // Non-terminating expansions round-trip as "num/den" instead.
  BigInt den = q.get_den();
  while (den % 2 == 0) den /= 2;
  while (den % 5 == 0) den /= 5;
  if (den != 1) return q.get_num().get_str() + "/" + q.get_den().get_str();

  (void)max_digits;
  Rat a = q > 0 ? q : Rat(-q);
  BigInt ipart = a.get_num() / a.get_den();
  Rat frac = a - Rat(ipart);
  std::string out = (q < 0 ? "-" : "") + ipart.get_str();
  if (frac != 0) {
    out.push_back('.');
    while (frac != 0) {  // terminates: denominator is 2^a 5^b
      frac *= 10;
      BigInt digit = frac.get_num() / frac.get_den();
      out += digit.get_str();
      frac -= Rat(digit);
    }
  }
  return out;
}

std::string format_number(double v) {
  char buf[64];
  if (v == static_cast<double>(static_cast<long long>(v)) && std::abs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
  } else {
    std::snprintf(buf, sizeof buf, "%.12g", v);
  }
  return buf;
}

}  // namespace tc
