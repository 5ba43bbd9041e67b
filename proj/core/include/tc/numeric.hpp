#pragma once

#include <gmpxx.h>

#include <string>

namespace tc {

// Model counts overflow machine words quickly; weighted values default to
// doubles with an exact-rational mode on the side.
using BigInt = mpz_class;
using Rat = mpq_class;

// Parses a plain decimal literal ("0.576", ".1", "-2", "3e-2" is *not*
// accepted) into an exact rational.
Rat parse_decimal(const std::string& text);

// Decimal rendering without exponent, exact when the denominator is 2^a 5^b,
// otherwise rounded to `max_digits` fractional digits.
std::string decimal_string(const Rat& q, int max_digits = 18);

inline double to_double(const Rat& q) { return q.get_d(); }

// mpq_class(num, den) does not reduce; arithmetic and comparisons require
// canonical operands, so fractions are built through this helper.
inline Rat make_rat(long num, long den = 1) {
  Rat q(num, den);
  q.canonicalize();
  return q;
}

// Stable printing for query results: integers render without a decimal
// point, everything else with up to 12 significant digits.
std::string format_number(double v);

}  // namespace tc
