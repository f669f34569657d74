#pragma once

#include <cstdint>
#include <string>

// Exact rationals for interval endpoints: decimal literals stay rational, so
// the digitisation grid can be made to hit both bounds exactly.

namespace maqa {

struct Rational {
  long long num = 0;
  long long den = 1;  // > 0, reduced

  static Rational of(long long n, long long d);
  // Decimal with optional exponent ("1.25e-2"); throws InputError otherwise.
  static Rational parse(const std::string& text);

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool is_zero() const { return num == 0; }
  bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
  bool operator<=(const Rational& o) const;
};

// a/b as a reduced fraction; requires b > 0.
Rational rational_div(const Rational& a, const Rational& b);

}  // namespace maqa
