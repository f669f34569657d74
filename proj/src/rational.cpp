#include "maqa/rational.hpp"

#include <cctype>
#include <numeric>

#include "maqa/errors.hpp"

namespace maqa {

namespace {

long long checked(__int128 v, const std::string& context) {
  if (v > INT64_MAX || v < INT64_MIN)
    throw InputError("rational overflow while parsing '" + context + "'");
  return static_cast<long long>(v);
}

}  // namespace

Rational Rational::of(long long n, long long d) {
  if (d == 0) throw InputError("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  long long g = std::gcd(n < 0 ? -n : n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  return Rational{n, d};
}

Rational Rational::parse(const std::string& text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';

  __int128 mantissa = 0;
  int digits = 0, frac_digits = 0;
  bool seen_digit = false, seen_dot = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      if (++digits > 18) throw InputError("too many digits in '" + text + "'");
      mantissa = mantissa * 10 + (c - '0');
      if (seen_dot) ++frac_digits;
      seen_digit = true;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw InputError("malformed number '" + text + "'");

  long long exponent = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) exp_neg = text[i++] == '-';
    if (i >= text.size()) throw InputError("malformed exponent in '" + text + "'");
    int exp_digits = 0;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      if (++exp_digits > 3) throw InputError("exponent out of range in '" + text + "'");
      exponent = exponent * 10 + (text[i] - '0');
    }
    if (exp_digits == 0) throw InputError("malformed exponent in '" + text + "'");
    if (exp_neg) exponent = -exponent;
  }
  if (i != text.size()) throw InputError("malformed number '" + text + "'");

  long long shift = exponent - frac_digits;
  __int128 num = negative ? -mantissa : mantissa;
  __int128 den = 1;
  for (long long k = 0; k < (shift > 0 ? shift : -shift); ++k) {
    if (shift > 0)
      num *= 10;
    else
      den *= 10;
    if (den > INT64_MAX || num > INT64_MAX || num < INT64_MIN)
      throw InputError("rational overflow while parsing '" + text + "'");
  }
  return Rational::of(checked(num, text), checked(den, text));
}

bool Rational::operator<=(const Rational& o) const {
  return static_cast<__int128>(num) * o.den <= static_cast<__int128>(o.num) * den;
}

Rational rational_div(const Rational& a, const Rational& b) {
  if (b.num <= 0) throw InputError("division by a non-positive rational");
  __int128 n = static_cast<__int128>(a.num) * b.den;
  __int128 d = static_cast<__int128>(a.den) * b.num;
  long long g = 1;
  // Reduce in 128 bits before narrowing.
  __int128 x = n < 0 ? -n : n, y = d;
  while (y != 0) {
    __int128 t = x % y;
    x = y;
    y = t;
  }
  if (x > 1) {
    n /= x;
    d /= x;
  }
  (void)g;
  return Rational::of(checked(n, "ratio"), checked(d, "ratio"));
}

}  // namespace maqa
