#include "chainforge/rational.hpp"

#include <cctype>
#include <cstdlib>

#include "chainforge/errors.hpp"

namespace chainforge {

namespace {

bool allDigits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

[[noreturn]] void badNumber(std::string_view text) {
  throw ValidationError("invalid rational literal '" + std::string(text) +
                        "'");
}

}  // namespace

Rational parseRational(std::string_view text) {
  std::string_view s = text;
  if (s.empty()) badNumber(text);

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) badNumber(text);

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = s.substr(0, slash);
    std::string_view den = s.substr(slash + 1);
    if (!allDigits(num) || !allDigits(den)) badNumber(text);
    mpz_class d{std::string(den)};
    if (d == 0) badNumber(text);
    Rational q(mpz_class{std::string(num)}, d);
    q.canonicalize();
    return negative ? Rational(-q) : q;
  }

  std::string_view mantissa = s;
  long exponent = 0;
  if (auto epos = s.find_first_of("eE"); epos != std::string_view::npos) {
    mantissa = s.substr(0, epos);
    std::string_view expPart = s.substr(epos + 1);
    bool expNeg = false;
    if (!expPart.empty() && (expPart.front() == '+' || expPart.front() == '-')) {
      expNeg = expPart.front() == '-';
      expPart.remove_prefix(1);
    }
    if (!allDigits(expPart) || expPart.size() > 6) badNumber(text);
    exponent = std::strtol(std::string(expPart).c_str(), nullptr, 10);
    if (expNeg) exponent = -exponent;
  }

  std::string digits;
  long scale = 0;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    std::string_view ip = mantissa.substr(0, dot);
    std::string_view fp = mantissa.substr(dot + 1);
    if (ip.empty() && fp.empty()) badNumber(text);
    if (!ip.empty() && !allDigits(ip)) badNumber(text);
    if (!fp.empty() && !allDigits(fp)) badNumber(text);
    digits = std::string(ip) + std::string(fp);
    scale = static_cast<long>(fp.size());
  } else {
    if (!allDigits(mantissa)) badNumber(text);
    digits = std::string(mantissa);
  }
  if (digits.empty()) badNumber(text);

  Rational q{mpz_class(digits)};
  long tenPower = exponent - scale;
  if (tenPower != 0) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10,
                  static_cast<unsigned long>(tenPower > 0 ? tenPower
                                                          : -tenPower));
    if (tenPower > 0) {
      q *= Rational(p);
    } else {
      q /= Rational(p);
    }
  }
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

std::string formatRational(const Rational& q) {
  mpz_class num = q.get_num();
  mpz_class den = q.get_den();

  // Strip factors of 2 and 5; a decimal expansion is finite iff nothing
  // else remains.
  mpz_class rest = den;
  long twos = 0;
  long fives = 0;
  while (rest % 2 == 0) {
    rest /= 2;
    ++twos;
  }
  while (rest % 5 == 0) {
    rest /= 5;
    ++fives;
  }
  if (rest != 1) {
    return num.get_str() + "/" + den.get_str();
  }

  long shift = twos > fives ? twos : fives;
  if (shift == 0) return num.get_str();

  // Scale numerator so the denominator becomes 10^shift.
  mpz_class p2, p5;
  mpz_ui_pow_ui(p2.get_mpz_t(), 2, static_cast<unsigned long>(shift - twos));
  mpz_ui_pow_ui(p5.get_mpz_t(), 5, static_cast<unsigned long>(shift - fives));
  mpz_class scaled = num * p2 * p5;

  bool neg = scaled < 0;
  if (neg) scaled = -scaled;
  std::string s = scaled.get_str();
  if (static_cast<long>(s.size()) <= shift) {
    s.insert(0, static_cast<size_t>(shift) - s.size() + 1, '0');
  }
  s.insert(s.size() - static_cast<size_t>(shift), ".");
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return neg ? "-" + s : s;
}

double toDouble(const Rational& q) { return q.get_d(); }

long rationalFloor(const Rational& q) {
  mpz_class z;
  mpz_fdiv_q(z.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return z.get_si();
}

}  // namespace chainforge
