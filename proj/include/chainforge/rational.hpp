#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace chainforge {

// All quantities in the toolkit (rates, capacities, latencies) are exact
// rationals. Doubles appear only in user-facing display and time budgets.
using Rational = mpq_class;

// Parses "42", "-3.25", "1e3", "2.5e-2" or "7/4" into an exact rational.
// Plain decimal/scientific notation is converted without rounding.
// Throws ValidationError on anything else (including NaN/inf spellings).
Rational parseRational(std::string_view text);

// Inverse of parseRational. Emits an exact decimal string when the
// denominator has only factors 2 and 5, otherwise "p/q" in lowest terms.
std::string formatRational(const Rational& q);

// Lossy conversion for display and plotting only.
double toDouble(const Rational& q);

// Largest integer not above q. Callers must keep q within long range.
long rationalFloor(const Rational& q);

}  // namespace chainforge
