/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace gearbox {

using Rational = mpq_class;

/* Parses "12", "-3.25", "1e-3", "2.5E+2" or "7/4" exactly. Returns nullopt
 * on anything else; binary floating point is never involved. */
std::optional<Rational> parse_rational(std::string_view s);

/* "p/q" or "p" in lowest terms. */
std::string to_string(const Rational &q);

/* Exact decimal expansion if the denominator is of the form 2^a 5^b and the
 * expansion has at most max_digits fractional digits, otherwise %.17g. */
std::string to_decimal(const Rational &q, unsigned max_digits = 40);

double to_double(const Rational &q);

bool is_integer(const Rational &q);

Rational floor(const Rational &q);
Rational ceil(const Rational &q);
Rational abs(const Rational &q);

/* q^n for natural n */
Rational pow(const Rational &q, unsigned n);

}
