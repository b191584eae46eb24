/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#pragma once

#include "rational.hh"

#include "json.hpp"

#include <string_view>

namespace gearbox {

using Json = nlohmann::ordered_json;

/* Parses JSON keeping object key order. Floating point literals are kept as
 * strings holding their original spelling so they can be read back exactly
 * with json_rational(). Throws Error(malformed_json). */
Json parse_json_exact(std::string_view text);

/* Accepts integers and strings holding a rational literal. Throws
 * Error(err) with a message naming what. */
Rational json_rational(const Json &j, const char *what);

/* Integral or short terminating decimals become JSON numbers (their shortest
 * round-trip spelling is the exact decimal), anything else a "p/q" string. */
Json rational_json(const Rational &q);

}
