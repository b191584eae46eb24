/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#pragma once

#include "rational.hh"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gearbox {

/* RFC 4180: fields holding a comma, quote or line break are quoted, quotes
 * doubled; lines end with CRLF. */
std::string csv_field(std::string_view s);
std::string csv_row(const std::vector<std::string> &fields);

/* Splits one record (without its line break); nothing on an unterminated
 * quote. */
std::optional<std::vector<std::string>> csv_parse_row(std::string_view line);

/* Decimal for terminating values, otherwise 17 significant digits. */
std::string csv_number(const Rational &q);

}
