/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#include "gearbox/csv.hh"

namespace gearbox {

std::string csv_field(std::string_view s)
{
	if (s.find_first_of(",\"\r\n") == std::string_view::npos)
		return std::string(s);
	std::string r = "\"";
	for (char c : s) {
		if (c == '"')
			r += '"';
		r += c;
	}
	return r + "\"";
}

std::string csv_row(const std::vector<std::string> &fields)
{
	std::string r;
	for (size_t i = 0; i < fields.size(); i++)
		r += (i ? "," : "") + csv_field(fields[i]);
	return r + "\r\n";
}

std::optional<std::vector<std::string>> csv_parse_row(std::string_view line)
{
	while (!line.empty() && (line.back() == '\n' || line.back() == '\r'))
		line.remove_suffix(1);
	std::vector<std::string> out(1);
	bool quoted = false;
	for (size_t i = 0; i < line.size(); i++) {
		char c = line[i];
		if (quoted) {
			if (c != '"')
				out.back() += c;
			else if (i + 1 < line.size() && line[i + 1] == '"')
				out.back() += '"', i++;
			else
				quoted = false;
		} else if (c == '"') {
			quoted = true;
		} else if (c == ',') {
			out.emplace_back();
		} else {
			out.back() += c;
		}
	}
	if (quoted)
		return std::nullopt;
	return out;
}

std::string csv_number(const Rational &q)
{
	return to_decimal(q, 17);
}

}
