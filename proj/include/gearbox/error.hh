/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gearbox {

enum class Errc {
	malformed_json,
	unknown_interface,
	unknown_type,
	radius_on_non_knob,
	grid_out_of_range,
	undeclared_variable,
	invalid_spec,
	syntax_error,
	non_constant_exponent,
	division_by_non_constant,
	sort_mismatch,
	unbound_variable,
	dimension_mismatch,
	unknown_kind,
	feature_mismatch,
	backend_launch_failure,
	protocol_error,
	ungridded_factorial_dimension,
	alpha_rejection_exhausted,
	oracle_failure,
	usage,
};

const char *errc_name(Errc c);

class Error : public std::runtime_error {
	Errc code_;
	std::size_t pos_;

public:
	Error(Errc code, const std::string &msg, std::size_t pos = 0)
	: std::runtime_error(msg)
	, code_(code)
	, pos_(pos)
	{}

	Errc code() const noexcept { return code_; }

	/* offset into the parsed text (syntax errors) or line number
	 * (protocol errors); 0 otherwise */
	std::size_t position() const noexcept { return pos_; }
};

}
