/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#pragma once

#include "interval.hh"
#include "parser.hh"
#include "theta.hh"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gearbox {

enum class Interface { input, knob, output };

const char *interface_name(Interface i);

struct VarDecl {
	std::string label;
	Interface iface = Interface::input;
	Sort type = Sort::real;
	/* real and int variables; mandatory for knobs and inputs */
	std::optional<Interval> range;
	/* set variables */
	std::vector<std::string> categories;
	std::optional<std::vector<Rational>> grid;
	std::optional<Rational> rad_abs;
	std::optional<Rational> rad_rel;
};

template <typename T> using Named = std::vector<std::pair<std::string, T>>;

/* A validated problem declaration. Immutable after parse_spec(). */
struct ProblemSpec {
	std::string version;
	std::vector<VarDecl> variables;
	Formula eta, alpha, beta;
	Named<Formula> assertions;
	Named<Expr> objectives;
	std::vector<std::string> warnings;

	const VarDecl *find(std::string_view label) const;
	const VarDecl &at(std::string_view label) const;
	Expr variable(std::string_view label) const;
	VarEnv env() const;

	/* knobs and inputs, plus outputs that declare a range */
	Box domain() const;
	std::map<std::string, std::vector<Rational>> grids() const;
	ThetaSpec theta() const;

	const Formula *assertion(std::string_view label) const;
	const Expr *objective(std::string_view label) const;
};

/* Errors: malformed_json, unknown_interface, unknown_type,
 * radius_on_non_knob, grid_out_of_range, undeclared_variable, invalid_spec
 * and those of parse_formula(). */
ProblemSpec parse_spec(std::string_view json_text);

std::string serialize(const ProblemSpec &spec);

bool equal(const ProblemSpec &a, const ProblemSpec &b);

struct Partition {
	std::vector<std::string> knobs, inputs, outputs;
};

Partition interface_partition(const ProblemSpec &spec);

}
