/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#pragma once

#include "expr.hh"

#include <map>
#include <string>
#include <vector>

namespace gearbox {

struct Interval {
	Rational lo, hi;

	bool contains(const Rational &q) const { return lo <= q && q <= hi; }
	Rational width() const { return hi - lo; }
};

Interval hull(const Interval &a, const Interval &b);

/* Domain of a single variable: a closed interval for real and int sorts or
 * a finite sorted list of values (grids, categorical indices). */
struct VarDomain {
	Sort sort = Sort::real;
	bool finite = false;
	Rational lo, hi;
	std::vector<Rational> values;

	static VarDomain real(Rational lo, Rational hi);
	static VarDomain integer(Rational lo, Rational hi);
	static VarDomain list(Sort sort, std::vector<Rational> values);

	bool contains(const Rational &q) const;
	Interval hull() const { return { lo, hi }; }
	/* number of points for finite and int domains; 0 for real */
	size_t count() const;
};

using Box = std::map<std::string, VarDomain>;
using IntervalEnv = std::map<std::string, Interval>;

enum class Tri { no, maybe, yes };

IntervalEnv hull(const Box &b);

/* Natural interval extension. Ite conditions are decided three-valued; when
 * undecided the hull of both branches is returned. Throws
 * Error(unbound_variable) for variables missing from env. */
Interval interval_eval(const Expr &e, const IntervalEnv &env);
Tri interval_eval(const Formula &f, const IntervalEnv &env);

/* Three-valued decision of (d op 0) for an enclosure d of lhs - rhs. */
Tri interval_compare(CmpOp op, const Interval &d);

/* Sound (not necessarily tight) enclosure of e over b. */
Interval interval_bounds(const Expr &e, const Box &b);

}
