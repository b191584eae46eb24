/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#include "gearbox/interval.hh"
#include "gearbox/error.hh"

#include <algorithm>
#include <cassert>

namespace gearbox {

template <typename... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <typename... Ts> overloaded(Ts...) -> overloaded<Ts...>;

Interval hull(const Interval &a, const Interval &b)
{
	return { std::min(a.lo, b.lo), std::max(a.hi, b.hi) };
}

VarDomain VarDomain::real(Rational lo, Rational hi)
{
	assert(lo <= hi);
	VarDomain d;
	d.sort = Sort::real;
	d.lo = std::move(lo);
	d.hi = std::move(hi);
	return d;
}

VarDomain VarDomain::integer(Rational lo, Rational hi)
{
	VarDomain d;
	d.sort = Sort::integer;
	d.lo = ceil(lo);
	d.hi = floor(hi);
	assert(d.lo <= d.hi);
	return d;
}

VarDomain VarDomain::list(Sort sort, std::vector<Rational> values)
{
	assert(!values.empty());
	std::sort(values.begin(), values.end());
	values.erase(std::unique(values.begin(), values.end()), values.end());
	VarDomain d;
	d.sort = sort;
	d.finite = true;
	d.lo = values.front();
	d.hi = values.back();
	d.values = std::move(values);
	return d;
}

bool VarDomain::contains(const Rational &q) const
{
	if (finite)
		return std::binary_search(values.begin(), values.end(), q);
	if (sort != Sort::real && !is_integer(q))
		return false;
	return lo <= q && q <= hi;
}

size_t VarDomain::count() const
{
	if (finite)
		return values.size();
	if (sort == Sort::real)
		return 0;
	return Rational(hi - lo + 1).get_num().get_ui();
}

IntervalEnv hull(const Box &b)
{
	IntervalEnv env;
	for (const auto &[name, d] : b)
		env.emplace(name, d.hull());
	return env;
}

namespace {

Interval imul(const Interval &a, const Interval &b)
{
	Rational p[4] = { a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi };
	return { *std::min_element(p, p + 4), *std::max_element(p, p + 4) };
}

Interval ipow(const Interval &a, unsigned n)
{
	if (n == 0)
		return { 1, 1 };
	Rational l = pow(a.lo, n), h = pow(a.hi, n);
	if (n % 2)
		return { l, h };
	if (a.lo >= 0)
		return { l, h };
	if (a.hi <= 0)
		return { h, l };
	return { 0, std::max(l, h) };
}

}

Tri interval_compare(CmpOp op, const Interval &d)
{
	/* d encloses lhs - rhs */
	switch (op) {
	case CmpOp::le:
		return d.hi <= 0 ? Tri::yes : d.lo > 0 ? Tri::no : Tri::maybe;
	case CmpOp::lt:
		return d.hi < 0 ? Tri::yes : d.lo >= 0 ? Tri::no : Tri::maybe;
	case CmpOp::ge:
		return d.lo >= 0 ? Tri::yes : d.hi < 0 ? Tri::no : Tri::maybe;
	case CmpOp::gt:
		return d.lo > 0 ? Tri::yes : d.hi <= 0 ? Tri::no : Tri::maybe;
	case CmpOp::eq:
		if (d.lo == 0 && d.hi == 0)
			return Tri::yes;
		return d.lo > 0 || d.hi < 0 ? Tri::no : Tri::maybe;
	case CmpOp::ne:
		if (d.lo == 0 && d.hi == 0)
			return Tri::no;
		return d.lo > 0 || d.hi < 0 ? Tri::yes : Tri::maybe;
	}
	return Tri::maybe;
}

namespace {

Tri tri_not(Tri t)
{
	return t == Tri::yes ? Tri::no : t == Tri::no ? Tri::yes : Tri::maybe;
}

}

Interval interval_eval(const Expr &e, const IntervalEnv &env)
{
	return std::visit(overloaded {
	[](const ex::Const &c) { return Interval { c.value, c.value }; },
	[&](const ex::Var &v) {
		auto it = env.find(v.name);
		if (it == env.end())
			throw Error(Errc::unbound_variable,
			            "no interval for variable '" + v.name + "'");
		return it->second;
	},
	[&](const ex::Add &n) {
		Interval a = interval_eval(n.lhs, env), b = interval_eval(n.rhs, env);
		return Interval { a.lo + b.lo, a.hi + b.hi };
	},
	[&](const ex::Mul &n) {
		return imul(interval_eval(n.lhs, env), interval_eval(n.rhs, env));
	},
	[&](const ex::Neg &n) {
		Interval a = interval_eval(n.arg, env);
		return Interval { -a.hi, -a.lo };
	},
	[&](const ex::Pow &n) { return ipow(interval_eval(n.base, env), n.exponent); },
	[&](const ex::LinDiv &n) {
		Interval a = interval_eval(n.arg, env);
		Rational l = a.lo / n.divisor, h = a.hi / n.divisor;
		return n.divisor > 0 ? Interval { l, h } : Interval { h, l };
	},
	[&](const ex::Ite &n) {
		switch (interval_eval(n.cond, env)) {
		case Tri::yes: return interval_eval(n.then_expr, env);
		case Tri::no: return interval_eval(n.else_expr, env);
		case Tri::maybe: break;
		}
		return hull(interval_eval(n.then_expr, env), interval_eval(n.else_expr, env));
	},
	[&](const ex::Max2 &n) {
		Interval a = interval_eval(n.lhs, env), b = interval_eval(n.rhs, env);
		return Interval { std::max(a.lo, b.lo), std::max(a.hi, b.hi) };
	},
	[&](const ex::Min2 &n) {
		Interval a = interval_eval(n.lhs, env), b = interval_eval(n.rhs, env);
		return Interval { std::min(a.lo, b.lo), std::min(a.hi, b.hi) };
	},
	}, e->node);
}

Tri interval_eval(const Formula &f, const IntervalEnv &env)
{
	return std::visit(overloaded {
	[](const fm::Bool &b) { return b.value ? Tri::yes : Tri::no; },
	[&](const fm::Cmp &c) {
		Interval a = interval_eval(c.lhs, env), b = interval_eval(c.rhs, env);
		return interval_compare(c.op, Interval { a.lo - b.hi, a.hi - b.lo });
	},
	[&](const fm::And &n) {
		Tri r = Tri::yes;
		for (const Formula &g : n.args) {
			Tri t = interval_eval(g, env);
			if (t == Tri::no)
				return Tri::no;
			if (t == Tri::maybe)
				r = Tri::maybe;
		}
		return r;
	},
	[&](const fm::Or &n) {
		Tri r = Tri::no;
		for (const Formula &g : n.args) {
			Tri t = interval_eval(g, env);
			if (t == Tri::yes)
				return Tri::yes;
			if (t == Tri::maybe)
				r = Tri::maybe;
		}
		return r;
	},
	[&](const fm::Not &n) { return tri_not(interval_eval(n.arg, env)); },
	[&](const fm::Implies &n) {
		Tri l = interval_eval(n.lhs, env);
		if (l == Tri::no)
			return Tri::yes;
		Tri r = interval_eval(n.rhs, env);
		if (r == Tri::yes)
			return Tri::yes;
		return l == Tri::yes ? r : Tri::maybe;
	},
	}, f->node);
}

Interval interval_bounds(const Expr &e, const Box &b)
{
	return interval_eval(e, hull(b));
}

}
