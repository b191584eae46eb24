/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#include "gearbox/expr.hh"
#include "gearbox/error.hh"

#include <cassert>
#include <unordered_map>

namespace gearbox {

template <typename... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <typename... Ts> overloaded(Ts...) -> overloaded<Ts...>;

const char *sort_name(Sort s)
{
	switch (s) {
	case Sort::real: return "real";
	case Sort::integer: return "int";
	case Sort::set: return "set";
	}
	return "?";
}

const char *cmp_name(CmpOp op)
{
	switch (op) {
	case CmpOp::lt: return "<";
	case CmpOp::le: return "<=";
	case CmpOp::eq: return "==";
	case CmpOp::ne: return "!=";
	case CmpOp::ge: return ">=";
	case CmpOp::gt: return ">";
	}
	return "?";
}

CmpOp negate(CmpOp op)
{
	switch (op) {
	case CmpOp::lt: return CmpOp::ge;
	case CmpOp::le: return CmpOp::gt;
	case CmpOp::eq: return CmpOp::ne;
	case CmpOp::ne: return CmpOp::eq;
	case CmpOp::ge: return CmpOp::lt;
	case CmpOp::gt: return CmpOp::le;
	}
	return op;
}

CmpOp flip(CmpOp op)
{
	switch (op) {
	case CmpOp::lt: return CmpOp::gt;
	case CmpOp::le: return CmpOp::ge;
	case CmpOp::ge: return CmpOp::le;
	case CmpOp::gt: return CmpOp::lt;
	default: return op;
	}
}

/* ---- construction ---- */

namespace {

template <typename T> Expr mk(T &&n)
{
	return std::make_shared<const ExprNode>(ExprNode { std::forward<T>(n) });
}

template <typename T> Formula mkf(T &&n)
{
	return std::make_shared<const FormulaNode>(FormulaNode { std::forward<T>(n) });
}

const Rational *const_value(const Expr &e)
{
	const auto *c = e->get<ex::Const>();
	return c ? &c->value : nullptr;
}

}

Expr cnst(Rational v) { v.canonicalize(); return mk(ex::Const { std::move(v) }); }
Expr var(std::string name, Sort sort, Categories cats)
{
	return mk(ex::Var { std::move(name), sort, std::move(cats) });
}
Expr add(Expr a, Expr b) { return mk(ex::Add { std::move(a), std::move(b) }); }
Expr sub(Expr a, Expr b) { return add(std::move(a), neg(std::move(b))); }
Expr mul(Expr a, Expr b) { return mk(ex::Mul { std::move(a), std::move(b) }); }
Expr neg(Expr a) { return mk(ex::Neg { std::move(a) }); }
Expr pow(Expr b, unsigned n) { return mk(ex::Pow { std::move(b), n }); }
Expr lindiv(Expr a, Rational d)
{
	assert(d != 0);
	return mk(ex::LinDiv { std::move(a), std::move(d) });
}
Expr ite(Formula c, Expr t, Expr e)
{
	return mk(ex::Ite { std::move(c), std::move(t), std::move(e) });
}
Expr max2(Expr a, Expr b) { return mk(ex::Max2 { std::move(a), std::move(b) }); }
Expr min2(Expr a, Expr b) { return mk(ex::Min2 { std::move(a), std::move(b) }); }
Expr abs(Expr a) { Expr n = neg(a); return max2(std::move(a), std::move(n)); }

Formula true_f()
{
	static const Formula t = mkf(fm::Bool { true });
	return t;
}

Formula false_f()
{
	static const Formula f = mkf(fm::Bool { false });
	return f;
}

Formula boolean(bool b) { return b ? true_f() : false_f(); }
Formula cmp(CmpOp op, Expr a, Expr b) { return mkf(fm::Cmp { op, std::move(a), std::move(b) }); }
Formula lt(Expr a, Expr b) { return cmp(CmpOp::lt, std::move(a), std::move(b)); }
Formula le(Expr a, Expr b) { return cmp(CmpOp::le, std::move(a), std::move(b)); }
Formula eq(Expr a, Expr b) { return cmp(CmpOp::eq, std::move(a), std::move(b)); }
Formula ne(Expr a, Expr b) { return cmp(CmpOp::ne, std::move(a), std::move(b)); }
Formula ge(Expr a, Expr b) { return cmp(CmpOp::ge, std::move(a), std::move(b)); }
Formula gt(Expr a, Expr b) { return cmp(CmpOp::gt, std::move(a), std::move(b)); }

Formula conj(std::vector<Formula> args)
{
	if (args.empty())
		return true_f();
	if (args.size() == 1)
		return std::move(args.front());
	return mkf(fm::And { std::move(args) });
}

Formula disj(std::vector<Formula> args)
{
	if (args.empty())
		return false_f();
	if (args.size() == 1)
		return std::move(args.front());
	return mkf(fm::Or { std::move(args) });
}

Formula lnot(Formula a) { return mkf(fm::Not { std::move(a) }); }
Formula implies(Formula a, Formula b) { return mkf(fm::Implies { std::move(a), std::move(b) }); }

/* ---- evaluation ---- */

namespace {

bool compare(CmpOp op, const Rational &a, const Rational &b)
{
	switch (op) {
	case CmpOp::lt: return a < b;
	case CmpOp::le: return a <= b;
	case CmpOp::eq: return a == b;
	case CmpOp::ne: return a != b;
	case CmpOp::ge: return a >= b;
	case CmpOp::gt: return a > b;
	}
	return false;
}

}

Rational eval(const Expr &e, const Assignment &a)
{
	return std::visit(overloaded {
	[](const ex::Const &c) { return c.value; },
	[&](const ex::Var &v) {
		auto it = a.find(v.name);
		if (it == a.end())
			throw Error(Errc::unbound_variable,
			            "no value for variable '" + v.name + "'");
		if (v.sort != Sort::real && !is_integer(it->second))
			throw Error(Errc::sort_mismatch,
			            "variable '" + v.name + "' of sort " +
			            sort_name(v.sort) + " assigned " +
			            to_string(it->second));
		return it->second;
	},
	[&](const ex::Add &n) -> Rational { return eval(n.lhs, a) + eval(n.rhs, a); },
	[&](const ex::Mul &n) -> Rational { return eval(n.lhs, a) * eval(n.rhs, a); },
	[&](const ex::Neg &n) -> Rational { return -eval(n.arg, a); },
	[&](const ex::Pow &n) { return pow(eval(n.base, a), n.exponent); },
	[&](const ex::LinDiv &n) -> Rational { return eval(n.arg, a) / n.divisor; },
	[&](const ex::Ite &n) {
		return eval(n.cond, a) ? eval(n.then_expr, a) : eval(n.else_expr, a);
	},
	[&](const ex::Max2 &n) {
		Rational l = eval(n.lhs, a), r = eval(n.rhs, a);
		return l >= r ? l : r;
	},
	[&](const ex::Min2 &n) {
		Rational l = eval(n.lhs, a), r = eval(n.rhs, a);
		return l <= r ? l : r;
	},
	}, e->node);
}

bool eval(const Formula &f, const Assignment &a)
{
	return std::visit(overloaded {
	[](const fm::Bool &b) { return b.value; },
	[&](const fm::Cmp &c) { return compare(c.op, eval(c.lhs, a), eval(c.rhs, a)); },
	[&](const fm::And &n) {
		for (const Formula &g : n.args)
			if (!eval(g, a))
				return false;
		return true;
	},
	[&](const fm::Or &n) {
		for (const Formula &g : n.args)
			if (eval(g, a))
				return true;
		return false;
	},
	[&](const fm::Not &n) { return !eval(n.arg, a); },
	[&](const fm::Implies &n) { return !eval(n.lhs, a) || eval(n.rhs, a); },
	}, f->node);
}

bool eval_relaxed(const Formula &f, const Assignment &a, const Rational &delta)
{
	return std::visit(overloaded {
	[](const fm::Bool &b) { return b.value; },
	[&](const fm::Cmp &c) {
		Rational d = eval(c.lhs, a) - eval(c.rhs, a);
		switch (c.op) {
		case CmpOp::lt: return d < delta;
		case CmpOp::le: return d <= delta;
		case CmpOp::eq: return abs(d) <= delta;
		case CmpOp::ne: return d != 0;
		case CmpOp::ge: return d >= -delta;
		case CmpOp::gt: return d > -delta;
		}
		return false;
	},
	[&](const fm::And &n) {
		for (const Formula &g : n.args)
			if (!eval_relaxed(g, a, delta))
				return false;
		return true;
	},
	[&](const fm::Or &n) {
		for (const Formula &g : n.args)
			if (eval_relaxed(g, a, delta))
				return true;
		return false;
	},
	/* not in NNF: no polarity-correct relaxation, fall back to exact */
	[&](const fm::Not &n) { return !eval(n.arg, a); },
	[&](const fm::Implies &n) { return !eval(n.lhs, a) || eval(n.rhs, a); },
	}, f->node);
}

/* ---- substitution, folding ---- */

namespace {

/* Memoized on node identity so that shared subterms stay shared. */
struct Substituter {
	const Substitution &s;
	std::unordered_map<const ExprNode *, Expr> done;

	Expr operator()(const Expr &e)
	{
		if (auto it = done.find(e.get()); it != done.end())
			return it->second;
		Expr r = apply(e);
		done.emplace(e.get(), r);
		return r;
	}

	Expr apply(const Expr &e)
	{
		auto &self = *this;
		return std::visit(overloaded {
		[&](const ex::Const &) { return e; },
		[&](const ex::Var &v) {
			auto it = s.find(v.name);
			if (it == s.end())
				return e;
			if (v.sort != Sort::real)
				if (const Rational *c = const_value(it->second); c && !is_integer(*c))
					throw Error(Errc::sort_mismatch,
					            "substituting non-integral " + to_string(*c) +
					            " for " + sort_name(v.sort) + " variable '" +
					            v.name + "'");
			return it->second;
		},
		[&](const ex::Add &n) { return add(self(n.lhs), self(n.rhs)); },
		[&](const ex::Mul &n) { return mul(self(n.lhs), self(n.rhs)); },
		[&](const ex::Neg &n) { return neg(self(n.arg)); },
		[&](const ex::Pow &n) { return pow(self(n.base), n.exponent); },
		[&](const ex::LinDiv &n) { return lindiv(self(n.arg), n.divisor); },
		[&](const ex::Ite &n) {
			return ite(self(n.cond), self(n.then_expr), self(n.else_expr));
		},
		[&](const ex::Max2 &n) { return max2(self(n.lhs), self(n.rhs)); },
		[&](const ex::Min2 &n) { return min2(self(n.lhs), self(n.rhs)); },
		}, e->node);
	}

	Formula operator()(const Formula &f)
	{
		auto &self = *this;
		auto all = [&](const std::vector<Formula> &args) {
			std::vector<Formula> v;
			for (const Formula &g : args)
				v.push_back(self(g));
			return v;
		};
		return std::visit(overloaded {
		[&](const fm::Bool &) { return f; },
		[&](const fm::Cmp &c) { return cmp(c.op, self(c.lhs), self(c.rhs)); },
		[&](const fm::And &n) { return mkf(fm::And { all(n.args) }); },
		[&](const fm::Or &n) { return mkf(fm::Or { all(n.args) }); },
		[&](const fm::Not &n) { return lnot(self(n.arg)); },
		[&](const fm::Implies &n) { return implies(self(n.lhs), self(n.rhs)); },
		}, f->node);
	}
};

}

Expr substitute(const Expr &e, const Substitution &s)
{
	return Substituter { s, {} }(e);
}

Formula substitute(const Formula &f, const Substitution &s)
{
	return Substituter { s, {} }(f);
}

namespace {

struct Folder {
	std::unordered_map<const ExprNode *, Expr> done;

	Expr operator()(const Expr &e)
	{
		if (auto it = done.find(e.get()); it != done.end())
			return it->second;
		Expr r = apply(e);
		done.emplace(e.get(), r);
		return r;
	}

	Expr apply(const Expr &e)
	{
		auto &self = *this;
		return std::visit(overloaded {
		[&](const ex::Const &) { return e; },
		[&](const ex::Var &) { return e; },
		[&](const ex::Add &n) {
			Expr l = self(n.lhs), r = self(n.rhs);
			const Rational *a = const_value(l), *b = const_value(r);
			return a && b ? cnst(*a + *b) : add(l, r);
		},
		[&](const ex::Mul &n) {
			Expr l = self(n.lhs), r = self(n.rhs);
			const Rational *a = const_value(l), *b = const_value(r);
			return a && b ? cnst(*a * *b) : mul(l, r);
		},
		[&](const ex::Neg &n) {
			Expr x = self(n.arg);
			const Rational *a = const_value(x);
			return a ? cnst(-*a) : neg(x);
		},
		[&](const ex::Pow &n) {
			Expr x = self(n.base);
			const Rational *a = const_value(x);
			return a ? cnst(pow(*a, n.exponent)) : pow(x, n.exponent);
		},
		[&](const ex::LinDiv &n) {
			Expr x = self(n.arg);
			const Rational *a = const_value(x);
			return a ? cnst(*a / n.divisor) : lindiv(x, n.divisor);
		},
		[&](const ex::Ite &n) {
			Formula c = self(n.cond);
			if (const auto *b = c->get<fm::Bool>())
				return self(b->value ? n.then_expr : n.else_expr);
			return ite(c, self(n.then_expr), self(n.else_expr));
		},
		[&](const ex::Max2 &n) {
			Expr l = self(n.lhs), r = self(n.rhs);
			const Rational *a = const_value(l), *b = const_value(r);
			return a && b ? cnst(*a >= *b ? *a : *b) : max2(l, r);
		},
		[&](const ex::Min2 &n) {
			Expr l = self(n.lhs), r = self(n.rhs);
			const Rational *a = const_value(l), *b = const_value(r);
			return a && b ? cnst(*a <= *b ? *a : *b) : min2(l, r);
		},
		}, e->node);
	}

	Formula operator()(const Formula &f)
	{
		auto &self = *this;
		return std::visit(overloaded {
		[&](const fm::Bool &) { return f; },
		[&](const fm::Cmp &c) {
			Expr l = self(c.lhs), r = self(c.rhs);
			const Rational *a = const_value(l), *b = const_value(r);
			return a && b ? boolean(compare(c.op, *a, *b)) : cmp(c.op, l, r);
		},
		[&](const fm::And &n) {
			std::vector<Formula> v;
			for (const Formula &g : n.args) {
				Formula h = self(g);
				if (const auto *b = h->get<fm::Bool>()) {
					if (!b->value)
						return false_f();
					continue;
				}
				v.push_back(std::move(h));
			}
			return conj(std::move(v));
		},
		[&](const fm::Or &n) {
			std::vector<Formula> v;
			for (const Formula &g : n.args) {
				Formula h = self(g);
				if (const auto *b = h->get<fm::Bool>()) {
					if (b->value)
						return true_f();
					continue;
				}
				v.push_back(std::move(h));
			}
			return disj(std::move(v));
		},
		[&](const fm::Not &n) {
			Formula x = self(n.arg);
			if (const auto *b = x->get<fm::Bool>())
				return boolean(!b->value);
			return lnot(x);
		},
		[&](const fm::Implies &n) {
			Formula l = self(n.lhs), r = self(n.rhs);
			if (const auto *b = l->get<fm::Bool>())
				return b->value ? r : true_f();
			if (const auto *b = r->get<fm::Bool>())
				return b->value ? true_f() : self(lnot(l));
			return implies(l, r);
		},
		}, f->node);
	}
};

}

Expr fold(const Expr &e)
{
	return Folder {}(e);
}

Formula fold(const Formula &f)
{
	return Folder {}(f);
}

namespace {

Formula nnf(const Formula &f, bool negated)
{
	return std::visit(overloaded {
	[&](const fm::Bool &b) { return boolean(b.value != negated); },
	[&](const fm::Cmp &c) {
		return negated ? cmp(negate(c.op), c.lhs, c.rhs) : f;
	},
	[&](const fm::And &n) {
		std::vector<Formula> v;
		for (const Formula &g : n.args)
			v.push_back(nnf(g, negated));
		return negated ? mkf(fm::Or { std::move(v) }) : mkf(fm::And { std::move(v) });
	},
	[&](const fm::Or &n) {
		std::vector<Formula> v;
		for (const Formula &g : n.args)
			v.push_back(nnf(g, negated));
		return negated ? mkf(fm::And { std::move(v) }) : mkf(fm::Or { std::move(v) });
	},
	[&](const fm::Not &n) { return nnf(n.arg, !negated); },
	[&](const fm::Implies &n) {
		std::vector<Formula> v { nnf(n.lhs, !negated), nnf(n.rhs, negated) };
		return negated ? mkf(fm::And { std::move(v) }) : mkf(fm::Or { std::move(v) });
	},
	}, f->node);
}

}

Formula to_nnf(const Formula &f)
{
	return nnf(f, false);
}

/* ---- structure ---- */

void collect_vars(const Expr &e, VarSorts &out)
{
	std::visit(overloaded {
	[](const ex::Const &) {},
	[&](const ex::Var &v) { out.emplace(v.name, v.sort); },
	[&](const ex::Add &n) { collect_vars(n.lhs, out); collect_vars(n.rhs, out); },
	[&](const ex::Mul &n) { collect_vars(n.lhs, out); collect_vars(n.rhs, out); },
	[&](const ex::Neg &n) { collect_vars(n.arg, out); },
	[&](const ex::Pow &n) { collect_vars(n.base, out); },
	[&](const ex::LinDiv &n) { collect_vars(n.arg, out); },
	[&](const ex::Ite &n) {
		collect_vars(n.cond, out);
		collect_vars(n.then_expr, out);
		collect_vars(n.else_expr, out);
	},
	[&](const ex::Max2 &n) { collect_vars(n.lhs, out); collect_vars(n.rhs, out); },
	[&](const ex::Min2 &n) { collect_vars(n.lhs, out); collect_vars(n.rhs, out); },
	}, e->node);
}

void collect_vars(const Formula &f, VarSorts &out)
{
	std::visit(overloaded {
	[](const fm::Bool &) {},
	[&](const fm::Cmp &c) { collect_vars(c.lhs, out); collect_vars(c.rhs, out); },
	[&](const fm::And &n) { for (const Formula &g : n.args) collect_vars(g, out); },
	[&](const fm::Or &n) { for (const Formula &g : n.args) collect_vars(g, out); },
	[&](const fm::Not &n) { collect_vars(n.arg, out); },
	[&](const fm::Implies &n) { collect_vars(n.lhs, out); collect_vars(n.rhs, out); },
	}, f->node);
}

VarSorts free_vars(const Expr &e)
{
	VarSorts r;
	collect_vars(e, r);
	return r;
}

VarSorts free_vars(const Formula &f)
{
	VarSorts r;
	collect_vars(f, r);
	return r;
}

namespace {

bool is_ground(const Expr &e)
{
	return free_vars(e).empty();
}

}

bool is_linear(const Expr &e)
{
	return std::visit(overloaded {
	[](const ex::Const &) { return true; },
	[](const ex::Var &) { return true; },
	[](const ex::Add &n) { return is_linear(n.lhs) && is_linear(n.rhs); },
	[](const ex::Mul &n) {
		if (is_ground(n.lhs))
			return is_linear(n.rhs);
		if (is_ground(n.rhs))
			return is_linear(n.lhs);
		return false;
	},
	[](const ex::Neg &n) { return is_linear(n.arg); },
	[](const ex::Pow &n) {
		return n.exponent <= 1 ? is_linear(n.base) : is_ground(n.base);
	},
	[](const ex::LinDiv &n) { return is_linear(n.arg); },
	[](const ex::Ite &n) {
		return is_linear(n.cond) && is_linear(n.then_expr) && is_linear(n.else_expr);
	},
	[](const ex::Max2 &n) { return is_linear(n.lhs) && is_linear(n.rhs); },
	[](const ex::Min2 &n) { return is_linear(n.lhs) && is_linear(n.rhs); },
	}, e->node);
}

bool is_linear(const Formula &f)
{
	return std::visit(overloaded {
	[](const fm::Bool &) { return true; },
	[](const fm::Cmp &c) { return is_linear(c.lhs) && is_linear(c.rhs); },
	[](const fm::And &n) {
		for (const Formula &g : n.args)
			if (!is_linear(g))
				return false;
		return true;
	},
	[](const fm::Or &n) {
		for (const Formula &g : n.args)
			if (!is_linear(g))
				return false;
		return true;
	},
	[](const fm::Not &n) { return is_linear(n.arg); },
	[](const fm::Implies &n) { return is_linear(n.lhs) && is_linear(n.rhs); },
	}, f->node);
}

bool equal(const Expr &a, const Expr &b)
{
	if (a == b)
		return true;
	if (a->node.index() != b->node.index())
		return false;
	return std::visit(overloaded {
	[&](const ex::Const &x) { return x.value == b->get<ex::Const>()->value; },
	[&](const ex::Var &x) {
		const auto *y = b->get<ex::Var>();
		return x.name == y->name && x.sort == y->sort;
	},
	[&](const ex::Add &x) {
		const auto *y = b->get<ex::Add>();
		return equal(x.lhs, y->lhs) && equal(x.rhs, y->rhs);
	},
	[&](const ex::Mul &x) {
		const auto *y = b->get<ex::Mul>();
		return equal(x.lhs, y->lhs) && equal(x.rhs, y->rhs);
	},
	[&](const ex::Neg &x) { return equal(x.arg, b->get<ex::Neg>()->arg); },
	[&](const ex::Pow &x) {
		const auto *y = b->get<ex::Pow>();
		return x.exponent == y->exponent && equal(x.base, y->base);
	},
	[&](const ex::LinDiv &x) {
		const auto *y = b->get<ex::LinDiv>();
		return x.divisor == y->divisor && equal(x.arg, y->arg);
	},
	[&](const ex::Ite &x) {
		const auto *y = b->get<ex::Ite>();
		return equal(x.cond, y->cond) && equal(x.then_expr, y->then_expr) &&
		       equal(x.else_expr, y->else_expr);
	},
	[&](const ex::Max2 &x) {
		const auto *y = b->get<ex::Max2>();
		return equal(x.lhs, y->lhs) && equal(x.rhs, y->rhs);
	},
	[&](const ex::Min2 &x) {
		const auto *y = b->get<ex::Min2>();
		return equal(x.lhs, y->lhs) && equal(x.rhs, y->rhs);
	},
	}, a->node);
}

namespace {

bool equal_list(const std::vector<Formula> &a, const std::vector<Formula> &b)
{
	if (a.size() != b.size())
		return false;
	for (size_t i = 0; i < a.size(); i++)
		if (!equal(a[i], b[i]))
			return false;
	return true;
}

}

bool equal(const Formula &a, const Formula &b)
{
	if (a == b)
		return true;
	if (a->node.index() != b->node.index())
		return false;
	return std::visit(overloaded {
	[&](const fm::Bool &x) { return x.value == b->get<fm::Bool>()->value; },
	[&](const fm::Cmp &x) {
		const auto *y = b->get<fm::Cmp>();
		return x.op == y->op && equal(x.lhs, y->lhs) && equal(x.rhs, y->rhs);
	},
	[&](const fm::And &x) { return equal_list(x.args, b->get<fm::And>()->args); },
	[&](const fm::Or &x) { return equal_list(x.args, b->get<fm::Or>()->args); },
	[&](const fm::Not &x) { return equal(x.arg, b->get<fm::Not>()->arg); },
	[&](const fm::Implies &x) {
		const auto *y = b->get<fm::Implies>();
		return equal(x.lhs, y->lhs) && equal(x.rhs, y->rhs);
	},
	}, a->node);
}

std::vector<Formula> conjuncts(const Formula &f)
{
	std::vector<Formula> r;
	if (const auto *a = f->get<fm::And>()) {
		for (const Formula &g : a->args)
			for (Formula &h : conjuncts(g))
				r.push_back(std::move(h));
	} else if (const auto *b = f->get<fm::Bool>(); !b || !b->value) {
		r.push_back(f);
	}
	return r;
}

/* ---- printing ---- */

namespace {

/* binding strength of the printed forms, higher binds tighter */
enum { P_ADD = 1, P_MUL = 2, P_UNARY = 3, P_POW = 4, P_ATOM = 5 };
enum { F_OR = 1, F_AND = 2, F_NOT = 3, F_ATOM = 4 };

std::string print(const Expr &e, int ctx);
std::string print(const Formula &f, int ctx);

std::string paren(std::string s, bool p)
{
	return p ? "(" + s + ")" : s;
}

std::string print_const(const Rational &q)
{
	if (is_integer(q) && q >= 0)
		return q.get_str();
	return "(" + q.get_str() + ")";
}

std::string print(const Expr &e, int ctx)
{
	return std::visit(overloaded {
	[](const ex::Const &c) { return print_const(c.value); },
	[](const ex::Var &v) { return v.name; },
	[&](const ex::Add &n) {
		std::string s;
		if (const auto *m = n.rhs->get<ex::Neg>())
			s = print(n.lhs, P_ADD) + " - " + print(m->arg, P_MUL);
		else
			s = print(n.lhs, P_ADD) + " + " + print(n.rhs, P_MUL);
		return paren(s, ctx > P_ADD);
	},
	[&](const ex::Mul &n) {
		return paren(print(n.lhs, P_MUL) + "*" + print(n.rhs, P_UNARY), ctx > P_MUL);
	},
	[&](const ex::Neg &n) { return paren("-" + print(n.arg, P_UNARY), ctx > P_UNARY); },
	[&](const ex::Pow &n) {
		return paren(print(n.base, P_ATOM) + "**" + std::to_string(n.exponent),
		             ctx > P_POW);
	},
	[&](const ex::LinDiv &n) {
		return paren(print(n.arg, P_MUL) + "/" + print_const(n.divisor), ctx > P_MUL);
	},
	[&](const ex::Ite &n) {
		return "ite(" + print(n.cond, F_OR) + ", " + print(n.then_expr, P_ADD) +
		       ", " + print(n.else_expr, P_ADD) + ")";
	},
	[&](const ex::Max2 &n) {
		return "max(" + print(n.lhs, P_ADD) + ", " + print(n.rhs, P_ADD) + ")";
	},
	[&](const ex::Min2 &n) {
		return "min(" + print(n.lhs, P_ADD) + ", " + print(n.rhs, P_ADD) + ")";
	},
	}, e->node);
}

/* categorical comparisons print the category name instead of its index */
std::string print_category_operand(const Expr &e, const Expr &other)
{
	const auto *c = e->get<ex::Const>();
	const auto *v = other->get<ex::Var>();
	if (c && v && v->sort == Sort::set && v->categories && is_integer(c->value) &&
	    c->value >= 0 && c->value < static_cast<long>(v->categories->size()))
		return "\"" + (*v->categories)[c->value.get_num().get_ui()] + "\"";
	return print(e, P_ADD);
}

std::string print(const Formula &f, int ctx)
{
	return std::visit(overloaded {
	[](const fm::Bool &b) { return std::string(b.value ? "true" : "false"); },
	[&](const fm::Cmp &c) {
		return print_category_operand(c.lhs, c.rhs) + " " + cmp_name(c.op) + " " +
		       print_category_operand(c.rhs, c.lhs);
	},
	[&](const fm::And &n) {
		std::string s;
		for (size_t i = 0; i < n.args.size(); i++)
			s += (i ? " and " : "") + print(n.args[i], F_NOT);
		return paren(s, ctx > F_AND);
	},
	[&](const fm::Or &n) {
		std::string s;
		for (size_t i = 0; i < n.args.size(); i++)
			s += (i ? " or " : "") + print(n.args[i], F_AND);
		return paren(s, ctx > F_OR);
	},
	[&](const fm::Not &n) { return paren("not " + print(n.arg, F_NOT), ctx > F_NOT); },
	[&](const fm::Implies &n) {
		return "implies(" + print(n.lhs, F_OR) + ", " + print(n.rhs, F_OR) + ")";
	},
	}, f->node);
}

}

std::string to_string(const Expr &e)
{
	return print(e, P_ADD);
}

std::string to_string(const Formula &f)
{
	return print(f, F_OR);
}

}
