/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#include "gearbox/error.hh"
#include "gearbox/process.hh"
#include "gearbox/solver.hh"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <optional>

#include <sys/wait.h>

namespace gearbox {

std::string smt_symbol(const std::string &name)
{
	static const std::string extra = "~!@$%^&*_-+=<>.?/";
	bool simple = !name.empty() && !std::isdigit(static_cast<unsigned char>(name[0]));
	for (char c : name)
		if (!std::isalnum(static_cast<unsigned char>(c)) && extra.find(c) == std::string::npos)
			simple = false;
	return simple ? name : "|" + name + "|";
}

namespace {

class Printer {
	bool real_ctx_; /* integer variables are lifted with to_real */

public:
	explicit Printer(bool real_ctx)
	: real_ctx_(real_ctx)
	{}

	static std::string num(const Rational &q)
	{
		mpz_class n = q.get_num();
		bool negative = n < 0;
		if (negative)
			n = -n;
		std::string s = n.get_str();
		if (!is_integer(q))
			s = "(/ " + s + " " + q.get_den().get_str() + ")";
		return negative ? "(- " + s + ")" : s;
	}

	void flatten(const Expr &e, bool add, std::vector<Expr> &out) const
	{
		if (add) {
			if (const auto *n = e->get<ex::Add>()) {
				flatten(n->lhs, true, out);
				flatten(n->rhs, true, out);
				return;
			}
		} else if (const auto *n = e->get<ex::Mul>()) {
			flatten(n->lhs, false, out);
			flatten(n->rhs, false, out);
			return;
		}
		out.push_back(e);
	}

	std::string nary(const char *op, const std::vector<Expr> &args) const
	{
		std::string s = std::string("(") + op;
		for (const Expr &a : args)
			s += " " + term(a);
		return s + ")";
	}

	std::string term(const Expr &e) const
	{
		if (const auto *c = e->get<ex::Const>())
			return num(c->value);
		if (const auto *v = e->get<ex::Var>()) {
			std::string s = smt_symbol(v->name);
			return real_ctx_ && v->sort != Sort::real ? "(to_real " + s + ")" : s;
		}
		if (e->get<ex::Add>() || e->get<ex::Mul>()) {
			bool add = e->get<ex::Add>() != nullptr;
			std::vector<Expr> args;
			flatten(e, add, args);
			return nary(add ? "+" : "*", args);
		}
		if (const auto *n = e->get<ex::Neg>())
			return "(- " + term(n->arg) + ")";
		if (const auto *n = e->get<ex::Pow>()) {
			if (n->exponent == 0)
				return "1";
			if (n->exponent == 1)
				return term(n->base);
			return nary("*", std::vector<Expr>(n->exponent, n->base));
		}
		if (const auto *n = e->get<ex::LinDiv>())
			return "(* " + num(1 / n->divisor) + " " + term(n->arg) + ")";
		if (const auto *n = e->get<ex::Ite>())
			return "(ite " + formula(n->cond) + " " + term(n->then_expr) + " " +
			       term(n->else_expr) + ")";
		if (const auto *n = e->get<ex::Max2>()) {
			std::string a = term(n->lhs), b = term(n->rhs);
			return "(ite (>= " + a + " " + b + ") " + a + " " + b + ")";
		}
		const auto *n = e->get<ex::Min2>();
		std::string a = term(n->lhs), b = term(n->rhs);
		return "(ite (<= " + a + " " + b + ") " + a + " " + b + ")";
	}

	std::string formula(const Formula &f) const
	{
		if (const auto *b = f->get<fm::Bool>())
			return b->value ? "true" : "false";
		if (const auto *c = f->get<fm::Cmp>()) {
			std::string a = term(c->lhs), b = term(c->rhs);
			switch (c->op) {
			case CmpOp::lt: return "(< " + a + " " + b + ")";
			case CmpOp::le: return "(<= " + a + " " + b + ")";
			case CmpOp::eq: return "(= " + a + " " + b + ")";
			case CmpOp::ne: return "(not (= " + a + " " + b + "))";
			case CmpOp::ge: return "(>= " + a + " " + b + ")";
			case CmpOp::gt: return "(> " + a + " " + b + ")";
			}
		}
		auto list = [&](const char *op, const std::vector<Formula> &args) {
			std::string s = std::string("(") + op;
			for (const Formula &g : args)
				s += " " + formula(g);
			return s + ")";
		};
		if (const auto *n = f->get<fm::And>())
			return list("and", n->args);
		if (const auto *n = f->get<fm::Or>())
			return list("or", n->args);
		if (const auto *n = f->get<fm::Not>())
			return "(not " + formula(n->arg) + ")";
		const auto *n = f->get<fm::Implies>();
		return "(=> " + formula(n->lhs) + " " + formula(n->rhs) + ")";
	}
};

bool has_fraction(const Expr &e);

bool has_fraction(const Formula &f)
{
	if (const auto *c = f->get<fm::Cmp>())
		return has_fraction(c->lhs) || has_fraction(c->rhs);
	if (const auto *n = f->get<fm::And>())
		return std::any_of(n->args.begin(), n->args.end(),
		                   [](const Formula &g) { return has_fraction(g); });
	if (const auto *n = f->get<fm::Or>())
		return std::any_of(n->args.begin(), n->args.end(),
		                   [](const Formula &g) { return has_fraction(g); });
	if (const auto *n = f->get<fm::Not>())
		return has_fraction(n->arg);
	if (const auto *n = f->get<fm::Implies>())
		return has_fraction(n->lhs) || has_fraction(n->rhs);
	return false;
}

bool has_fraction(const Expr &e)
{
	if (const auto *c = e->get<ex::Const>())
		return !is_integer(c->value);
	if (e->get<ex::Var>())
		return false;
	if (const auto *n = e->get<ex::Add>())
		return has_fraction(n->lhs) || has_fraction(n->rhs);
	if (const auto *n = e->get<ex::Mul>())
		return has_fraction(n->lhs) || has_fraction(n->rhs);
	if (const auto *n = e->get<ex::Neg>())
		return has_fraction(n->arg);
	if (const auto *n = e->get<ex::Pow>())
		return has_fraction(n->base);
	if (e->get<ex::LinDiv>())
		return true;
	if (const auto *n = e->get<ex::Ite>())
		return has_fraction(n->cond) || has_fraction(n->then_expr) ||
		       has_fraction(n->else_expr);
	if (const auto *n = e->get<ex::Max2>())
		return has_fraction(n->lhs) || has_fraction(n->rhs);
	const auto *n = e->get<ex::Min2>();
	return has_fraction(n->lhs) || has_fraction(n->rhs);
}

}

std::string emit_smtlib(const SolverQuery &q)
{
	VarSorts sorts;
	for (const auto &[name, d] : q.box)
		sorts.emplace(name, d.sort);
	collect_vars(q.formula, sorts);
	bool any_real = false, any_int = false;
	for (const auto &[_, s] : sorts)
		(s == Sort::real ? any_real : any_int) = true;
	bool real_ctx = any_real || has_fraction(q.formula);
	for (const auto &[name, g] : q.grids)
		for (const Rational &v : g)
			if (!is_integer(v) && sorts.count(name) && sorts.at(name) == Sort::real)
				real_ctx = true;
	bool linear = is_linear(q.formula);
	std::string logic = std::string("QF_") + (linear ? "L" : "N") +
	                    (!real_ctx ? "IA" : any_int ? "IRA" : "RA");

	Printer pr(real_ctx);
	std::string s = "(set-logic " + logic + ")\n";
	for (const auto &[name, sort] : sorts)
		s += "(declare-const " + smt_symbol(name) + (sort == Sort::real ? " Real" : " Int") + ")\n";
	for (const auto &[name, d] : q.box) {
		std::string v = smt_symbol(name);
		if (d.finite) {
			std::string alts;
			for (const Rational &x : d.values)
				alts += " (= " + v + " " + Printer::num(x) + ")";
			s += d.values.size() == 1 ? "(assert" + alts + ")\n" : "(assert (or" + alts + "))\n";
			continue;
		}
		s += "(assert (<= " + Printer::num(d.lo) + " " + v + "))\n";
		s += "(assert (<= " + v + " " + Printer::num(d.hi) + "))\n";
	}
	for (const auto &[name, g] : q.grids) {
		std::string v = smt_symbol(name), alts;
		for (const Rational &x : g)
			alts += " (= " + v + " " + Printer::num(x) + ")";
		s += g.size() == 1 ? "(assert" + alts + ")\n" : "(assert (or" + alts + "))\n";
	}
	s += "(assert " + pr.formula(q.formula) + ")\n";
	s += "(check-sat)\n";
	if (!sorts.empty()) {
		s += "(get-value (";
		bool first = true;
		for (const auto &[name, _] : sorts) {
			s += (first ? "" : " ") + smt_symbol(name);
			first = false;
		}
		s += "))\n";
	}
	s += "(exit)\n";
	return s;
}

/* ---- s-expressions ---- */

namespace {

struct SExp {
	bool list = false;
	std::string atom;
	std::vector<SExp> items;
};

class Reader {
	std::string_view s_;
	size_t i_ = 0;

	void skip()
	{
		while (i_ < s_.size()) {
			if (std::isspace(static_cast<unsigned char>(s_[i_])))
				i_++;
			else if (s_[i_] == ';')
				while (i_ < s_.size() && s_[i_] != '\n')
					i_++;
			else
				break;
		}
	}

	[[noreturn]] void fail(const std::string &msg) const
	{
		size_t line = 1 + static_cast<size_t>(std::count(s_.begin(), s_.begin() + i_, '\n'));
		throw Error(Errc::protocol_error,
		            "solver output line " + std::to_string(line) + ": " + msg, i_);
	}

public:
	explicit Reader(std::string_view s)
	: s_(s)
	{}

	bool done()
	{
		skip();
		return i_ >= s_.size();
	}

	SExp read()
	{
		skip();
		if (i_ >= s_.size())
			fail("unexpected end of output");
		SExp e;
		char c = s_[i_];
		if (c == '(') {
			i_++;
			e.list = true;
			while (true) {
				skip();
				if (i_ >= s_.size())
					fail("unbalanced parenthesis");
				if (s_[i_] == ')') {
					i_++;
					return e;
				}
				e.items.push_back(read());
			}
		}
		if (c == ')')
			fail("unexpected ')'");
		size_t start = i_;
		if (c == '|' || c == '"') {
			size_t j = s_.find(c, i_ + 1);
			if (j == std::string_view::npos)
				fail("unterminated quoted token");
			e.atom = std::string(s_.substr(i_ + 1, j - i_ - 1));
			i_ = j + 1;
			return e;
		}
		while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) &&
		       s_[i_] != '(' && s_[i_] != ')')
			i_++;
		e.atom = std::string(s_.substr(start, i_ - start));
		return e;
	}
};

std::optional<Rational> value_of(const SExp &e)
{
	if (!e.list)
		return parse_rational(e.atom);
	if (e.items.size() == 2 && !e.items[0].list && e.items[0].atom == "-") {
		auto v = value_of(e.items[1]);
		return v ? std::optional<Rational>(-*v) : std::nullopt;
	}
	if (e.items.size() == 3 && !e.items[0].list && e.items[0].atom == "/") {
		auto a = value_of(e.items[1]), b = value_of(e.items[2]);
		if (!a || !b || *b == 0)
			return std::nullopt;
		return Rational(*a / *b);
	}
	return std::nullopt;
}

std::string to_text(const SExp &e)
{
	if (!e.list)
		return e.atom;
	std::string s = "(";
	for (size_t i = 0; i < e.items.size(); i++)
		s += (i ? " " : "") + to_text(e.items[i]);
	return s + ")";
}

}

std::optional<Rational> parse_smt_value(std::string_view sexpr)
{
	try {
		Reader rd(sexpr);
		SExp e = rd.read();
		if (!rd.done())
			return std::nullopt;
		return value_of(e);
	} catch (const Error &) {
		return std::nullopt;
	}
}

Verdict external_solve(const SolverQuery &q, const SolverConfig &cfg, SolverStats *stats)
{
	auto t0 = std::chrono::steady_clock::now();
	auto done = [&](Verdict v) {
		if (stats) {
			stats->queries++;
			(v.status == Status::sat ? stats->sat
			 : v.status == Status::unsat ? stats->unsat : stats->unknown)++;
			stats->seconds += std::chrono::duration<double>(
				std::chrono::steady_clock::now() - t0).count();
		}
		return v;
	};
	ProcessResult r = run_process(cfg.command, cfg.args, emit_smtlib(q), cfg.timeout);
	if (r.timed_out)
		return done(Verdict::unknown("timeout"));
	if (WIFEXITED(r.status) && WEXITSTATUS(r.status) == 127)
		throw Error(Errc::backend_launch_failure, "cannot run '" + cfg.command + "'");
	Reader rd(r.out);
	if (rd.done())
		throw Error(Errc::protocol_error, "solver produced no output");
	SExp answer = rd.read();
	if (answer.list)
		throw Error(Errc::protocol_error, "solver error: " + to_text(answer));
	if (answer.atom == "unsat")
		return done(Verdict::unsat());
	if (answer.atom == "unknown" || answer.atom == "timeout")
		return done(Verdict::unknown("solver answered " + answer.atom));
	if (answer.atom != "sat")
		throw Error(Errc::protocol_error, "unexpected answer '" + answer.atom + "'");

	VarSorts sorts;
	for (const auto &[name, d] : q.box)
		sorts.emplace(name, d.sort);
	collect_vars(q.formula, sorts);
	Assignment w;
	if (!sorts.empty()) {
		if (rd.done())
			throw Error(Errc::protocol_error, "missing get-value answer");
		SExp values = rd.read();
		if (!values.list)
			throw Error(Errc::protocol_error, "malformed get-value answer: " + to_text(values));
		for (const SExp &pair : values.items) {
			if (!pair.list || pair.items.size() != 2 || pair.items[0].list)
				throw Error(Errc::protocol_error, "malformed get-value entry: " + to_text(pair));
			auto v = value_of(pair.items[1]);
			if (!v)
				return done(Verdict::unknown("non-rational model value for '" +
				                             pair.items[0].atom + "': " +
				                             to_text(pair.items[1])));
			w[pair.items[0].atom] = *v;
		}
		for (const auto &[name, _] : sorts)
			if (!w.count(name))
				throw Error(Errc::protocol_error, "no value for '" + name + "'");
	}
	return done(Verdict::sat(std::move(w)));
}

}
