/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#include "gearbox/parser.hh"
#include "gearbox/error.hh"

#include <algorithm>
#include <cctype>
#include <optional>
#include <vector>

namespace gearbox {

namespace {

enum class Tok {
	end, number, ident, string, lparen, rparen, comma,
	plus, minus, star, slash, starstar,
	lt, le, gt, ge, eqeq, ne,
	kw_and, kw_or, kw_not, kw_true, kw_false,
};

struct Token {
	Tok kind;
	std::string text;
	size_t pos;
};

std::vector<Token> lex(std::string_view s)
{
	std::vector<Token> out;
	size_t i = 0;
	auto is_ident = [](char c) {
		return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
	};
	while (true) {
		while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
			i++;
		if (i == s.size()) {
			out.push_back({ Tok::end, "", i });
			return out;
		}
		size_t start = i;
		char c = s[i];
		if (std::isdigit(static_cast<unsigned char>(c)) ||
		    (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i+1])))) {
			while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.'))
				i++;
			if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
				size_t j = i + 1;
				if (j < s.size() && (s[j] == '+' || s[j] == '-'))
					j++;
				if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
					i = j;
					while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
						i++;
				}
			}
			out.push_back({ Tok::number, std::string(s.substr(start, i - start)), start });
			continue;
		}
		if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
			while (i < s.size() && is_ident(s[i]))
				i++;
			std::string w(s.substr(start, i - start));
			Tok k = Tok::ident;
			if (w == "and") k = Tok::kw_and;
			else if (w == "or") k = Tok::kw_or;
			else if (w == "not") k = Tok::kw_not;
			else if (w == "true") k = Tok::kw_true;
			else if (w == "false") k = Tok::kw_false;
			out.push_back({ k, std::move(w), start });
			continue;
		}
		if (c == '"' || c == '\'') {
			size_t j = s.find(c, i + 1);
			if (j == std::string_view::npos)
				throw Error(Errc::syntax_error, "unterminated string literal", start);
			out.push_back({ Tok::string, std::string(s.substr(i + 1, j - i - 1)), start });
			i = j + 1;
			continue;
		}
		auto two = s.substr(i, 2);
		Tok k;
		size_t len = 2;
		if (two == "**") k = Tok::starstar;
		else if (two == "<=") k = Tok::le;
		else if (two == ">=") k = Tok::ge;
		else if (two == "==") k = Tok::eqeq;
		else if (two == "!=") k = Tok::ne;
		else {
			len = 1;
			switch (c) {
			case '(': k = Tok::lparen; break;
			case ')': k = Tok::rparen; break;
			case ',': k = Tok::comma; break;
			case '+': k = Tok::plus; break;
			case '-': k = Tok::minus; break;
			case '*': k = Tok::star; break;
			case '/': k = Tok::slash; break;
			case '<': k = Tok::lt; break;
			case '>': k = Tok::gt; break;
			default:
				throw Error(Errc::syntax_error,
				            std::string("unexpected character '") + c + "'", start);
			}
		}
		out.push_back({ k, std::string(s.substr(i, len)), start });
		i += len;
	}
}

/* intermediate result: a term, a formula or a bare string literal */
struct Node {
	Expr e;
	Formula f;
	std::optional<std::string> str;
	size_t pos = 0;
};

const Rational *const_value(const Expr &e)
{
	const auto *c = e->get<ex::Const>();
	return c ? &c->value : nullptr;
}

class Parser {
	std::vector<Token> toks_;
	size_t at_ = 0;
	const VarEnv &env_;

	const Token &peek() const { return toks_[at_]; }
	const Token &next() { return toks_[at_++]; }

	[[noreturn]] void fail(const std::string &msg, size_t pos) const
	{
		throw Error(Errc::syntax_error, msg, pos);
	}

	bool accept(Tok k)
	{
		if (peek().kind != k)
			return false;
		at_++;
		return true;
	}

	Expr term(const Node &n)
	{
		if (n.e) {
			if (const auto *v = n.e->get<ex::Var>(); v && v->sort == Sort::set)
				throw Error(Errc::sort_mismatch,
				            "categorical variable '" + v->name +
				            "' used in arithmetic", n.pos);
			return n.e;
		}
		fail(n.f ? "expected a term, found a formula" : "expected a term, found a string",
		     n.pos);
	}

	Formula formula(const Node &n)
	{
		if (n.f)
			return n.f;
		fail("expected a formula", n.pos);
	}

	Node or_expr()
	{
		Node first = and_expr();
		if (peek().kind != Tok::kw_or)
			return first;
		std::vector<Formula> args { formula(first) };
		while (accept(Tok::kw_or))
			args.push_back(formula(and_expr()));
		return { nullptr, disj(std::move(args)), {}, first.pos };
	}

	Node and_expr()
	{
		Node first = not_expr();
		if (peek().kind != Tok::kw_and)
			return first;
		std::vector<Formula> args { formula(first) };
		while (accept(Tok::kw_and))
			args.push_back(formula(not_expr()));
		return { nullptr, conj(std::move(args)), {}, first.pos };
	}

	Node not_expr()
	{
		size_t pos = peek().pos;
		if (accept(Tok::kw_not))
			return { nullptr, lnot(formula(not_expr())), {}, pos };
		return comparison();
	}

	static std::optional<CmpOp> cmp_op(Tok k)
	{
		switch (k) {
		case Tok::lt: return CmpOp::lt;
		case Tok::le: return CmpOp::le;
		case Tok::gt: return CmpOp::gt;
		case Tok::ge: return CmpOp::ge;
		case Tok::eqeq: return CmpOp::eq;
		case Tok::ne: return CmpOp::ne;
		default: return std::nullopt;
		}
	}

	Expr category(const Node &var_node, const Node &lit, CmpOp op)
	{
		const auto *v = var_node.e ? var_node.e->get<ex::Var>() : nullptr;
		if (!v || v->sort != Sort::set)
			throw Error(Errc::sort_mismatch,
			            "string literal compared with a non-categorical term",
			            lit.pos);
		if (op != CmpOp::eq && op != CmpOp::ne)
			throw Error(Errc::sort_mismatch,
			            "categorical variable '" + v->name +
			            "' only supports == and !=", lit.pos);
		const auto &cats = *v->categories;
		auto it = std::find(cats.begin(), cats.end(), *lit.str);
		if (it == cats.end())
			throw Error(Errc::sort_mismatch,
			            "'" + *lit.str + "' is not a value of '" + v->name + "'",
			            lit.pos);
		return cnst(Rational(static_cast<long>(it - cats.begin())));
	}

	Node comparison()
	{
		Node lhs = additive();
		auto op = cmp_op(peek().kind);
		if (!op)
			return lhs;
		next();
		Node rhs = additive();
		if (cmp_op(peek().kind))
			fail("comparisons cannot be chained", peek().pos);
		Expr l, r;
		if (lhs.str)
			l = category(rhs, lhs, *op), r = rhs.e;
		else if (rhs.str)
			l = lhs.e, r = category(lhs, rhs, *op);
		else {
			auto is_set = [](const Node &n) {
				const auto *v = n.e ? n.e->get<ex::Var>() : nullptr;
				return v && v->sort == Sort::set;
			};
			if (is_set(lhs) && is_set(rhs) &&
			    (*op == CmpOp::eq || *op == CmpOp::ne))
				throw Error(Errc::sort_mismatch,
				            "comparing two categorical variables", lhs.pos);
			l = term(lhs);
			r = term(rhs);
		}
		if (!l || !r)
			fail("expected a term", lhs.pos);
		return { nullptr, cmp(*op, l, r), {}, lhs.pos };
	}

	Node additive()
	{
		Node lhs = multiplicative();
		while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
			bool minus = next().kind == Tok::minus;
			Node rhs = multiplicative();
			if (lhs.str || rhs.str)
				fail("string literal in arithmetic", lhs.str ? lhs.pos : rhs.pos);
			Expr a = term(lhs), b = term(rhs);
			if (minus)
				b = fold(neg(b));
			lhs.e = fold(add(a, b));
		}
		return lhs;
	}

	Node multiplicative()
	{
		Node lhs = unary();
		while (peek().kind == Tok::star || peek().kind == Tok::slash) {
			const Token &op = next();
			Node rhs = unary();
			if (lhs.str || rhs.str)
				fail("string literal in arithmetic", lhs.str ? lhs.pos : rhs.pos);
			Expr a = term(lhs), b = term(rhs);
			if (op.kind == Tok::star) {
				lhs.e = fold(mul(a, b));
				continue;
			}
			const Rational *d = const_value(b);
			if (!d)
				throw Error(Errc::division_by_non_constant,
				            "divisor must be a constant", rhs.pos);
			if (*d == 0)
				throw Error(Errc::division_by_non_constant,
				            "division by zero", rhs.pos);
			lhs.e = fold(mul(cnst(1 / *d), a));
		}
		return lhs;
	}

	Node unary()
	{
		size_t pos = peek().pos;
		if (accept(Tok::minus)) {
			Node n = unary();
			return { fold(neg(term(n))), nullptr, {}, pos };
		}
		return power();
	}

	Node power()
	{
		Node base = primary();
		if (peek().kind != Tok::starstar)
			return base;
		next();
		Node ex = unary();
		Expr b = term(base);
		Expr e = ex.e ? fold(ex.e) : nullptr;
		const Rational *n = e ? const_value(e) : nullptr;
		if (!n || !is_integer(*n) || *n < 0 || *n > 4096)
			throw Error(Errc::non_constant_exponent,
			            "exponent must be a natural number constant", ex.pos);
		return { fold(pow(b, static_cast<unsigned>(n->get_num().get_ui()))), nullptr, {}, base.pos };
	}

	Node primary()
	{
		const Token &t = next();
		switch (t.kind) {
		case Tok::number: {
			auto q = parse_rational(t.text);
			if (!q)
				fail("malformed number '" + t.text + "'", t.pos);
			return { cnst(*q), nullptr, {}, t.pos };
		}
		case Tok::ident: {
			if (peek().kind == Tok::lparen && !env_.count(t.text))
				return call(t);
			auto it = env_.find(t.text);
			if (it == env_.end())
				throw Error(Errc::undeclared_variable,
				            "undeclared variable '" + t.text + "'", t.pos);
			return { var(t.text, it->second.sort, it->second.categories),
			         nullptr, {}, t.pos };
		}
		case Tok::string:
			return { nullptr, nullptr, t.text, t.pos };
		case Tok::kw_true:
			return { nullptr, true_f(), {}, t.pos };
		case Tok::kw_false:
			return { nullptr, false_f(), {}, t.pos };
		case Tok::lparen: {
			Node n = or_expr();
			if (!accept(Tok::rparen))
				fail("expected ')'", peek().pos);
			n.pos = t.pos;
			return n;
		}
		case Tok::end:
			fail("unexpected end of input", t.pos);
		default:
			fail("unexpected '" + t.text + "'", t.pos);
		}
	}

	/* ite(c, a, b), max(a, b), min(a, b), abs(a), implies(f, g) */
	Node call(const Token &name)
	{
		next();
		std::vector<Node> args;
		if (peek().kind != Tok::rparen) {
			args.push_back(or_expr());
			while (peek().kind != Tok::rparen && peek().kind != Tok::end) {
				if (!accept(Tok::comma))
					fail("expected ',' or ')'", peek().pos);
				args.push_back(or_expr());
			}
		}
		if (!accept(Tok::rparen))
			fail("expected ')'", peek().pos);
		auto arity = [&](size_t n) {
			if (args.size() != n)
				fail("'" + name.text + "' takes " + std::to_string(n) + " arguments",
				     name.pos);
		};
		const std::string &f = name.text;
		if (f == "ite") {
			arity(3);
			return { ite(formula(args[0]), term(args[1]), term(args[2])), nullptr, {}, name.pos };
		}
		if (f == "max" || f == "min") {
			arity(2);
			Expr a = term(args[0]), b = term(args[1]);
			return { f == "max" ? max2(a, b) : min2(a, b), nullptr, {}, name.pos };
		}
		if (f == "abs") {
			arity(1);
			return { abs(term(args[0])), nullptr, {}, name.pos };
		}
		if (f == "implies") {
			arity(2);
			return { nullptr, implies(formula(args[0]), formula(args[1])), {}, name.pos };
		}
		throw Error(Errc::undeclared_variable, "unknown function '" + f + "'", name.pos);
	}

public:
	Parser(std::string_view text, const VarEnv &env)
	: toks_(lex(text))
	, env_(env)
	{}

	Node parse()
	{
		Node n = or_expr();
		if (peek().kind != Tok::end)
			fail("unexpected '" + peek().text + "'", peek().pos);
		return n;
	}

	Expr parse_term() { return term(parse()); }
	Formula parse_formula() { return formula(parse()); }
};

}

Expr parse_expr(std::string_view text, const VarEnv &env)
{
	return Parser(text, env).parse_term();
}

Formula parse_formula(std::string_view text, const VarEnv &env)
{
	return Parser(text, env).parse_formula();
}

}
