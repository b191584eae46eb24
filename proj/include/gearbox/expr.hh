/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#pragma once

#include "rational.hh"

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace gearbox {

/* Term and formula IR.
 *
 * Nodes are immutable and shared; every transformation returns a new tree
 * and leaves its argument untouched. Constants are exact rationals. Values of
 * set-sorted (categorical) variables are represented by their index into the
 * variable's category list, so a single numeric assignment type covers all
 * sorts. */

enum class Sort { real, integer, set };

const char *sort_name(Sort s);

enum class CmpOp { lt, le, eq, ne, ge, gt };

const char *cmp_name(CmpOp op);
CmpOp negate(CmpOp op);  /* !(a op b) == a negate(op) b */
CmpOp flip(CmpOp op);    /* (a op b) == b flip(op) a */

struct ExprNode;
struct FormulaNode;
using Expr = std::shared_ptr<const ExprNode>;
using Formula = std::shared_ptr<const FormulaNode>;
using Categories = std::shared_ptr<const std::vector<std::string>>;

namespace ex {
struct Const { Rational value; };
struct Var {
	std::string name;
	Sort sort;
	Categories categories; /* only for Sort::set */
};
struct Add { Expr lhs, rhs; };
struct Mul { Expr lhs, rhs; };
struct Neg { Expr arg; };
struct Pow { Expr base; unsigned exponent; };
struct LinDiv { Expr arg; Rational divisor; };
struct Ite { Formula cond; Expr then_expr, else_expr; };
struct Max2 { Expr lhs, rhs; };
struct Min2 { Expr lhs, rhs; };
}

struct ExprNode {
	std::variant<ex::Const, ex::Var, ex::Add, ex::Mul, ex::Neg, ex::Pow,
	             ex::LinDiv, ex::Ite, ex::Max2, ex::Min2> node;

	template <typename T> const T *get() const { return std::get_if<T>(&node); }
};

namespace fm {
struct Bool { bool value; };
struct Cmp { CmpOp op; Expr lhs, rhs; };
struct And { std::vector<Formula> args; };
struct Or { std::vector<Formula> args; };
struct Not { Formula arg; };
struct Implies { Formula lhs, rhs; };
}

struct FormulaNode {
	std::variant<fm::Bool, fm::Cmp, fm::And, fm::Or, fm::Not, fm::Implies> node;

	template <typename T> const T *get() const { return std::get_if<T>(&node); }
};

/* ---- construction ---- */

Expr cnst(Rational v);
Expr var(std::string name, Sort sort = Sort::real, Categories cats = nullptr);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr neg(Expr a);
Expr pow(Expr base, unsigned exponent);
Expr lindiv(Expr a, Rational divisor);
Expr ite(Formula c, Expr t, Expr e);
Expr max2(Expr a, Expr b);
Expr min2(Expr a, Expr b);
Expr abs(Expr a);

Formula true_f();
Formula false_f();
Formula boolean(bool b);
Formula cmp(CmpOp op, Expr a, Expr b);
Formula lt(Expr a, Expr b);
Formula le(Expr a, Expr b);
Formula eq(Expr a, Expr b);
Formula ne(Expr a, Expr b);
Formula ge(Expr a, Expr b);
Formula gt(Expr a, Expr b);
Formula conj(std::vector<Formula> args);
Formula disj(std::vector<Formula> args);
Formula lnot(Formula a);
Formula implies(Formula a, Formula b);

/* ---- queries ---- */

using Assignment = std::map<std::string, Rational>;
using Substitution = std::map<std::string, Expr>;
using VarSorts = std::map<std::string, Sort>;

/* Exact evaluation; throws Error(sort_mismatch) if an integer or set
 * variable is assigned a non-integral value and Error(unbound_variable) if a
 * free variable is missing from the assignment. */
Rational eval(const Expr &e, const Assignment &a);
bool eval(const Formula &f, const Assignment &a);

/* Evaluation of a formula in negation normal form with every comparison
 * relaxed by delta: a <= b holds iff a <= b + delta, a = b iff |a-b| <= delta.
 * Disequalities and the conditions of Ite terms are evaluated exactly. */
bool eval_relaxed(const Formula &nnf, const Assignment &a, const Rational &delta);

Expr substitute(const Expr &e, const Substitution &s);
Formula substitute(const Formula &f, const Substitution &s);

/* Constant folding; no other simplification. */
Expr fold(const Expr &e);
Formula fold(const Formula &f);

Formula to_nnf(const Formula &f);

void collect_vars(const Expr &e, VarSorts &out);
void collect_vars(const Formula &f, VarSorts &out);
VarSorts free_vars(const Expr &e);
VarSorts free_vars(const Formula &f);

bool is_linear(const Expr &e);
bool is_linear(const Formula &f);

bool equal(const Expr &a, const Expr &b);
bool equal(const Formula &a, const Formula &b);

/* Infix rendering in the same syntax parse_expr()/parse_formula() accept. */
std::string to_string(const Expr &e);
std::string to_string(const Formula &f);

/* Top-level conjuncts of f (And nodes flattened recursively). */
std::vector<Formula> conjuncts(const Formula &f);

}
