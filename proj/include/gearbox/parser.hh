/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#pragma once

#include "expr.hh"

#include <map>
#include <string>
#include <string_view>

namespace gearbox {

struct VarInfo {
	Sort sort = Sort::real;
	Categories categories;
};

using VarEnv = std::map<std::string, VarInfo>;

/* Infix expression syntax, loosest to tightest binding:
 *
 *   or  <  and  <  not  <  < <= > >= == !=  <  + -  <  * /  <  unary -  <  **
 *
 * Numeric literals are exact decimals ("0.25", "1e-3"). The exponent of **
 * must be a natural constant and the divisor of / a nonzero constant;
 * e / c is normalized to (1/c)*e. Constant subterms are folded. Categorical
 * variables may only be compared with == or != against a category quoted
 * with " or '. Atoms also include true, false and the calls ite(c, t, e),
 * max(a, b), min(a, b), abs(a) and implies(a, b).
 *
 * Errors: Error(syntax_error) with the offending offset, undeclared_variable,
 * non_constant_exponent, division_by_non_constant, sort_mismatch. */
Expr parse_expr(std::string_view text, const VarEnv &env);
Formula parse_formula(std::string_view text, const VarEnv &env);

}
