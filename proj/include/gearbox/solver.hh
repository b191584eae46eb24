/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#pragma once

#include "interval.hh"

#include <map>
#include <string>
#include <vector>

namespace gearbox {

/* A quantifier-free satisfiability query. Every free variable of formula
 * must have a domain in box; variables listed in grids are further
 * restricted to the given values. */
struct SolverQuery {
	Formula formula;
	Box box;
	std::map<std::string, std::vector<Rational>> grids;
};

enum class Status { sat, unsat, unknown };
const char *status_name(Status s);

struct Verdict {
	Status status = Status::unknown;
	Assignment witness; /* sat only; covers every variable of the box */
	std::string reason; /* unknown only */

	static Verdict sat(Assignment w) { return { Status::sat, std::move(w), {} }; }
	static Verdict unsat() { return { Status::unsat, {}, {} }; }
	static Verdict unknown(std::string why) { return { Status::unknown, {}, std::move(why) }; }
};

enum class Backend { builtin, external };

struct SolverConfig {
	Backend backend = Backend::builtin;
	std::string command = "z3";          /* external only */
	std::vector<std::string> args { "-in" };
	Rational delta { 1, 2000 };
	double timeout = 60;                  /* seconds per query */
	unsigned long seed = 0;
	size_t max_boxes = 4000000;           /* builtin only */
};

struct SolverStats {
	size_t queries = 0, sat = 0, unsat = 0, unknown = 0;
	size_t boxes = 0; /* builtin only */
	double seconds = 0;
};

/* The delta-decision contract: a sat witness satisfies the formula with
 * every comparison relaxed by delta (a <= b + delta, |a - b| <= delta for
 * equalities; disequalities and the conditions inside Ite terms exactly);
 * unsat means the formula has no exact solution in the box; unknown is
 * only returned on timeout, work limits or backend failure. */
Verdict check_sat(const SolverQuery &q, const SolverConfig &cfg, SolverStats *stats = nullptr);

/* Branch and prune over the box: finite and integer dimensions are
 * enumerated by splitting, real dimensions bisected down to delta/4.
 * Boxes where interval evaluation refutes the formula are dropped; a box is
 * sat when a sample point satisfies the formula exactly, or when it is at
 * the width floor and its midpoint satisfies the relaxed formula. */
Verdict builtin_solve(const SolverQuery &q, const SolverConfig &cfg, SolverStats *stats = nullptr);

/* One child process per query; the script from emit_smtlib() goes to its
 * stdin and the answer to (check-sat)/(get-value) is read from stdout.
 * Throws Error(backend_launch_failure) if the command cannot be started
 * and Error(protocol_error) on unparseable output. */
Verdict external_solve(const SolverQuery &q, const SolverConfig &cfg, SolverStats *stats = nullptr);

/* Deterministic SMT-LIB2 script for q. */
std::string emit_smtlib(const SolverQuery &q);

/* Quotes a name as |name| unless it is a simple SMT-LIB2 symbol. */
std::string smt_symbol(const std::string &name);

/* Parses the value part of a get-value answer: numerals, decimals,
 * (- v) and (/ a b). Returns nothing for anything else (e.g. algebraic
 * numbers). */
std::optional<Rational> parse_smt_value(std::string_view sexpr);

}
