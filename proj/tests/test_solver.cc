/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#include "doctest.h"
#include "golden_queries.hh"
#include "test_support.hh"

#include "gearbox/error.hh"
#include "gearbox/solver.hh"
#include "gearbox/spec.hh"

#include <cstdlib>
#include <fstream>
#include <unistd.h>

using namespace gearbox;
using gearbox::test::q;

namespace {

SolverConfig with_delta(Rational d)
{
	SolverConfig cfg;
	cfg.delta = d;
	return cfg;
}

bool have_z3()
{
	return access("/usr/local/bin/z3", X_OK) == 0 || std::system("command -v z3 >/dev/null 2>&1") == 0;
}

SolverConfig z3_config()
{
	SolverConfig cfg;
	cfg.backend = Backend::external;
	cfg.timeout = 20;
	return cfg;
}

Errc external_error(const SolverConfig &cfg)
{
	SolverQuery qq { ge(var("x"), cnst(0)), { { "x", VarDomain::real(0, 1) } }, {} };
	try {
		external_solve(qq, cfg);
	} catch (const Error &e) {
		return e.code();
	}
	FAIL("expected an error");
	return Errc::usage;
}

bool in_box(const Assignment &w, const Box &box)
{
	for (const auto &[name, d] : box)
		if (!w.count(name) || !d.contains(w.at(name)))
			return false;
	return true;
}

}

TEST_CASE("check_sat: examples")
{
	SolverQuery a { eq(var("x"), cnst(4)), { { "x", VarDomain::real(0, 10) } }, {} };
	Verdict v = check_sat(a, SolverConfig {});
	REQUIRE(v.status == Status::sat);
	CHECK(v.witness.at("x") == 4);

	SolverQuery b { ge(var("x"), cnst(2)), { { "x", VarDomain::real(0, 1) } }, {} };
	CHECK(check_sat(b, SolverConfig {}).status == Status::unsat);

	/* eta of the running example under the knob grid */
	ProblemSpec s = parse_spec(test::read_file("data/running_example_spec.json"));
	Box box;
	for (const char *k : { "p1", "p2" })
		box.emplace(k, s.domain().at(k));
	SolverQuery c { s.eta, box, s.grids() };
	v = check_sat(c, SolverConfig {});
	REQUIRE(v.status == Status::sat);
	CHECK(v.witness.at("p1") == 4);
	CHECK(box.at("p2").contains(v.witness.at("p2")));
}

TEST_CASE("builtin: delta-sat witnesses for irrational roots")
{
	Expr x = var("x");
	for (Rational d : { q("0.01"), q("0.001") }) {
		SolverQuery sq { eq(pow(x, 2), cnst(2)), { { "x", VarDomain::real(0, 2) } }, {} };
		Verdict v = builtin_solve(sq, with_delta(d));
		REQUIRE(v.status == Status::sat);
		Rational r = v.witness.at("x") * v.witness.at("x") - 2;
		CHECK(gearbox::abs(r) <= d);
	}
}

TEST_CASE("builtin: refutations")
{
	Expr x = var("x");
	SolverStats st;
	SolverQuery a { ge(x, cnst(q("1.5"))), { { "x", VarDomain::real(0, 1) } }, {} };
	CHECK(builtin_solve(a, SolverConfig {}, &st).status == Status::unsat);
	CHECK(st.boxes == 1);
	CHECK(st.unsat == 1);

	SolverQuery b { eq(x, add(x, cnst(1))), { { "x", VarDomain::real(-100, 100) } }, {} };
	CHECK(builtin_solve(b, SolverConfig {}).status == Status::unsat);

	/* unsat only through the integer sort */
	Expr n = var("n", Sort::integer);
	SolverQuery c { conj({ gt(n, cnst(q("0.2"))), lt(n, cnst(q("0.8"))) }),
	                { { "n", VarDomain::integer(-5, 5) } }, {} };
	CHECK(builtin_solve(c, SolverConfig {}).status == Status::unsat);

	/* disequalities are exact */
	SolverQuery d { ne(n, cnst(1)), { { "n", VarDomain::list(Sort::integer, { 1 }) } }, {} };
	CHECK(builtin_solve(d, SolverConfig {}).status == Status::unsat);

	SolverQuery e { false_f(), { { "x", VarDomain::real(0, 1) } }, {} };
	CHECK(builtin_solve(e, SolverConfig {}).status == Status::unsat);
}

TEST_CASE("builtin: grids and limits")
{
	Expr x = var("x"), y = var("y");
	SolverQuery g { gt(x, cnst(3)), { { "x", VarDomain::real(0, 10) } }, { { "x", { 1, 2, 3 } } } };
	CHECK(builtin_solve(g, SolverConfig {}).status == Status::unsat);
	g.grids["x"].push_back(q("3.5"));
	Verdict v = builtin_solve(g, SolverConfig {});
	REQUIRE(v.status == Status::sat);
	CHECK(v.witness.at("x") == q("3.5"));

	/* a thin unsat sliver needs more boxes than allowed */
	SolverConfig tight;
	tight.max_boxes = 10;
	SolverQuery u { conj({ eq(mul(x, y), cnst(1)), ge(add(x, y), cnst(q("1.99"))),
	                       le(add(x, y), cnst(q("1.995"))) }),
	                { { "x", VarDomain::real(-3, 3) }, { "y", VarDomain::real(-3, 3) } }, {} };
	v = builtin_solve(u, tight);
	CHECK(v.status == Status::unknown);
	CHECK_FALSE(v.reason.empty());
}

TEST_CASE("property: sat witnesses re-check, unsat is never refuted by dense sampling")
{
	Expr x = var("x"), n = var("n", Sort::integer);
	test::TermGen gen(99, { x, n });
	Box box { { "x", VarDomain::real(-3, 3) }, { "n", VarDomain::integer(-2, 2) } };
	Rational delta = q("0.1"), step = delta / 10;
	SolverConfig cfg = with_delta(delta);
	cfg.timeout = 10;
	int sat = 0, unsat = 0;
	for (int i = 0; i < 150; i++) {
		Formula f = gen.formula(3);
		SolverQuery sq { f, box, {} };
		Verdict v = builtin_solve(sq, cfg);
		if (v.status == Status::sat) {
			sat++;
			CHECK(in_box(v.witness, box));
			CHECK_MESSAGE(eval_relaxed(to_nnf(f), v.witness, delta), to_string(f));
		} else if (v.status == Status::unsat) {
			unsat++;
			bool found = false;
			for (Rational xv = -3; xv <= 3 && !found; xv += step)
				for (long nv = -2; nv <= 2 && !found; nv++)
					found = eval(f, { { "x", xv }, { "n", nv } });
			CHECK_MESSAGE(!found, to_string(f));
		}
	}
	CHECK(sat >= 20);
	CHECK(unsat >= 10);
}

TEST_CASE("emit_smtlib: examples")
{
	Expr x = var("x"), n = var("n", Sort::integer);
	std::string s = emit_smtlib({ le(x, cnst(q("2.5"))), { { "x", VarDomain::real(-1, 3) } }, {} });
	CHECK(s == "(set-logic QF_LRA)\n"
	           "(declare-const x Real)\n"
	           "(assert (<= (- 1) x))\n"
	           "(assert (<= x 3))\n"
	           "(assert (<= x (/ 5 2)))\n"
	           "(check-sat)\n"
	           "(get-value (x))\n"
	           "(exit)\n");
	s = emit_smtlib({ eq(mul(n, n), cnst(4)), { { "n", VarDomain::integer(0, 3) } }, {} });
	CHECK(s.find("(set-logic QF_NIA)") == 0);
	CHECK(s.find("(assert (= (* n n) 4))") != std::string::npos);
	s = emit_smtlib({ lt(x, n), { { "x", VarDomain::real(0, 1) }, { "n", VarDomain::integer(0, 2) } }, {} });
	CHECK(s.find("QF_LIRA") != std::string::npos);
	CHECK(s.find("(< x (to_real n))") != std::string::npos);
	CHECK(smt_symbol("x1") == "x1");
	CHECK(smt_symbol("odd name") == "|odd name|");
	CHECK(smt_symbol("#h0.1") == "|#h0.1|");
	CHECK(smt_symbol("1x") == "|1x|");
}

TEST_CASE("emit_smtlib: golden files")
{
	bool update = std::getenv("GEARBOX_UPDATE_GOLDEN") != nullptr;
	for (const auto &[name, sq] : test::golden_queries()) {
		std::string path = "golden/" + name + ".smt2";
		std::string text = emit_smtlib(sq);
		if (update) {
			std::ofstream(path) << text;
			continue;
		}
		CHECK_MESSAGE(text == test::read_file(path), name);
	}
}

TEST_CASE("parse_smt_value")
{
	CHECK(parse_smt_value("3") == Rational(3));
	CHECK(parse_smt_value("2.5") == q("2.5"));
	CHECK(parse_smt_value("(- 7)") == Rational(-7));
	CHECK(parse_smt_value("(/ 1 3)") == Rational(1, 3));
	CHECK(parse_smt_value("(- (/ 4 6))") == Rational(-2, 3));
	CHECK(parse_smt_value("(/ (- 1) 2.0)") == Rational(-1, 2));
	CHECK_FALSE(parse_smt_value("(root-obj (+ (^ x 2) (- 2)) 1)"));
	CHECK_FALSE(parse_smt_value("(/ 1 0)"));
	CHECK_FALSE(parse_smt_value("foo"));
	CHECK_FALSE(parse_smt_value("(- 1"));
	CHECK_FALSE(parse_smt_value("1 2"));
}

TEST_CASE("external: launch and protocol failures")
{
	SolverConfig missing;
	missing.backend = Backend::external;
	missing.command = "/nonexistent/gearbox-no-such-solver";
	CHECK(external_error(missing) == Errc::backend_launch_failure);

	SolverConfig bogus;
	bogus.backend = Backend::external;
	bogus.command = "sh";
	bogus.args = { "-c", "echo bogus" };
	CHECK(external_error(bogus) == Errc::protocol_error);

	bogus.args = { "-c", "cat >/dev/null; echo sat; echo '((x'" };
	CHECK(external_error(bogus) == Errc::protocol_error);

	bogus.args = { "-c", "cat >/dev/null; echo sat; echo '((x (root-obj (+ (^ x 2) (- 2)) 1)))'" };
	SolverQuery sq { ge(var("x"), cnst(0)), { { "x", VarDomain::real(0, 1) } }, {} };
	Verdict v = external_solve(sq, bogus);
	CHECK(v.status == Status::unknown);

	bogus.args = { "-c", "cat >/dev/null; sleep 5" };
	bogus.timeout = 0.3;
	v = external_solve(sq, bogus);
	CHECK(v.status == Status::unknown);
	CHECK(v.reason == "timeout");
}

TEST_CASE("external: z3 smoke test")
{
	if (!have_z3()) {
		MESSAGE("z3 not found; skipped");
		return;
	}
	SolverQuery sq { eq(var("x"), cnst(q("0.25"))), { { "x", VarDomain::real(0, 1) } }, {} };
	Verdict v = external_solve(sq, z3_config());
	REQUIRE(v.status == Status::sat);
	CHECK(v.witness.at("x") == q("0.25"));
	for (const auto &[name, g] : test::golden_queries()) {
		Verdict e = external_solve(g, z3_config());
		/* the only model of x*x = 2 is algebraic */
		if (name == "nonlinear_real")
			CHECK(e.reason.find("non-rational") != std::string::npos);
		else
			CHECK_MESSAGE(e.status != Status::unknown, name);
		if (e.status == Status::sat)
			CHECK_MESSAGE(eval(g.formula, e.witness), name);
	}
}

TEST_CASE("property: builtin agrees with z3")
{
	if (!have_z3()) {
		MESSAGE("z3 not found; skipped");
		return;
	}
	Expr x = var("x"), y = var("y"), n = var("n", Sort::integer);
	test::TermGen gen(2024, { x, y, n });
	Box box { { "x", VarDomain::real(-2, 2) }, { "y", VarDomain::real(-2, 2) },
	          { "n", VarDomain::integer(-2, 2) } };
	Rational delta { 1, 1000 };
	SolverConfig cfg = with_delta(delta);
	cfg.timeout = 10;
	int compared = 0, agreed = 0;
	for (int i = 0; i < 80; i++) {
		SolverQuery sq { gen.formula(2), box, {} };
		Verdict ext = external_solve(sq, z3_config());
		Verdict own = builtin_solve(sq, cfg);
		if (ext.status == Status::sat)
			CHECK_MESSAGE(eval(sq.formula, ext.witness), to_string(sq.formula));
		if (own.status == Status::sat)
			CHECK(eval_relaxed(to_nnf(sq.formula), own.witness, delta));
		if (ext.status == Status::unknown || own.status == Status::unknown)
			continue;
		compared++;
		/* an exact model contradicts a refutation; the converse is allowed by
		 * the delta relaxation */
		CHECK_MESSAGE(!(own.status == Status::unsat && ext.status == Status::sat),
		              to_string(sq.formula));
		agreed += own.status == ext.status;
	}
	CHECK(compared >= 50);
	CHECK(agreed >= compared * 9 / 10);
}
