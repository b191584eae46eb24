/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#include "doctest.h"
#include "test_support.hh"

#include "gearbox/error.hh"
#include "gearbox/spec.hh"

#include <regex>

using namespace gearbox;
using gearbox::test::q;

namespace {

const std::string example = test::read_file("data/running_example_spec.json");

Errc spec_error(const std::string &text)
{
	try {
		parse_spec(text);
	} catch (const Error &e) {
		return e.code();
	}
	FAIL("expected an error");
	return Errc::usage;
}

Errc expr_error(const std::string &text, const VarEnv &env)
{
	try {
		parse_formula(text, env);
	} catch (const Error &e) {
		return e.code();
	}
	FAIL("expected an error");
	return Errc::usage;
}

std::string replace(std::string s, const std::string &from, const std::string &to)
{
	auto at = s.find(from);
	REQUIRE(at != std::string::npos);
	return s.replace(at, from.size(), to);
}

}

TEST_CASE("parse_spec: the example specification")
{
	ProblemSpec s = parse_spec(example);
	CHECK(s.version == "1.2");
	CHECK(s.warnings.empty());
	CHECK(s.variables.size() == 6);
	CHECK(s.assertions.size() == 3);
	CHECK(s.objectives.size() == 2);
	const VarDecl &p1 = s.at("p1");
	REQUIRE(p1.grid);
	CHECK(*p1.grid == std::vector<Rational> { 2, 4, 7 });
	CHECK(*p1.rad_rel == Rational(1, 10));
	CHECK(*s.at("p2").rad_abs == Rational(1, 5));
	CHECK(s.at("x2").type == Sort::integer);
	CHECK(s.at("x2").range->lo == -1);
	CHECK_FALSE(s.at("y1").range);

	Partition p = interface_partition(s);
	CHECK(p.knobs == std::vector<std::string> { "p1", "p2" });
	CHECK(p.inputs == std::vector<std::string> { "x1", "x2" });
	CHECK(p.outputs == std::vector<std::string> { "y1", "y2" });

	ThetaSpec ts = s.theta();
	CHECK(ts.of("p1").kind == RadiusKind::relative);
	CHECK(ts.of("p2").kind == RadiusKind::absolute);
	Box d = s.domain();
	CHECK(d.size() == 4);
	CHECK(d.at("p2").sort == Sort::integer);
	CHECK(s.grids().at("p1").size() == 3);
}

TEST_CASE("parse_spec: defaults")
{
	ProblemSpec s = parse_spec(
		R"({"version":"1.2","variables":[{"label":"y","interface":"output","type":"real"}]})");
	CHECK(s.variables.size() == 1);
	for (const Formula &f : { s.alpha, s.beta, s.eta }) {
		REQUIRE(f->get<fm::Bool>());
		CHECK(f->get<fm::Bool>()->value);
	}
	CHECK(s.assertions.empty());
	CHECK(s.objectives.empty());

	Partition p = interface_partition(s);
	CHECK(p.knobs.empty());
	CHECK(p.inputs.empty());
	CHECK(p.outputs == std::vector<std::string> { "y" });

	ProblemSpec k = parse_spec(R"({"version":"1.2","variables":[
		{"label":"p","interface":"knob","type":"real","range":[0,1]},
		{"label":"y","interface":"output","type":"real"}]})");
	Partition pk = interface_partition(k);
	CHECK(pk.knobs == std::vector<std::string> { "p" });
	CHECK(pk.inputs.empty());
	CHECK(pk.outputs == std::vector<std::string> { "y" });
}

TEST_CASE("parse_spec: version other than 1.2 warns")
{
	ProblemSpec s = parse_spec(
		R"({"version":"2.0","variables":[{"label":"y","interface":"output","type":"real"}]})");
	CHECK(s.warnings.size() == 1);
}

TEST_CASE("parse_spec: error cases")
{
	CHECK(spec_error(replace(example, R"("interface":"knob", "type":"real", "range":[0,10])",
	                         R"("interface":"knb", "type":"real", "range":[0,10])")) ==
	      Errc::unknown_interface);
	CHECK(spec_error("{\"version\": ") == Errc::malformed_json);
	CHECK(spec_error(replace(example, R"("type":"int", "range":[-1,1])",
	                         R"("type":"float", "range":[-1,1])")) == Errc::unknown_type);
	CHECK(spec_error(replace(example, R"("type":"int", "range":[-1,1])",
	                         R"("type":"int", "range":[-1,1], "rad-abs":1)")) ==
	      Errc::radius_on_non_knob);
	CHECK(spec_error(replace(example, R"("grid":[2,4,7])", R"("grid":[2,4,11])")) ==
	      Errc::grid_out_of_range);
	CHECK(spec_error(replace(example, R"("y1>=0")", R"("z>=0")")) == Errc::undeclared_variable);
	CHECK(spec_error(replace(example, R"("rad-abs":0.2)", R"("rad-abs":0.2, "rad-rel":0.1)")) ==
	      Errc::invalid_spec);
	CHECK(spec_error(replace(example, R"("type":"real", "range":[0,10]})",
	                         R"("type":"real"})")) == Errc::invalid_spec);
	CHECK(spec_error(replace(example, R"("eta": "p1==4)", R"("eta": "x1==4)")) ==
	      Errc::invalid_spec);
	CHECK(spec_error(R"({"version":"1.2","variables":[
		{"label":"p","interface":"knob","type":"real","range":[0,1]}]})") == Errc::invalid_spec);
}

TEST_CASE("parse_expr: structure and precedence")
{
	VarEnv env = parse_spec(example).env();
	Formula eta = parse_formula("p1==4 or (p1==8 and p2 > 3)", env);
	Expr p1 = var("p1"), p2 = var("p2", Sort::integer);
	Formula want = disj({ eq(p1, cnst(4)), conj({ eq(p1, cnst(8)), gt(p2, cnst(3)) }) });
	CHECK(equal(eta, want));

	Expr obj = parse_expr("(y1+y2)/2", env);
	CHECK(equal(obj, mul(cnst(Rational(1, 2)), add(var("y1"), var("y2")))));

	CHECK(eval(parse_expr("y2**3", env), { { "y2", 2 } }) == 8);
	/* ** binds tighter than unary minus */
	CHECK(eval(parse_expr("-y1**2", env), { { "y1", 3 } }) == -9);
	CHECK(eval(parse_expr("2*y1+3*y2", env), { { "y1", 1 }, { "y2", 2 } }) == 8);
	CHECK(eval(parse_expr("y1-y2-1", env), { { "y1", 5 }, { "y2", 2 } }) == 2);
	CHECK(eval(parse_formula("not y1 > 2 and y1 > 0", env), { { "y1", 1 } }));
	CHECK(eval(parse_formula("y1 > 0 or y1 < -5 and y1 > -10", env), { { "y1", 1 } }));
	CHECK(equal(parse_expr("0.5 * y1", env), parse_expr("y1 / 2 * 1", env)) == false);
	CHECK(equal(parse_expr("1/2", env), cnst(Rational(1, 2))));
}

TEST_CASE("parse_expr: errors")
{
	VarEnv env = parse_spec(example).env();
	CHECK(expr_error("y1 >= ", env) == Errc::syntax_error);
	CHECK(expr_error("y1 ** y2 > 0", env) == Errc::non_constant_exponent);
	CHECK(expr_error("y1 ** 0.5 > 0", env) == Errc::non_constant_exponent);
	CHECK(expr_error("y1 / y2 > 0", env) == Errc::division_by_non_constant);
	CHECK(expr_error("y1 / (2-2) > 0", env) == Errc::division_by_non_constant);
	CHECK(expr_error("w > 0", env) == Errc::undeclared_variable);
	CHECK(expr_error("1 < y1 < 2", env) == Errc::syntax_error);
	CHECK(expr_error("y1 and y2", env) == Errc::syntax_error);
	try {
		parse_formula("y1 >= 2 $", env);
	} catch (const Error &e) {
		CHECK(e.code() == Errc::syntax_error);
		CHECK(e.position() == 8);
	}
}

TEST_CASE("categorical variables compare against their values")
{
	ProblemSpec s = parse_spec(R"({"version":"1.2","variables":[
		{"label":"m","interface":"knob","type":"set","range":["slow","fast"]},
		{"label":"y","interface":"output","type":"real"}],
		"eta":"m == \"fast\""})");
	CHECK(eval(s.eta, { { "m", 1 } }));
	CHECK_FALSE(eval(s.eta, { { "m", 0 } }));
	CHECK(to_string(s.eta) == "m == \"fast\"");
	VarEnv env = s.env();
	CHECK(expr_error("m == \"medium\"", env) == Errc::sort_mismatch);
	CHECK(expr_error("m < 1", env) == Errc::sort_mismatch);
	CHECK(expr_error("m + 1 > 0", env) == Errc::sort_mismatch);
	CHECK(s.domain().at("m").values.size() == 2);
}

TEST_CASE("round trip: serialize then parse gives the same spec")
{
	ProblemSpec s = parse_spec(example);
	std::string text = serialize(s);
	ProblemSpec t = parse_spec(text);
	CHECK(equal(s, t));
	CHECK(serialize(t) == text);
}

TEST_CASE("property: printed random formulas reparse to the same tree")
{
	VarEnv env { { "a", {} }, { "b", {} } };
	test::TermGen gen(23, { var("a"), var("b") });
	int reparsed = 0;
	for (int i = 0; i < 300; i++) {
		Formula f = gen.formula(3);
		std::string s = to_string(f);
		if (s.find("ite(") != std::string::npos || s.find("max(") != std::string::npos ||
		    s.find("min(") != std::string::npos || s.find('/') != std::string::npos)
			continue;
		Formula g = parse_formula(s, env);
		CHECK_MESSAGE(eval(f, { { "a", 1 }, { "b", q("-0.5") } }) ==
		              eval(g, { { "a", 1 }, { "b", q("-0.5") } }), s);
		Formula h = parse_formula(to_string(g), env);
		CHECK_MESSAGE(equal(g, h), s);
		reparsed++;
	}
	CHECK(reparsed > 30);
}

TEST_CASE("every expression string of the example spec evaluates at any total point")
{
	ProblemSpec s = parse_spec(example);
	std::mt19937_64 rng(1);
	for (int i = 0; i < 100; i++) {
		Assignment a { { "y1", test::random_rational(rng, -10, 10) },
		               { "y2", test::random_rational(rng, -10, 10) },
		               { "x1", test::random_rational(rng, 0, 10) },
		               { "x2", Rational(static_cast<long>(rng() % 3) - 1) },
		               { "p1", test::random_rational(rng, 0, 10) },
		               { "p2", Rational(static_cast<long>(rng() % 5) + 3) } };
		CHECK_NOTHROW(eval(s.alpha, a));
		CHECK_NOTHROW(eval(s.beta, a));
		CHECK_NOTHROW(eval(s.eta, a));
		for (const auto &[_, f] : s.assertions)
			CHECK_NOTHROW(eval(f, a));
		for (const auto &[_, e] : s.objectives)
			CHECK_NOTHROW(eval(e, a));
	}
}
