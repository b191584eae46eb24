/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#include "doctest.h"
#include "test_problems.hh"

#include "gearbox/csv.hh"
#include "gearbox/doe.hh"
#include "gearbox/error.hh"

#include <set>

using namespace gearbox;
using gearbox::test::q;

namespace {

ProblemSpec example()
{
	return parse_spec(test::read_file("data/running_example_spec.json"));
}

/* every value inside its declared range, grid or category list */
void check_rows(const Design &d, const ProblemSpec &spec)
{
	auto grids = spec.grids();
	for (const auto &row : d.rows) {
		REQUIRE(row.size() == d.columns.size());
		for (size_t i = 0; i < row.size(); i++) {
			const VarDecl &v = spec.at(d.columns[i]);
			const Rational &x = row[i];
			if (v.type == Sort::set) {
				CHECK(is_integer(x));
				CHECK(x >= 0);
				CHECK(x < static_cast<long>(v.categories.size()));
				continue;
			}
			CHECK(x >= v.range->lo);
			CHECK(x <= v.range->hi);
			if (v.type == Sort::integer)
				CHECK(is_integer(x));
			if (grids.count(v.label)) {
				const auto &g = grids.at(v.label);
				CHECK(std::find(g.begin(), g.end(), x) != g.end());
			}
		}
	}
}

const char *mixed = R"({"version":"1.2","variables":[
  {"label":"p","interface":"knob","type":"real","range":[0,10],"rad-abs":0.5},
  {"label":"k","interface":"knob","type":"int","range":[-2,2],"rad-abs":1},
  {"label":"c","interface":"knob","type":"set","range":["red","green, blue","\"x\""]},
  {"label":"x","interface":"input","type":"real","range":[0,1]},
  {"label":"y","interface":"output","type":"real"}],
  "alpha":"x <= 1/2 and k >= -1"})";

ModelArtifact mixed_model(const ProblemSpec &s)
{
	return test::expression_model(s, { { "y", "p + x + k" } });
}

}

TEST_CASE("doe: full factorial over the running example knobs")
{
	ProblemSpec s = example();
	Design d = doe_generate(s, DoeMethod::full_factorial, 0, 1, { "p1", "p2" });
	check_rows(d, s);
	CHECK(d.rows.size() == 15);
	std::set<std::vector<Rational>> expect, got(d.rows.begin(), d.rows.end());
	for (int a : { 2, 4, 7 })
		for (int b = 3; b <= 7; b++)
			expect.insert({ Rational(a), Rational(b) });
	CHECK(got == expect);
	CHECK(d.rows.front() == std::vector<Rational> { 2, 3 });
	CHECK(d.rows.back() == std::vector<Rational> { 7, 7 });

	/* x2 is an int input: 3 values */
	CHECK(doe_generate(s, DoeMethod::full_factorial, 0, 1, { "p1", "p2", "x2" }).rows.size() == 45);
	try {
		doe_generate(s, DoeMethod::full_factorial, 0, 1);
		FAIL("expected an error");
	} catch (const Error &e) {
		CHECK(e.code() == Errc::ungridded_factorial_dimension);
		CHECK(std::string(e.what()).find("x1") != std::string::npos);
	}
	CHECK_THROWS_AS(doe_generate(s, DoeMethod::full_factorial, 0, 1, { "y1" }), Error);
	CHECK_THROWS_AS(doe_generate(s, DoeMethod::full_factorial, 0, 1, { "nope" }), Error);
	CHECK_THROWS_AS(doe_generate(s, DoeMethod::full_factorial, 0, 1, { "p2", "p2" }), Error);
}

TEST_CASE("doe: latin hypercube stratification")
{
	ProblemSpec s = example();
	for (size_t n : { 1, 5, 10, 50, 73 }) {
		Design d = doe_generate(s, DoeMethod::latin_hypercube, n, 42);
		CHECK(d.rows.size() == n);
		check_rows(d, s);
		size_t col = std::find(d.columns.begin(), d.columns.end(), "x1") - d.columns.begin();
		REQUIRE(col < d.columns.size());
		std::vector<int> hits(n, 0);
		for (const auto &row : d.rows) {
			/* stratum [10 j / n, 10 (j + 1) / n) */
			Rational j = floor(row[col] * static_cast<long>(n) / 10);
			REQUIRE(j >= 0);
			REQUIRE(j < static_cast<long>(n));
			hits[j.get_num().get_ui()]++;
		}
		for (int h : hits)
			CHECK(h == 1);
	}
	/* discrete columns are balanced: 15 rows over the 5 values of p2 */
	Design d = doe_generate(s, DoeMethod::latin_hypercube, 15, 3, { "p2" });
	std::map<Rational, int> count;
	for (const auto &row : d.rows)
		count[row[0]]++;
	CHECK(count.size() == 5);
	for (const auto &[_, c] : count)
		CHECK(c == 3);
	CHECK_THROWS_AS(doe_generate(s, DoeMethod::latin_hypercube, 0, 3), Error);
}

TEST_CASE("doe: uniform designs and determinism")
{
	ProblemSpec s = parse_spec(mixed);
	for (DoeMethod m : { DoeMethod::uniform_random, DoeMethod::latin_hypercube }) {
		Design a = doe_generate(s, m, 200, 9), b = doe_generate(s, m, 200, 9);
		Design c = doe_generate(s, m, 200, 10);
		check_rows(a, s);
		CHECK(a.rows.size() == 200);
		CHECK(design_csv(a, s) == design_csv(b, s));
		CHECK(design_csv(a, s) != design_csv(c, s));
		std::set<Rational> cats;
		for (const auto &row : a.rows)
			cats.insert(row[2]);
		CHECK(cats.size() == 3);
	}
	CHECK(doe_method_name(*parse_doe_method("latin_hypercube")) == std::string("latin_hypercube"));
	CHECK_FALSE(parse_doe_method("box_behnken"));
}

TEST_CASE("doe: csv output")
{
	ProblemSpec s = parse_spec(mixed);
	Design d = doe_generate(s, DoeMethod::full_factorial, 0, 0, { "c", "k" });
	CHECK(d.rows.size() == 15);
	std::string csv = design_csv(d, s);
	CHECK(csv.rfind("c,k\r\nred,-2\r\n", 0) == 0);
	CHECK(csv.find("\"green, blue\",0\r\n") != std::string::npos);
	CHECK(csv.find("\"\"\"x\"\"\",2\r\n") != std::string::npos);
	auto row = csv_parse_row("\"green, blue\",0");
	REQUIRE(row);
	CHECK(*row == std::vector<std::string> { "green, blue", "0" });
}

TEST_CASE("refine: self-consistent and offset oracles")
{
	ProblemSpec s = parse_spec(mixed);
	ModelArtifact m = mixed_model(s);
	Assignment center { { "p", q("9.8") }, { "k", 0 }, { "c", 1 } };
	RefineConfig cfg;
	cfg.n = 60;
	cfg.seed = 5;
	cfg.tau = Rational(1, 1000000000);

	SystemOracle same;
	same.exprs = { { "y", parse_expr("p + x + k", s.env()) } };
	RefinementReport r = refine_region(center, s, m, same, s.theta(), cfg);
	CHECK(r.samples.size() == 60);
	CHECK(r.adequate);
	CHECK(r.max_discrepancy == std::vector<Rational> { 0 });
	CHECK(r.attempts >= 60);
	CHECK(r.region.at("p").lo == q("9.3"));
	CHECK(r.region.at("p").hi == 10);

	/* every sample lies in the theta region and satisfies alpha */
	Partition part = interface_partition(s);
	Substitution c, shadow;
	for (const std::string &k : part.knobs) {
		c[k] = cnst(center.at(k));
		shadow[k] = s.variable(k);
	}
	Formula ball = theta_formula(part.knobs, c, shadow, s.theta());
	for (const RefineSample &x : r.samples) {
		CHECK(eval(ball, x.point));
		CHECK(eval(s.alpha, x.point));
		CHECK(x.point.at("c") == 1);
		CHECK(x.point.at("p") >= q("9.3"));
		CHECK(x.point.at("p") <= 10);
		CHECK(x.model.at("y") == x.point.at("p") + x.point.at("x") + x.point.at("k"));
	}

	SystemOracle plus;
	plus.exprs = { { "y", parse_expr("p + x + k + 1", s.env()) } };
	RefinementReport o = refine_region(center, s, m, plus, s.theta(), cfg);
	CHECK(o.max_discrepancy == std::vector<Rational> { 1 });
	CHECK_FALSE(o.adequate);
	cfg.tau = 1;
	CHECK(refine_region(center, s, m, plus, s.theta(), cfg).adequate);

	/* identical seeds give identical reports */
	CHECK(to_json(o).dump() == to_json(refine_region(center, s, m, plus, s.theta(), RefineConfig {
		60, 5, Rational(1, 1000000000), 1 })).dump());

	std::string csv = dataset_csv(o, s);
	CHECK(csv.rfind("p,k,c,x,y,weight\r\n", 0) == 0);
	CHECK(std::count(csv.begin(), csv.end(), '\n') == 61);
	CHECK(csv.find(",1\r\n") != std::string::npos);
	CHECK(csv.find("\"green, blue\"") != std::string::npos);
}

TEST_CASE("refine: spike model against the true function")
{
	test::Problem pr = test::make_problem(R"({"version":"1.2","variables":[
	  {"label":"p","interface":"knob","type":"real","range":[0,10],"rad-abs":0.5},
	  {"label":"y","interface":"output","type":"real"}]})",
	                                      { { "y", "ite(abs(p - 2) <= 0.05, 100, p)" } });
	SystemOracle truth;
	truth.exprs = { { "y", pr.spec.variable("p") } };
	RefineConfig cfg;
	cfg.n = 400;
	cfg.seed = 11;

	RefinementReport good = refine_region({ { "p", q("9.5") } }, pr.spec, pr.model, truth,
	                                      pr.spec.theta(), cfg);
	CHECK(good.adequate);
	CHECK(to_json(good)["verdict"] == "ADEQUATE");

	RefinementReport bad = refine_region({ { "p", 2 } }, pr.spec, pr.model, truth,
	                                     pr.spec.theta(), cfg);
	CHECK_FALSE(bad.adequate);
	size_t spikes = 0;
	for (const RefineSample &x : bad.samples) {
		Rational p = x.point.at("p");
		Rational expect = abs(p - 2) <= q("0.05") ? Rational(100 - p) : Rational(0);
		CHECK(x.discrepancy[0] == expect);
		spikes += expect > 0;
	}
	/* about a tenth of the region is spike */
	CHECK(spikes > 15);
	CHECK(spikes < 80);
	CHECK(bad.max_discrepancy[0] >= q("97.95"));
}

TEST_CASE("refine: alpha rejection and argument errors")
{
	ProblemSpec s = example();
	ModelArtifact m = test::expression_model(s, { { "y1", "p1" }, { "y2", "8" } });
	SystemOracle o;
	o.exprs = { { "y1", s.variable("p1") }, { "y2", cnst(8) } };
	RefineConfig cfg;
	cfg.n = 10;
	/* x1 == 10 is hit with negligible probability */
	try {
		refine_region({ { "p1", 4 }, { "p2", 3 } }, s, m, o, s.theta(), cfg);
		FAIL("expected an error");
	} catch (const Error &e) {
		CHECK(e.code() == Errc::alpha_rejection_exhausted);
	}
	CHECK_THROWS_AS(refine_region({ { "p1", 4 } }, s, m, o, s.theta(), cfg), Error);
	CHECK_THROWS_AS(refine_region({ { "p1", 11 }, { "p2", 3 } }, s, m, o, s.theta(), cfg), Error);
	SystemOracle partial;
	partial.exprs = { { "y1", s.variable("p1") } };
	CHECK_THROWS_AS(refine_region({ { "p1", 4 }, { "p2", 3 } }, s, m, partial, s.theta(), cfg), Error);
	cfg.n = 0;
	CHECK_THROWS_AS(refine_region({ { "p1", 4 }, { "p2", 3 } }, s, m, o, s.theta(), cfg), Error);
}

TEST_CASE("refine: external oracle")
{
	ProblemSpec s = parse_spec(mixed);
	ModelArtifact m = mixed_model(s);
	Assignment center { { "p", 5 }, { "k", 1 }, { "c", 0 } };
	RefineConfig cfg;
	cfg.n = 24;
	cfg.seed = 8;
	cfg.workers = 4;

	SystemOracle builtin;
	builtin.exprs = { { "y", parse_expr("p + 2*x", s.env()) } };
	SystemOracle ext;
	ext.command = "awk";
	ext.args = { "-F,", "{ printf \"%.17g\\n\", $1 + 2 * $4 }" };
	RefinementReport a = refine_region(center, s, m, builtin, s.theta(), cfg);
	RefinementReport b = refine_region(center, s, m, ext, s.theta(), cfg);
	REQUIRE(a.samples.size() == b.samples.size());
	for (size_t i = 0; i < a.samples.size(); i++) {
		CHECK(a.samples[i].point == b.samples[i].point);
		CHECK(abs(a.samples[i].system.at("y") - b.samples[i].system.at("y")) < q("1e-12"));
	}

	auto fails = [&](std::vector<std::string> args) {
		SystemOracle bad;
		bad.command = "sh";
		bad.args = std::move(args);
		try {
			refine_region(center, s, m, bad, s.theta(), cfg);
		} catch (const Error &e) {
			return e.code() == Errc::oracle_failure &&
			       std::string(e.what()).find("row 0:") != std::string::npos;
		}
		return false;
	};
	CHECK(fails({ "-c", "exit 3" }));
	CHECK(fails({ "-c", "echo not-a-number" }));
	CHECK(fails({ "-c", "echo 1,2" }));
	SystemOracle missing;
	missing.command = "/nonexistent/oracle";
	CHECK_THROWS_AS(refine_region(center, s, m, missing, s.theta(), cfg), Error);
}
