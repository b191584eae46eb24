/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#include "doctest.h"
#include "test_problems.hh"

#include "gearbox/error.hh"

using namespace gearbox;
using gearbox::test::q;
using gearbox::test::Problem;
using gearbox::test::make_problem;

namespace {

std::string one_knob(const char *range, const char *radius, const char *extra = "",
                     const char *ptype = "real")
{
	return std::string(R"({"version":"1.2","variables":[
	  {"label":"p","interface":"knob","type":")") + ptype + R"(","range":)" + range + radius + R"(},
	  {"label":"y","interface":"output","type":"real"}])" + extra + "}";
}

/* every witness is checked again with a fresh configuration */
void revalidate(const GearProblem &gp, const GearResult &r)
{
	REQUIRE(r.status == GearStatus::witness);
	SolverConfig fresh;
	WitnessCheck c = check_witness(gp, r.p, fresh);
	CHECK(c.status == CheckStatus::valid);
	CHECK(eval(gp.eta, r.p));
}

}

TEST_CASE("solve_gear: grid knob, exact region")
{
	Problem pr = make_problem(one_knob("[0,10]", R"(,"grid":[2,4,7])", R"(,"beta":"y >= 4")"),
	                          { { "y", "p" } });
	GearResult r = solve_gear(pr.gp, SolverConfig {});
	revalidate(pr.gp, r);
	CHECK((r.p.at("p") == 4 || r.p.at("p") == 7));
	CHECK(r.iterations <= 3);

	/* p = 2 is never a candidate: it fails beta at the center */
	pr.gp.beta = parse_formula("y >= 5", pr.spec.env());
	r = solve_gear(pr.gp, SolverConfig {});
	revalidate(pr.gp, r);
	CHECK(r.p.at("p") == 7);
}

TEST_CASE("solve_gear: step model needs the whole region on the good side")
{
	Problem pr = make_problem(one_knob("[0,10]", R"(,"rad-abs":1)", R"(,"beta":"y >= 1")"),
	                          { { "y", "ite(p <= 5, 10, 0)" } });
	GearResult r = solve_gear(pr.gp, SolverConfig {});
	revalidate(pr.gp, r);
	CHECK(r.p.at("p") <= 4);
	CHECK(r.p.at("p") >= 1);
	CHECK(test::brute_stable(pr, r.p, q("0.01")));

	/* p = 4.9 is rejected by the point p' = 5.9 > 5 */
	WitnessCheck c = check_witness(pr.gp, { { "p", q("4.9") } }, SolverConfig {});
	REQUIRE(c.status == CheckStatus::cex);
	CHECK(c.cex.at("p") > 5);
	CHECK(c.cex.at("p") <= q("5.9"));

	/* forcing the candidate side: eta p >= 4.5 leaves nothing stable */
	pr.gp.eta = parse_formula("p >= 4.5", pr.spec.env());
	r = solve_gear(pr.gp, SolverConfig {});
	CHECK(r.status == GearStatus::infeasible);
	CHECK(r.exclusions.size() >= 1);
	for (const Exclusion &e : r.exclusions)
		CHECK(e.center.at("p") > 5);
}

TEST_CASE("solve_gear: unsatisfiable condition is infeasible")
{
	Problem pr = make_problem(one_knob("[0,10]", R"(,"rad-abs":1)", R"(,"beta":"y >= 1 and y <= 0")"),
	                          { { "y", "p" } });
	GearResult r = solve_gear(pr.gp, SolverConfig {});
	CHECK(r.status == GearStatus::infeasible);
	CHECK(r.iterations == 0);
}

TEST_CASE("check_witness: examples")
{
	ProblemSpec s = parse_spec(test::read_file("data/running_example_spec.json"));
	ModelArtifact m = test::expression_model(s, { { "y1", "5" }, { "y2", "8" } });
	GearProblem gp = gear_problem(s, encode_model(m, s));
	Assignment p { { "p1", 4 }, { "p2", 3 } };
	gp.beta = *s.assertion("assert2");
	CHECK(check_witness(gp, p, SolverConfig {}).status == CheckStatus::valid);

	Problem pr = make_problem(R"({"version":"1.2","variables":[
	  {"label":"p","interface":"knob","type":"real","range":[0,1]},
	  {"label":"x","interface":"input","type":"real","range":[0,10]},
	  {"label":"y","interface":"output","type":"real"}],"beta":"y < 5"})", { { "y", "x" } });
	WitnessCheck c = check_witness(pr.gp, { { "p", 0 } }, SolverConfig {});
	REQUIRE(c.status == CheckStatus::cex);
	CHECK(c.cex.at("x") >= 5);
	CHECK(c.cex.at("y") == c.cex.at("x"));

	/* a knob outside its domain is a usage error */
	CHECK_THROWS_AS(check_witness(pr.gp, { { "p", 2 } }, SolverConfig {}), Error);
}

TEST_CASE("check_witness: identity theta is plain verification")
{
	std::mt19937_64 rng(5);
	Problem pr = make_problem(one_knob("[-3,3]", R"(,"rad-abs":0)", R"(,"beta":"y <= 2")"),
	                          { { "y", "p*p - p" } });
	for (int i = 0; i < 30; i++) {
		Rational c = test::random_rational(rng, -3, 3);
		WitnessCheck w = check_witness(pr.gp, { { "p", c } }, SolverConfig {});
		bool plain = eval(pr.spec.beta, { { "p", c }, { "y", c * c - c } });
		CHECK((w.status == CheckStatus::valid) == plain);
		CHECK(w.status != CheckStatus::unknown);
	}
}

TEST_CASE("solve_query: examples")
{
	Problem pr = make_problem(one_knob("[0,10]", R"(,"rad-abs":1)", R"(,"beta":"y >= 3")"),
	                          { { "y", "7/2" } });
	Formula beta = pr.gp.beta;
	GearResult a = solve_gear(pr.gp, SolverConfig {});
	GearResult b = solve_query(pr.gp, beta, SolverConfig {});
	CHECK(a.status == b.status);

	pr.gp.beta = true_f();
	CHECK(solve_query(pr.gp, parse_formula("y >= 4", pr.spec.env()), SolverConfig {}).status ==
	      GearStatus::infeasible);
	GearResult c = solve_query(pr.gp, parse_formula("y >= 3", pr.spec.env()), SolverConfig {});
	CHECK(c.status == GearStatus::witness);
	CHECK(solve_query(pr.gp, false_f(), SolverConfig {}).status == GearStatus::infeasible);
}

TEST_CASE("region policy: contain keeps the region inside the domain")
{
	Problem pr = make_problem(one_knob("[0,10]", R"(,"rad-abs":1)", R"(,"beta":"y >= 9")"),
	                          { { "y", "p" } });
	/* only p = 10 is stable when the region is clipped */
	pr.gp.region = RegionPolicy::clip;
	GearResult r = solve_gear(pr.gp, SolverConfig {});
	revalidate(pr.gp, r);
	CHECK(r.p.at("p") == 10);
	pr.gp.region = RegionPolicy::contain;
	CHECK(solve_gear(pr.gp, SolverConfig {}).status == GearStatus::infeasible);
}

TEST_CASE("relative radii and integer knobs")
{
	Problem pr = make_problem(one_knob("[1,20]", R"(,"rad-rel":0.25)", R"(,"beta":"y <= 10")"),
	                          { { "y", "p" } });
	GearResult r = solve_gear(pr.gp, SolverConfig {});
	revalidate(pr.gp, r);
	CHECK(r.p.at("p") * q("1.25") <= 10);

	Problem pi = make_problem(one_knob("[0,9]", R"(,"rad-abs":1)", R"(,"beta":"y != 4 and y != 6")", "int"),
	                          { { "y", "p" } });
	for (RegionPolicy rp : { RegionPolicy::clip, RegionPolicy::contain }) {
		pi.gp.region = rp;
		r = solve_gear(pi.gp, SolverConfig {});
		revalidate(pi.gp, r);
		CHECK(is_integer(r.p.at("p")));
		Rational v = r.p.at("p");
		CHECK((v <= 2 || v == 8 || v == 9));
	}
}

TEST_CASE("categorical knobs are exact")
{
	Problem pr = make_problem(R"({"version":"1.2","variables":[
	  {"label":"m","interface":"knob","type":"set","range":["slow","fast","turbo"]},
	  {"label":"p","interface":"knob","type":"real","range":[0,10],"rad-abs":0.5},
	  {"label":"y","interface":"output","type":"real"}],"beta":"y >= 8"})",
	                          { { "y", "ite(m == \"turbo\", p + 4, p)" } });
	GearResult r = solve_gear(pr.gp, SolverConfig {});
	revalidate(pr.gp, r);
	CHECK(test::brute_stable(pr, r.p, q("0.05")));
}

TEST_CASE("inputs are universally quantified")
{
	/* y = p - x must stay >= 0 for every x in [0, 3] and p' within 0.5 */
	Problem pr = make_problem(R"({"version":"1.2","variables":[
	  {"label":"p","interface":"knob","type":"real","range":[0,10],"rad-abs":0.5},
	  {"label":"x","interface":"input","type":"real","range":[0,3]},
	  {"label":"y","interface":"output","type":"real"}],
	  "alpha":"x >= 1","beta":"y >= 0"})", { { "y", "p - x" } });
	GearResult r = solve_gear(pr.gp, SolverConfig {});
	revalidate(pr.gp, r);
	CHECK(r.p.at("p") >= q("3.5"));
	CHECK(test::brute_stable(pr, r.p, q("0.05")));
}

TEST_CASE("property: witnesses re-validate and exclusions never cut off stable centers")
{
	std::mt19937_64 rng(17);
	int witnesses = 0;
	for (int i = 0; i < 12; i++) {
		/* y = a (p - m)^2 + b with a random sign, threshold in between */
		Rational m = test::random_rational(rng, 1, 9), a = (rng() % 2 ? 1 : -1) * Rational(rng() % 4 + 1, 2);
		a.canonicalize();
		Rational t = test::random_rational(rng, -4, 4), rad(rng() % 4 + 1, 4);
		rad.canonicalize();
		std::string model = to_string(a) + " * (p - " + to_string(m) + ")**2";
		std::string spec = one_knob("[0,10]", (",\"rad-abs\":" + to_decimal(rad)).c_str(),
		                            (",\"beta\":\"y >= " + to_string(t) + "\"").c_str());
		Problem pr = make_problem(spec, { { "y", model } },
		                          i % 2 ? RegionPolicy::clip : RegionPolicy::contain);
		GearResult r = solve_gear(pr.gp, SolverConfig {});
		REQUIRE(r.status != GearStatus::unknown);
		if (r.status == GearStatus::witness) {
			witnesses++;
			revalidate(pr.gp, r);
		}
		/* lipschitz bound of y on [0, 10] is 2 |a| 10 */
		Rational h = rad / 10, L = 20 * abs(a), slack = L * h;
		pr.spec.beta = parse_formula("y >= " + to_string(t + slack), pr.spec.env());
		for (const Assignment &c : test::brute_centers(pr, h)) {
			if (!test::brute_stable(pr, c, h))
				continue;
			/* robustly stable: no exclusion may contain it */
			for (const Exclusion &e : r.exclusions)
				CHECK(abs(c.at("p") - e.center.at("p")) > rad);
			CHECK(r.status == GearStatus::witness);
		}
	}
	CHECK(witnesses >= 3);
}

TEST_CASE("property: two knobs")
{
	Problem pr = make_problem(R"({"version":"1.2","variables":[
	  {"label":"a","interface":"knob","type":"real","range":[0,4],"rad-abs":0.25},
	  {"label":"b","interface":"knob","type":"real","range":[0,4],"rad-abs":0.25},
	  {"label":"y","interface":"output","type":"real"}],"beta":"y <= 1"})",
	                          { { "y", "(a - 3)**2 + (b - 1)**2" } });
	GearResult r = solve_gear(pr.gp, SolverConfig {});
	revalidate(pr.gp, r);
	CHECK(test::brute_stable(pr, r.p, q("0.025")));
	for (const Exclusion &e : r.exclusions) {
		/* the counterexample genuinely violates beta (up to delta) */
		CHECK(eval_relaxed(to_nnf(lnot(pr.spec.beta)), e.counterexample, SolverConfig {}.delta));
	}
}

TEST_CASE("property: grid progress is bounded by the grid")
{
	std::mt19937_64 rng(3);
	for (int i = 0; i < 8; i++) {
		std::vector<int> grid;
		for (int v = 0; v <= 10; v++)
			if (rng() % 2)
				grid.push_back(v);
		if (grid.empty())
			grid.push_back(5);
		std::string g = ",\"grid\":[";
		for (size_t j = 0; j < grid.size(); j++)
			g += (j ? "," : "") + std::to_string(grid[j]);
		g += "],\"rad-abs\":0.5";
		Problem pr = make_problem(one_knob("[0,10]", g.c_str(), R"(,"beta":"y >= 0.5")"),
		                          { { "y", "ite(p >= 7, 0, ite(p <= 2, 0, 1))" } },
		                          RegionPolicy::clip);
		GearResult r = solve_gear(pr.gp, SolverConfig {});
		CHECK(r.iterations <= grid.size());
		bool any = false;
		for (int v : grid)
			any = any || (v >= 3 && v <= 6);
		CHECK((r.status == GearStatus::witness) == any);
	}
}

TEST_CASE("duality: inverting the condition finds the bad region")
{
	Problem pr = make_problem(one_knob("[0,10]", R"(,"rad-abs":0.5)", R"(,"beta":"y >= 5")"),
	                          { { "y", "ite(p <= 5, 10, 0)" } });
	GearResult good = solve_gear(pr.gp, SolverConfig {});
	revalidate(pr.gp, good);
	CHECK(good.p.at("p") <= q("4.5"));
	pr.gp.beta = lnot(pr.gp.beta);
	GearResult bad = solve_gear(pr.gp, SolverConfig {});
	revalidate(pr.gp, bad);
	CHECK(bad.p.at("p") > q("5.5"));
}

TEST_CASE("certificate json")
{
	Problem pr = make_problem(one_knob("[0,10]", R"(,"rad-abs":1)", R"(,"beta":"y >= 1")"),
	                          { { "y", "ite(p <= 5, 10, 0)" } });
	pr.gp.eta = parse_formula("p >= 3", pr.spec.env());
	GearResult r = solve_gear(pr.gp, SolverConfig {});
	Json j = to_json(r);
	CHECK(j["verdict"] == "witness");
	CHECK(json_assignment(j["witness"]) == r.p);
	CHECK(j["iterations"] == r.iterations);
	CHECK(j["exclusions"].size() == r.exclusions.size());
	CHECK(j["queries"]["total"] == r.stats.queries);
}
