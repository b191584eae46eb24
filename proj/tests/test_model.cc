/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#include "doctest.h"
#include "test_models.hh"
#include "test_support.hh"

#include "gearbox/error.hh"
#include "gearbox/solver.hh"
#include "gearbox/spec.hh"

using namespace gearbox;
using gearbox::test::q;

namespace {

const char *poly_json = R"({"kind":"polynomial","features":["p"],"outputs":["y"],
  "payload":{"terms":[[{"coef":"3","exponents":[0]},{"coef":"2","exponents":[1]},
                       {"coef":"-1","exponents":[2]}]]}})";

const char *stump_json = R"({"kind":"tree","features":["x"],"outputs":["y"],
  "payload":{"nodes":[{"feature":0,"threshold":"0","left":1,"right":2},
                      {"value":["1"]},{"value":["-1"]}]}})";

const char *relu_json = R"({"kind":"mlp","features":["x"],"outputs":["y"],
  "payload":{"layers":[{"weights":[["1"]],"bias":["0"],"activation":"relu"},
                       {"weights":[["1"]],"bias":["0"],"activation":"linear"}]}})";

const char *forest_json = R"({"kind":"forest","features":["x"],"outputs":["y"],
  "payload":{"trees":[
    {"nodes":[{"feature":0,"threshold":"5","left":1,"right":2},{"value":["2"]},{"value":["0"]}]},
    {"nodes":[{"feature":0,"threshold":"1","left":1,"right":2},{"value":["0"]},{"value":["4"]}]}]}})";

Errc load_error(const std::string &text)
{
	try {
		load_model(text);
	} catch (const Error &e) {
		return e.code();
	}
	FAIL("expected an error");
	return Errc::usage;
}

SolverConfig small_delta()
{
	SolverConfig cfg;
	cfg.delta = Rational(1, 1000);
	return cfg;
}

/* values of every defined name of em at a feature point */
Assignment complete(const EncodedModel &em, Assignment a)
{
	for (const auto &d : em.definitions)
		if (!a.count(d.name) || std::find(em.aux.begin(), em.aux.end(), d.name) != em.aux.end())
			a[d.name] = eval(d.term, a);
	return a;
}

}

TEST_CASE("load_model: examples")
{
	ModelArtifact p = load_model(poly_json);
	CHECK(p.kind == ModelKind::polynomial);
	CHECK(p.features.size() == 1);
	CHECK(p.outputs.size() == 1);
	/* 3 + 2*2 - 2**2 */
	CHECK(eval_model(p, { { "p", 2 } }).at("y") == 3);

	ModelArtifact t = load_model(stump_json);
	CHECK(t.trees.at(0).leaves() == 2);
	CHECK(eval_model(t, { { "x", 0 } }).at("y") == 1);
	CHECK(eval_model(t, { { "x", q("0.001") } }).at("y") == -1);

	const char *mlp = R"({"kind":"mlp","features":["a","b"],"outputs":["y"],
	  "payload":{"layers":[
	    {"weights":[["1","0"],["0","1"],["1","1"]],"bias":["0","0","0"],"activation":"relu"},
	    {"weights":[["1","1","1"]],"bias":["0"],"activation":"linear"}]}})";
	ModelArtifact m = load_model(mlp);
	CHECK(m.layers.size() == 2);
	std::string bad = mlp;
	bad.replace(bad.find(R"("bias":["0","0","0"])"), 20, R"("bias":["0","0"])");
	CHECK(load_error(bad) == Errc::dimension_mismatch);

	CHECK(load_error(R"({"kind":"svm","features":["x"],"outputs":["y"],"payload":{}})") ==
	      Errc::unknown_kind);
	CHECK(load_error("{") == Errc::malformed_json);
	CHECK(eval_model(load_model(relu_json), { { "x", -3 } }).at("y") == 0);
}

TEST_CASE("load_model: structural errors")
{
	/* leaf vector length differs from the output count */
	CHECK(load_error(R"({"kind":"tree","features":["x"],"outputs":["y"],
	  "payload":{"nodes":[{"value":["1","2"]}]}})") == Errc::dimension_mismatch);
	/* split on a feature that does not exist */
	CHECK(load_error(R"({"kind":"tree","features":["x"],"outputs":["y"],
	  "payload":{"nodes":[{"feature":3,"threshold":"0","left":1,"right":2},
	  {"value":["1"]},{"value":["2"]}]}})") == Errc::dimension_mismatch);
	/* final activation must be linear */
	CHECK(load_error(R"({"kind":"mlp","features":["x"],"outputs":["y"],
	  "payload":{"layers":[{"weights":[["1"]],"bias":["0"],"activation":"relu"}]}})") ==
	      Errc::dimension_mismatch);
	CHECK(load_error(R"({"kind":"forest","features":["x"],"outputs":["y"],
	  "payload":{"trees":[]}})") == Errc::dimension_mismatch);
	CHECK(load_error(R"({"kind":"polynomial","features":["x"],"outputs":["y"],
	  "payload":{"terms":[[{"coef":"1","exponents":[1,1]}]]}})") == Errc::dimension_mismatch);
}

TEST_CASE("check_model: features must match the spec partition")
{
	ProblemSpec s = parse_spec(R"({"version":"1.2","variables":[
	  {"label":"p","interface":"knob","type":"real","range":[0,10]},
	  {"label":"y","interface":"output","type":"real"}]})");
	CHECK_NOTHROW(check_model(load_model(poly_json), s));
	try {
		encode_model(load_model(stump_json), s);
		FAIL("expected FeatureMismatch");
	} catch (const Error &e) {
		CHECK(e.code() == Errc::feature_mismatch);
	}
}

TEST_CASE("encode_model: examples")
{
	Expr x = var("x");
	EncodedModel t = encode_model(load_model(stump_json));
	CHECK(equal(t.outputs.at("y"), ite(le(x, cnst(0)), cnst(1), cnst(-1))));
	CHECK(t.paths == 2);

	EncodedModel r = encode_model(load_model(relu_json));
	CHECK(equal(r.outputs.at("y"), ite(ge(x, cnst(0)), x, cnst(0))));
	CHECK(r.aux.size() == 1);
	SolverQuery forced { conj({ r.phi, eq(x, cnst(-3)), ne(var("y"), cnst(0)) }),
	                     { { "x", VarDomain::real(-10, 10) }, { "y", VarDomain::real(-10, 10) },
	                       { r.aux[0], VarDomain::real(-10, 10) } },
	                     {} };
	CHECK(builtin_solve(forced, small_delta()).status == Status::unsat);
	forced.formula = conj({ r.phi, eq(x, cnst(-3)) });
	Verdict v = builtin_solve(forced, small_delta());
	REQUIRE(v.status == Status::sat);
	CHECK(v.witness.at("y") == 0);

	/* at x = 3 the first stump gives 2, the second 4 */
	ModelArtifact f = load_model(forest_json);
	EncodedModel ef = encode_model(f);
	CHECK(eval(ef.outputs.at("y"), { { "x", 3 } }) == 3);
	CHECK(eval_model(f, { { "x", 3 } }).at("y") == 3);
	CHECK(ef.paths == 4);
}

TEST_CASE("expression models accept ite/abs terms")
{
	ModelArtifact m = load_model(R"j({"kind":"expression","features":["p"],"outputs":["y"],
	  "payload":{"outputs":{"y":"ite(abs(p-2) <= 0.05, 100, p)"}}})j");
	CHECK(eval_model(m, { { "p", 2 } }).at("y") == 100);
	CHECK(eval_model(m, { { "p", q("2.06") } }).at("y") == q("2.06"));
	ModelArtifact back = load_model(serialize(m));
	CHECK(equal(back.exprs[0], m.exprs[0]));
}

TEST_CASE("expression models see the sorts of the spec")
{
	ProblemSpec s = parse_spec(R"({"version":"1.2","variables":[
	  {"label":"c","interface":"knob","type":"set","range":["lo","hi"]},
	  {"label":"y","interface":"output","type":"real"}]})");
	std::string text = R"j({"kind":"expression","features":["c"],"outputs":["y"],
	  "payload":{"outputs":{"y":"ite(c == 'hi', 2, 0)"}}})j";
	ModelArtifact m = load_model(text, s);
	CHECK(eval_model(m, { { "c", 1 } }).at("y") == 2);
	CHECK(eval_model(m, { { "c", 0 } }).at("y") == 0);
	CHECK(serialize(load_model(serialize(m), s)) == serialize(m));
	/* without a spec the feature is real */
	CHECK_THROWS_AS(load_model(text), Error);
}

TEST_CASE("serialize/load round trip")
{
	test::ModelGen gen(5);
	for (ModelArtifact m : { gen.polynomial(2, 2), gen.tree(2, 2), gen.forest(2, 1), gen.mlp({ 2, 4, 2 }) }) {
		ModelArtifact back = load_model(serialize(m));
		CHECK(serialize(back) == serialize(m));
		Assignment a { { "x0", q("0.75") }, { "x1", q("-1.5") } };
		CHECK(eval_model(back, a) == eval_model(m, a));
	}
}

TEST_CASE("property: encoding agrees with reference evaluation")
{
	test::ModelGen gen(42);
	std::mt19937_64 rng(43);
	std::vector<ModelArtifact> models { gen.polynomial(2, 2), gen.tree(2, 2), gen.forest(2, 2),
	                                    gen.mlp({ 2, 4, 2 }) };
	for (const ModelArtifact &m : models) {
		EncodedModel em = encode_model(m);
		int ok = 0;
		for (int i = 0; i < 1000; i++) {
			Assignment pt { { "x0", test::random_rational(rng, -5, 5) },
			                { "x1", test::random_rational(rng, -5, 5) } };
			Assignment ref = eval_model(m, pt);
			Assignment a = pt;
			a.insert(ref.begin(), ref.end());
			a = complete(em, a);
			for (const auto &[name, v] : ref)
				CHECK(a.at(name) == v);
			ok += eval(em.phi, a);
			for (const auto &[name, t] : em.outputs)
				CHECK(eval(t, pt) == ref.at(name));
		}
		CHECK_MESSAGE(ok == 1000, model_kind_name(m.kind));
	}
}

TEST_CASE("property: the encoding is functional")
{
	test::ModelGen gen(7);
	std::mt19937_64 rng(8);
	std::vector<ModelArtifact> models { gen.polynomial(1, 1, 3, 2), gen.tree(1, 1, 3),
	                                    gen.forest(1, 1, 3, 2), gen.mlp({ 1, 3, 1 }) };
	for (const ModelArtifact &m : models) {
		EncodedModel em = encode_model(m);
		for (int i = 0; i < 5; i++) {
			Rational x = test::random_rational(rng, -4, 4);
			Rational y = eval_model(m, { { "x0", x } }).at("y0");
			Box box { { "x0", VarDomain::real(-4, 4) }, { "y0", VarDomain::real(-1000, 1000) } };
			for (const std::string &a : em.aux)
				box.emplace(a, VarDomain::real(-1000, 1000));
			SolverQuery other { conj({ em.phi, eq(var("x0"), cnst(x)), ne(var("y0"), cnst(y)) }),
			                    box, {} };
			CHECK_MESSAGE(builtin_solve(other, small_delta()).status == Status::unsat,
			              model_kind_name(m.kind));
		}
	}
}

TEST_CASE("structure: tree paths equal leaves, mlp auxiliaries equal relu neurons")
{
	test::ModelGen gen(11);
	for (int i = 0; i < 10; i++) {
		ModelArtifact t = gen.forest(2, 1, 3, 4);
		size_t leaves = 0;
		for (const Tree &tr : t.trees)
			leaves += tr.leaves();
		CHECK(encode_model(t).paths == leaves);
	}
	ModelArtifact m = gen.mlp({ 3, 5, 4, 2 });
	CHECK(encode_model(m).aux.size() == 9);
}
