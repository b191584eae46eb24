/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#include "gearbox/cli.hh"
#include "gearbox/csv.hh"
#include "gearbox/error.hh"
#include "gearbox/opt.hh"

#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace gearbox {

const char *const tool_version = "0.1.0";

const char *mode_name(Mode m)
{
	switch (m) {
	case Mode::verify: return "verify";
	case Mode::query: return "query";
	case Mode::synthesize: return "synthesize";
	case Mode::optimize: return "optimize";
	case Mode::optsyn: return "optsyn";
	case Mode::rootcause: return "rootcause";
	case Mode::doe: return "doe";
	case Mode::refine: return "refine";
	case Mode::encode: return "encode";
	}
	return "?";
}

std::optional<Mode> parse_mode(std::string_view s)
{
	for (Mode m : { Mode::verify, Mode::query, Mode::synthesize, Mode::optimize, Mode::optsyn,
	                Mode::rootcause, Mode::doe, Mode::refine, Mode::encode })
		if (s == mode_name(m))
			return m;
	return std::nullopt;
}

std::string sha256_hex(std::string_view data)
{
	unsigned char md[EVP_MAX_MD_SIZE];
	unsigned int len = 0;
	if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
		throw std::runtime_error("sha256 failed");
	static const char hex[] = "0123456789abcdef";
	std::string s;
	for (unsigned i = 0; i < len; i++) {
		s += hex[md[i] >> 4];
		s += hex[md[i] & 15];
	}
	return s;
}

namespace {

/* ---- configuration as JSON ---- */

Json bindings_json(const std::vector<Binding> &b)
{
	Json j = Json::object();
	for (const auto &[k, v] : b)
		j[k] = v;
	return j;
}

std::vector<Binding> json_bindings(const Json &j, const char *what)
{
	if (!j.is_object())
		throw Error(Errc::usage, std::string(what) + ": expected an object");
	std::vector<Binding> out;
	for (const auto &[k, v] : j.items()) {
		if (!v.is_string())
			throw Error(Errc::usage, std::string(what) + "." + k + ": expected a string");
		out.emplace_back(k, v.get<std::string>());
	}
	return out;
}

template <typename T> T field(const Json &j, const char *key, T dflt)
{
	if (!j.contains(key))
		return dflt;
	try {
		return j.at(key).get<T>();
	} catch (const Json::exception &) {
		throw Error(Errc::usage, std::string("config field '") + key + "' has the wrong type");
	}
}

Rational rational_field(const Json &j, const char *key, const Rational &dflt)
{
	if (!j.contains(key))
		return dflt;
	return json_rational(j.at(key), key);
}

/* ---- inputs ---- */

std::string read_text(const std::string &path, const char *what)
{
	if (path.empty())
		throw Error(Errc::usage, std::string("missing ") + what + " path");
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw Error(Errc::usage, std::string("cannot read ") + what + " '" + path + "'");
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

struct Inputs {
	std::string spec_text, model_text, witness_text;
	ProblemSpec spec;
	std::optional<ModelArtifact> model;
	std::vector<std::string> warnings;
};

bool needs_model(Mode m)
{
	return m != Mode::doe;
}

Inputs load_inputs(const RunConfig &cfg)
{
	Inputs in;
	in.spec_text = read_text(cfg.spec_path, "spec");
	in.spec = parse_spec(in.spec_text);
	in.warnings = in.spec.warnings;
	if (needs_model(cfg.mode)) {
		in.model_text = read_text(cfg.model_path, "model");
		in.model = load_model(in.model_text, in.spec);
	}
	if (cfg.mode == Mode::refine && !cfg.witness_path.empty())
		in.witness_text = read_text(cfg.witness_path, "witness certificate");
	return in;
}

Json inputs_json(const RunConfig &cfg, const Inputs &in)
{
	Json j;
	std::string all;
	auto entry = [&](const char *name, const std::string &path, const std::string &text) {
		std::string h = sha256_hex(text);
		j[name] = { { "path", path }, { "sha256", h } };
		all += std::string(name) + ":" + h + "\n";
	};
	entry("spec", cfg.spec_path, in.spec_text);
	if (needs_model(cfg.mode))
		entry("model", cfg.model_path, in.model_text);
	if (!in.witness_text.empty())
		entry("witness", cfg.witness_path, in.witness_text);
	j["sha256"] = sha256_hex(all);
	return j;
}

SolverConfig solver_config(const RunConfig &cfg)
{
	if (cfg.epsilon <= 0)
		throw Error(Errc::usage, "epsilon must be positive");
	SolverConfig s;
	s.delta = cfg.delta ? *cfg.delta : Rational(cfg.epsilon / 100);
	if (s.delta <= 0)
		throw Error(Errc::usage, "delta must be positive");
	if (cfg.timeout <= 0)
		throw Error(Errc::usage, "timeout must be positive");
	s.backend = cfg.backend;
	s.timeout = cfg.timeout;
	s.seed = cfg.seed;
	if (cfg.backend == Backend::external) {
		std::string cmd = cfg.solver_command;
		if (cmd.empty()) {
			const char *env = std::getenv("GEARBOX_SOLVER");
			cmd = env && *env ? env : "z3 -in";
		}
		std::istringstream ss(cmd);
		std::vector<std::string> words;
		for (std::string w; ss >> w;)
			words.push_back(w);
		if (words.empty())
			throw Error(Errc::usage, "empty solver command");
		s.command = words[0];
		s.args.assign(words.begin() + 1, words.end());
	}
	return s;
}

Rational knob_value(const ProblemSpec &spec, const std::string &label, const std::string &text)
{
	const VarDecl *v = spec.find(label);
	if (!v || v->iface != Interface::knob)
		throw Error(Errc::usage, "knob: '" + label + "' is not a declared knob");
	if (v->type == Sort::set) {
		for (size_t i = 0; i < v->categories.size(); i++)
			if (v->categories[i] == text)
				return Rational(static_cast<long>(i));
		throw Error(Errc::usage, "knob: '" + text + "' is not a category of " + label);
	}
	auto q = parse_rational(text);
	if (!q)
		throw Error(Errc::usage, "knob: '" + text + "' is not a number for " + label);
	return *q;
}

Assignment knob_assignment(const ProblemSpec &spec, const std::vector<Binding> &b)
{
	Assignment p;
	for (const auto &[k, v] : b)
		if (!p.emplace(k, knob_value(spec, k, v)).second)
			throw Error(Errc::usage, "knob: '" + k + "' given twice");
	for (const std::string &k : interface_partition(spec).knobs)
		if (!p.count(k))
			throw Error(Errc::usage, "knob: no value for '" + k + "'");
	return p;
}

Named<Formula> selected_assertions(const ProblemSpec &spec, const std::vector<std::string> &names)
{
	if (names.empty())
		return spec.assertions;
	Named<Formula> out;
	for (const std::string &n : names) {
		const Formula *f = spec.assertion(n);
		try {
			out.emplace_back(n, f ? *f : parse_formula(n, spec.env()));
		} catch (const Error &e) {
			throw Error(Errc::usage, "assertion: '" + n + "' is neither declared nor a formula: " +
			            e.what());
		}
	}
	return out;
}

Named<Expr> selected_objectives(const ProblemSpec &spec, const std::vector<std::string> &names)
{
	Named<Expr> out;
	if (names.empty())
		out = spec.objectives;
	for (const std::string &n : names) {
		const Expr *e = spec.objective(n);
		try {
			out.emplace_back(n, e ? *e : parse_expr(n, spec.env()));
		} catch (const Error &err) {
			throw Error(Errc::usage, "objective: '" + n + "' is neither declared nor a term: " +
			            err.what());
		}
	}
	if (out.empty())
		throw Error(Errc::usage, "objective: the spec declares none and none was selected");
	return out;
}

Formula all_of(const Named<Formula> &fs)
{
	std::vector<Formula> parts;
	for (const auto &[_, f] : fs)
		parts.push_back(f);
	return conj(std::move(parts));
}

Formula with(const Formula &beta, const Formula &extra)
{
	return beta ? conj({ beta, extra }) : extra;
}

GearProblem base_problem(const RunConfig &cfg, const Inputs &in)
{
	GearProblem gp = gear_problem(in.spec, encode_model(*in.model, in.spec));
	if (cfg.theta_identity)
		gp.theta = ThetaSpec {};
	gp.region = cfg.region;
	if (cfg.max_iterations == 0)
		throw Error(Errc::usage, "max-iterations must be positive");
	gp.max_iterations = cfg.max_iterations;
	return gp;
}

/* beta of the goal of a search mode and the objectives it maximizes */
struct Goal {
	GearProblem gp;
	Named<Expr> objectives;
};

Goal search_goal(const RunConfig &cfg, const Inputs &in)
{
	Goal g { base_problem(cfg, in), {} };
	const ProblemSpec &s = in.spec;
	switch (cfg.mode) {
	case Mode::query:
		if (cfg.query.empty())
			throw Error(Errc::usage, "query: no query formula given");
		g.gp.beta = with(g.gp.beta, parse_formula(cfg.query, s.env()));
		break;
	case Mode::synthesize:
		if (!cfg.assertions.empty())
			g.gp.beta = with(g.gp.beta, all_of(selected_assertions(s, cfg.assertions)));
		break;
	case Mode::optimize:
		g.objectives = selected_objectives(s, cfg.objectives);
		break;
	case Mode::optsyn: {
		auto as = selected_assertions(s, cfg.assertions);
		if (!as.empty())
			g.gp.beta = with(g.gp.beta, all_of(as));
		g.objectives = selected_objectives(s, cfg.objectives);
		break;
	}
	case Mode::rootcause: {
		/* the bad region: some assertion fails, objectives inverted */
		auto as = selected_assertions(s, cfg.assertions);
		if (!as.empty())
			g.gp.beta = with(g.gp.beta, lnot(all_of(as)));
		for (const auto &[n, e] : selected_objectives(s, cfg.objectives))
			g.objectives.emplace_back("-" + n, neg(e));
		break;
	}
	default:
		break;
	}
	if (!g.gp.beta)
		g.gp.beta = true_f();
	return g;
}

int exit_of(GearStatus s)
{
	return s == GearStatus::witness ? exit_goal : s == GearStatus::infeasible ? exit_refuted : exit_unknown;
}

struct Outcome {
	int exit_code = exit_unknown;
	std::string verdict;
	Json result = Json::object();
	SolverStats stats;
	std::vector<std::pair<std::string, std::string>> artifacts; /* file name, content */
	std::string message;
};

Outcome run_verify(const RunConfig &cfg, const Inputs &in, const SolverConfig &scfg)
{
	Outcome o;
	GearProblem gp = base_problem(cfg, in);
	Assignment p = knob_assignment(in.spec, cfg.knobs);
	Named<Formula> as = selected_assertions(in.spec, cfg.assertions);
	if (as.empty() && in.spec.beta)
		as.emplace_back("beta", in.spec.beta);
	if (as.empty())
		throw Error(Errc::usage, "assertion: the spec declares no assertions and no beta");
	bool cex = false, unknown = false;
	Json list = Json::array();
	for (const auto &[name, f] : as) {
		gp.beta = f;
		WitnessCheck wc = check_witness(gp, p, scfg, &o.stats);
		Json e { { "name", name }, { "verdict", check_status_name(wc.status) } };
		if (wc.status == CheckStatus::cex)
			e["counterexample"] = assignment_json(wc.cex);
		if (wc.status == CheckStatus::unknown)
			e["reason"] = wc.reason;
		list.push_back(std::move(e));
		cex = cex || wc.status == CheckStatus::cex;
		unknown = unknown || wc.status == CheckStatus::unknown;
	}
	o.verdict = cex ? "cex" : unknown ? "unknown" : "valid";
	o.exit_code = cex ? exit_refuted : unknown ? exit_unknown : exit_goal;
	o.result["knobs"] = assignment_json(p);
	o.result["theta"] = cfg.theta_identity ? "identity" : "spec";
	o.result["assertions"] = std::move(list);
	o.message = std::to_string(as.size()) + " assertion(s): " + o.verdict;
	return o;
}

Outcome run_search(const RunConfig &cfg, const Inputs &in, const SolverConfig &scfg)
{
	Outcome o;
	Goal g = search_goal(cfg, in);
	if (cfg.mode == Mode::query || cfg.mode == Mode::synthesize) {
		GearResult r = solve_gear(g.gp, scfg);
		o.stats = r.stats;
		o.verdict = gear_status_name(r.status);
		o.exit_code = exit_of(r.status);
		o.result = to_json(r);
		o.message = o.verdict + " after " + std::to_string(r.iterations) + " iteration(s)";
		return o;
	}
	if (g.objectives.size() == 1) {
		const auto &[name, e] = g.objectives[0];
		EpsilonSolution s = optimize(g.gp, e, cfg.epsilon, scfg, name);
		o.stats = s.stats;
		o.verdict = gear_status_name(s.status);
		o.exit_code = exit_of(s.status);
		o.result = to_json(s);
		o.message = o.verdict;
		if (s.status == GearStatus::witness)
			o.message += ": " + name + " >= " + csv_number(s.z);
		return o;
	}
	if (cfg.levels == 0)
		throw Error(Errc::usage, "levels must be positive");
	ParetoResult r = pareto(g.gp, g.objectives, cfg.epsilon, scfg, cfg.levels);
	o.stats = r.stats;
	o.verdict = gear_status_name(r.status);
	o.exit_code = exit_of(r.status);
	o.result = to_json(r);
	o.artifacts.emplace_back("pareto.csv", pareto_csv(r, g.gp.knobs));
	o.message = o.verdict + ": " + std::to_string(r.points.size()) + " point(s)";
	return o;
}

Outcome run_encode(const RunConfig &cfg, const Inputs &in, const SolverConfig &scfg)
{
	Outcome o;
	Goal g = search_goal(cfg, in);
	std::string smt = emit_smtlib(candidate_query(g.gp, {}, scfg.delta));
	o.verdict = "encoded";
	o.exit_code = exit_goal;
	o.result = { { "file", "encode.smt2" }, { "sha256", sha256_hex(smt) } };
	o.artifacts.emplace_back("encode.smt2", std::move(smt));
	o.message = "wrote encode.smt2";
	return o;
}

Outcome run_doe(const RunConfig &cfg, const Inputs &in)
{
	Outcome o;
	Design d = doe_generate(in.spec, cfg.method, cfg.samples, cfg.seed, cfg.columns);
	std::string csv = design_csv(d, in.spec);
	o.verdict = "generated";
	o.exit_code = exit_goal;
	o.result = { { "method", doe_method_name(d.method) }, { "seed", d.seed },
	             { "columns", d.columns }, { "rows", d.rows.size() },
	             { "file", "design.csv" }, { "sha256", sha256_hex(csv) } };
	o.artifacts.emplace_back("design.csv", std::move(csv));
	o.message = std::to_string(d.rows.size()) + " row(s) in design.csv";
	return o;
}

Assignment witness_of(const Json &cert)
{
	if (!cert.is_object() || cert.value("verdict", "") != "witness" || !cert.contains("result") ||
	    !cert["result"].contains("witness"))
		throw Error(Errc::usage, "witness: the certificate holds no stable witness");
	return json_assignment(cert["result"]["witness"]);
}

Outcome run_refine(const RunConfig &cfg, const Inputs &in)
{
	Outcome o;
	if (!cfg.knobs.empty() && !cfg.witness_path.empty())
		throw Error(Errc::usage, "witness: give either knob values or a certificate");
	Assignment center = cfg.witness_path.empty() ? knob_assignment(in.spec, cfg.knobs)
	                                             : witness_of(parse_json_exact(in.witness_text));
	SystemOracle oracle;
	if (!cfg.oracle.empty() && !cfg.oracle_command.empty())
		throw Error(Errc::usage, "oracle: give either expressions or a command");
	if (!cfg.oracle_command.empty()) {
		oracle.command = "sh";
		oracle.args = { "-c", cfg.oracle_command };
		oracle.timeout = cfg.timeout;
	} else {
		if (cfg.oracle.empty())
			throw Error(Errc::usage, "oracle: no system oracle given");
		for (const auto &[name, text] : cfg.oracle)
			oracle.exprs.emplace_back(name, parse_expr(text, in.spec.env()));
	}
	RefineConfig rc;
	rc.n = cfg.samples;
	rc.seed = cfg.seed;
	rc.tau = cfg.tau;
	rc.workers = cfg.workers;
	if (cfg.tau <= 0)
		throw Error(Errc::usage, "tau must be positive");
	ThetaSpec theta = cfg.theta_identity ? ThetaSpec {} : in.spec.theta();
	RefinementReport rep = refine_region(center, in.spec, *in.model, oracle, theta, rc);
	rep.dataset_path = "dataset.csv";
	o.verdict = rep.adequate ? "ADEQUATE" : "REFINE";
	o.exit_code = rep.adequate ? exit_goal : exit_refuted;
	o.result = to_json(rep);
	o.artifacts.emplace_back("dataset.csv", dataset_csv(rep, in.spec));
	Rational worst = 0;
	for (const Rational &m : rep.max_discrepancy)
		worst = std::max(worst, m);
	o.message = o.verdict + ": max discrepancy " + csv_number(worst);
	return o;
}

Outcome execute(const RunConfig &cfg, const Inputs &in)
{
	SolverConfig scfg = solver_config(cfg);
	switch (cfg.mode) {
	case Mode::verify: return run_verify(cfg, in, scfg);
	case Mode::query:
	case Mode::synthesize:
	case Mode::optimize:
	case Mode::optsyn:
	case Mode::rootcause: return run_search(cfg, in, scfg);
	case Mode::encode: return run_encode(cfg, in, scfg);
	case Mode::doe: return run_doe(cfg, in);
	case Mode::refine: return run_refine(cfg, in);
	}
	throw Error(Errc::usage, "unknown mode");
}

int exit_for(const Error &e)
{
	switch (e.code()) {
	case Errc::backend_launch_failure:
	case Errc::protocol_error:
	case Errc::oracle_failure:
	case Errc::alpha_rejection_exhausted: return exit_unknown;
	default: return exit_usage;
	}
}

Json stats_json(const SolverStats &s, double wall)
{
	return { { "queries", s.queries }, { "sat", s.sat }, { "unsat", s.unsat },
	         { "unknown", s.unknown }, { "boxes", s.boxes }, { "solver_seconds", s.seconds },
	         { "wall_seconds", wall } };
}

void write_file(const std::filesystem::path &p, const std::string &data)
{
	std::ofstream out(p, std::ios::binary);
	if (!out || !out.write(data.data(), static_cast<std::streamsize>(data.size())))
		throw Error(Errc::usage, "cannot write '" + p.string() + "'");
}

}

Json config_json(const RunConfig &c)
{
	Json j;
	j["mode"] = mode_name(c.mode);
	j["spec"] = c.spec_path;
	if (!c.model_path.empty())
		j["model"] = c.model_path;
	j["epsilon"] = to_string(c.epsilon);
	if (c.delta)
		j["delta"] = to_string(*c.delta);
	j["backend"] = c.backend == Backend::builtin ? "builtin" : "external";
	if (!c.solver_command.empty())
		j["solver_command"] = c.solver_command;
	j["timeout"] = c.timeout;
	j["seed"] = c.seed;
	if (!c.knobs.empty())
		j["knobs"] = bindings_json(c.knobs);
	if (!c.assertions.empty())
		j["assertions"] = c.assertions;
	if (!c.objectives.empty())
		j["objectives"] = c.objectives;
	if (!c.query.empty())
		j["query"] = c.query;
	j["theta"] = c.theta_identity ? "identity" : "spec";
	j["region"] = region_policy_name(c.region);
	j["max_iterations"] = c.max_iterations;
	j["levels"] = c.levels;
	if (c.mode == Mode::doe) {
		j["method"] = doe_method_name(c.method);
		if (!c.columns.empty())
			j["columns"] = c.columns;
	}
	if (c.mode == Mode::doe || c.mode == Mode::refine)
		j["samples"] = c.samples;
	if (c.mode == Mode::refine) {
		j["tau"] = to_string(c.tau);
		j["workers"] = c.workers;
		if (!c.oracle.empty())
			j["oracle"] = bindings_json(c.oracle);
		if (!c.oracle_command.empty())
			j["oracle_command"] = c.oracle_command;
		if (!c.witness_path.empty())
			j["witness"] = c.witness_path;
	}
	return j;
}

RunConfig config_from_json(const Json &j)
{
	if (!j.is_object())
		throw Error(Errc::usage, "config: expected an object");
	RunConfig c;
	auto mode = parse_mode(field<std::string>(j, "mode", ""));
	if (!mode)
		throw Error(Errc::usage, "config field 'mode' is missing or unknown");
	c.mode = *mode;
	c.spec_path = field<std::string>(j, "spec", "");
	c.model_path = field<std::string>(j, "model", "");
	c.epsilon = rational_field(j, "epsilon", c.epsilon);
	if (j.contains("delta"))
		c.delta = json_rational(j["delta"], "delta");
	std::string backend = field<std::string>(j, "backend", "builtin");
	if (backend != "builtin" && backend != "external")
		throw Error(Errc::usage, "config field 'backend' is unknown");
	c.backend = backend == "builtin" ? Backend::builtin : Backend::external;
	c.solver_command = field<std::string>(j, "solver_command", "");
	/* parsed certificates keep decimals as strings */
	if (j.contains("timeout"))
		c.timeout = j["timeout"].is_number() ? j["timeout"].get<double>()
		                                     : to_double(json_rational(j["timeout"], "timeout"));
	c.seed = field<uint64_t>(j, "seed", 0);
	if (j.contains("knobs"))
		c.knobs = json_bindings(j["knobs"], "knobs");
	c.assertions = field<std::vector<std::string>>(j, "assertions", {});
	c.objectives = field<std::vector<std::string>>(j, "objectives", {});
	c.query = field<std::string>(j, "query", "");
	std::string theta = field<std::string>(j, "theta", "spec");
	if (theta != "spec" && theta != "identity")
		throw Error(Errc::usage, "config field 'theta' is unknown");
	c.theta_identity = theta == "identity";
	std::string region = field<std::string>(j, "region", "contain");
	if (region != "clip" && region != "contain")
		throw Error(Errc::usage, "config field 'region' is unknown");
	c.region = region == "clip" ? RegionPolicy::clip : RegionPolicy::contain;
	c.max_iterations = field<size_t>(j, "max_iterations", c.max_iterations);
	c.levels = field<size_t>(j, "levels", c.levels);
	if (j.contains("method")) {
		auto m = parse_doe_method(field<std::string>(j, "method", ""));
		if (!m)
			throw Error(Errc::usage, "config field 'method' is unknown");
		c.method = *m;
	}
	c.columns = field<std::vector<std::string>>(j, "columns", {});
	c.samples = field<size_t>(j, "samples", c.samples);
	c.tau = rational_field(j, "tau", c.tau);
	c.workers = field<unsigned>(j, "workers", c.workers);
	if (j.contains("oracle"))
		c.oracle = json_bindings(j["oracle"], "oracle");
	c.oracle_command = field<std::string>(j, "oracle_command", "");
	c.witness_path = field<std::string>(j, "witness", "");
	return c;
}

RunResult run(const RunConfig &cfg)
{
	RunResult r;
	auto t0 = std::chrono::steady_clock::now();
	Inputs in;
	Outcome o;
	try {
		in = load_inputs(cfg);
		r.warnings = in.warnings;
		o = execute(cfg, in);
	} catch (const Error &e) {
		r.exit_code = exit_for(e);
		r.verdict = r.exit_code == exit_usage ? "usage" : "unknown";
		r.message = std::string(errc_name(e.code())) + ": " + e.what();
		if (r.exit_code == exit_usage)
			return r;
		o.exit_code = r.exit_code;
		o.verdict = r.verdict;
		o.result = { { "reason", r.message } };
		o.message = r.message;
	} catch (const std::exception &e) {
		r.exit_code = exit_unknown;
		r.verdict = "unknown";
		r.message = std::string("internal error: ") + e.what();
		return r;
	}
	double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

	Json cert;
	cert["tool"] = "gearbox";
	cert["version"] = tool_version;
	cert["mode"] = mode_name(cfg.mode);
	cert["inputs"] = inputs_json(cfg, in);
	cert["config"] = config_json(cfg);
	cert["verdict"] = o.verdict;
	cert["exit_code"] = o.exit_code;
	cert["result"] = o.result;
	cert["statistics"] = stats_json(o.stats, wall);
	if (!in.warnings.empty())
		cert["warnings"] = in.warnings;

	try {
		std::filesystem::path dir(cfg.out_dir.empty() ? "." : cfg.out_dir);
		std::error_code ec;
		std::filesystem::create_directories(dir, ec);
		std::filesystem::path cp = dir / (std::string(mode_name(cfg.mode)) + ".json");
		write_file(cp, cert.dump(2) + "\n");
		r.files.push_back(cp.string());
		for (const auto &[name, data] : o.artifacts) {
			write_file(dir / name, data);
			r.files.push_back((dir / name).string());
		}
	} catch (const Error &e) {
		r.exit_code = exit_usage;
		r.verdict = "usage";
		r.message = std::string(errc_name(e.code())) + ": " + e.what();
		return r;
	}
	r.exit_code = o.exit_code;
	r.verdict = o.verdict;
	r.message = o.message;
	r.certificate = std::move(cert);
	return r;
}

namespace {

/* independent re-validation of the witnesses a search certificate holds */
bool recheck_witnesses(const RunConfig &cfg, const Inputs &in, const Json &cert,
                                      SolverStats &stats)
{
	SolverConfig scfg = solver_config(cfg);
	Goal g = search_goal(cfg, in);
	const Json &res = cert["result"];
	auto valid = [&](const GearProblem &gp, const Assignment &p) {
		if (g.gp.eta && !eval_relaxed(to_nnf(g.gp.eta), p, scfg.delta))
			return false;
		return check_witness(gp, p, scfg, &stats).status == CheckStatus::valid;
	};
	if (cfg.mode == Mode::query || cfg.mode == Mode::synthesize)
		return valid(g.gp, json_assignment(res.at("witness")));
	if (g.objectives.size() == 1) {
		GearProblem at = g.gp;
		Rational z = json_rational(res.at("lower"), "lower");
		at.beta = threshold_beta(g.gp.beta, g.objectives[0].second, z);
		return valid(at, json_assignment(res.at("witness")));
	}
	for (const Json &pt : res.at("points")) {
		GearProblem at = g.gp;
		for (const auto &[name, e] : g.objectives)
			at.beta = threshold_beta(at.beta, e, json_rational(pt.at("lower").at(name), "lower"));
		if (!valid(at, json_assignment(pt.at("witness"))))
			return false;
	}
	return true;
}

}

RunResult recheck(const std::string &certificate_path, const std::string &spec_path,
                  const std::string &model_path)
{
	RunResult r;
	auto t0 = std::chrono::steady_clock::now();
	try {
		Json cert = parse_json_exact(read_text(certificate_path, "certificate"));
		if (!cert.is_object() || !cert.contains("config") || !cert.contains("inputs"))
			throw Error(Errc::usage, "certificate: missing config or inputs");
		RunConfig cfg = config_from_json(cert["config"]);
		/* relative inputs are looked up from the working directory, then
		 * next to the certificate */
		auto locate = [&](std::string &path) {
			namespace fs = std::filesystem;
			if (path.empty() || fs::exists(path) || fs::path(path).is_absolute())
				return;
			fs::path near = fs::path(certificate_path).parent_path() / path;
			if (fs::exists(near))
				path = near.string();
		};
		locate(cfg.spec_path);
		locate(cfg.model_path);
		locate(cfg.witness_path);
		if (!spec_path.empty())
			cfg.spec_path = spec_path;
		if (!model_path.empty())
			cfg.model_path = model_path;
		Inputs in = load_inputs(cfg);
		r.warnings = in.warnings;
		Json now = inputs_json(cfg, in);
		for (const char *k : { "spec", "model", "witness" })
			if (cert["inputs"].contains(k) &&
			    (!now.contains(k) || now[k]["sha256"] != cert["inputs"][k]["sha256"]))
				throw Error(Errc::usage, std::string(k) + ": input differs from the certified one");
		std::string verdict = cert.value("verdict", "");
		SolverStats stats;
		bool same;
		std::string how;
		bool search = cfg.mode == Mode::query || cfg.mode == Mode::synthesize ||
		              cfg.mode == Mode::optimize || cfg.mode == Mode::optsyn ||
		              cfg.mode == Mode::rootcause;
		if (search && verdict == "witness") {
			same = recheck_witnesses(cfg, in, cert, stats);
			how = "witness re-validated";
		} else {
			Outcome o = execute(cfg, in);
			stats = o.stats;
			same = o.verdict == verdict;
			/* generated artifacts must match byte for byte */
			if (cert["result"].contains("sha256"))
				same = same && o.result.value("sha256", "") == cert["result"]["sha256"];
			how = "re-run gave " + o.verdict;
		}
		double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
		r.exit_code = same ? exit_goal : exit_refuted;
		r.verdict = same ? "reproduced" : "not reproduced";
		r.message = verdict + " " + r.verdict + " (" + how + ")";
		r.certificate = { { "tool", "gearbox" }, { "version", tool_version },
		                  { "certificate", certificate_path }, { "verdict", verdict },
		                  { "reproduced", same }, { "statistics", stats_json(stats, wall) } };
	} catch (const Error &e) {
		r.exit_code = exit_for(e);
		r.verdict = r.exit_code == exit_usage ? "usage" : "unknown";
		r.message = std::string(errc_name(e.code())) + ": " + e.what();
	} catch (const Json::exception &e) {
		r.exit_code = exit_usage;
		r.verdict = "usage";
		r.message = std::string("certificate: ") + e.what();
	} catch (const std::exception &e) {
		r.exit_code = exit_unknown;
		r.verdict = "unknown";
		r.message = std::string("internal error: ") + e.what();
	}
	return r;
}

}
