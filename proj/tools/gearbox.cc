/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#include "gearbox/cli.hh"
#include "gearbox/error.hh"

#include "CLI11.hpp"

#include <iostream>

using namespace gearbox;

namespace {

struct Flags {
	std::string epsilon = "0.05", delta, tau = "0.1";
	std::string backend = "builtin", theta = "spec", region = "contain", method = "latin_hypercube";
	std::vector<std::string> knobs, oracle;
};

Rational rational_flag(const std::string &text, const char *flag)
{
	auto q = parse_rational(text);
	if (!q)
		throw Error(Errc::usage, std::string(flag) + ": '" + text + "' is not a number");
	return *q;
}

std::vector<Binding> bindings(const std::vector<std::string> &items, const char *flag)
{
	std::vector<Binding> out;
	for (const std::string &s : items) {
		size_t eq = s.find('=');
		if (eq == std::string::npos || eq == 0)
			throw Error(Errc::usage, std::string(flag) + ": expected name=value, got '" + s + "'");
		out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
	}
	return out;
}

void finish(RunConfig &cfg, const Flags &f)
{
	cfg.epsilon = rational_flag(f.epsilon, "--epsilon");
	if (!f.delta.empty())
		cfg.delta = rational_flag(f.delta, "--delta");
	cfg.tau = rational_flag(f.tau, "--tau");
	cfg.backend = f.backend == "external" ? Backend::external : Backend::builtin;
	cfg.theta_identity = f.theta == "identity";
	cfg.region = f.region == "clip" ? RegionPolicy::clip : RegionPolicy::contain;
	cfg.method = *parse_doe_method(f.method);
	cfg.knobs = bindings(f.knobs, "--knob");
	cfg.oracle = bindings(f.oracle, "--oracle");
}

void report(const RunResult &r)
{
	for (const std::string &w : r.warnings)
		std::cerr << "warning: " << w << "\n";
	(r.exit_code == exit_usage ? std::cerr : std::cout) << r.message << "\n";
	for (const std::string &f : r.files)
		std::cout << "wrote " << f << "\n";
}

}

int main(int argc, char **argv)
{
	CLI::App app { "Stable synthesis, verification and optimization over ML models" };
	app.set_version_flag("--version", tool_version);
	app.require_subcommand(1);

	RunConfig cfg;
	Flags f;
	std::string cert_path;

	auto common = [&](CLI::App *sub, bool model) {
		sub->add_option("-s,--spec", cfg.spec_path, "problem spec (JSON)")->required();
		if (model)
			sub->add_option("-m,--model", cfg.model_path, "model artifact (JSON)")->required();
		sub->add_option("-o,--out", cfg.out_dir, "output directory")->capture_default_str();
		sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
	};
	auto solving = [&](CLI::App *sub) {
		sub->add_option("--epsilon", f.epsilon, "optimization accuracy")->capture_default_str();
		sub->add_option("--delta", f.delta, "solver precision (default epsilon/100)");
		sub->add_option("--backend", f.backend, "solver backend")
			->check(CLI::IsMember({ "builtin", "external" }))->capture_default_str();
		sub->add_option("--solver-cmd", cfg.solver_command,
		                "external solver command (default $GEARBOX_SOLVER, then 'z3 -in')");
		sub->add_option("--timeout", cfg.timeout, "seconds per solver query")->capture_default_str();
		sub->add_option("--theta", f.theta, "stability region: as declared, or none")
			->check(CLI::IsMember({ "spec", "identity" }))->capture_default_str();
		sub->add_option("--region", f.region, "candidate regions clipped to or contained in the domain")
			->check(CLI::IsMember({ "clip", "contain" }))->capture_default_str();
		sub->add_option("--max-iterations", cfg.max_iterations, "candidate limit per search")
			->capture_default_str();
	};
	auto mode = [&](const char *name, const char *help, bool model = true) {
		CLI::App *sub = app.add_subcommand(name, help);
		common(sub, model);
		sub->callback([&cfg, name] { cfg.mode = *parse_mode(name); });
		return sub;
	};

	CLI::App *verify = mode("verify", "check assertions on the stability region of fixed knobs");
	solving(verify);
	verify->add_option("-k,--knob", f.knobs, "knob value, name=value")->required();
	verify->add_option("-a,--assertion", cfg.assertions, "assertion name or formula (default all)");

	CLI::App *query = mode("query", "find stable knobs for which a formula holds");
	solving(query);
	query->add_option("-q,--query", cfg.query, "formula over the spec variables")->required();

	CLI::App *synth = mode("synthesize", "find knobs whose stability region satisfies beta");
	solving(synth);
	synth->add_option("-a,--assertion", cfg.assertions, "assertions conjoined to beta");

	for (auto [name, help] : { std::pair { "optimize", "maximize objectives stably" },
	                           std::pair { "optsyn", "maximize objectives subject to the assertions" },
	                           std::pair { "rootcause", "maximize inverted objectives where an assertion fails" } }) {
		CLI::App *sub = mode(name, help);
		solving(sub);
		sub->add_option("-j,--objective", cfg.objectives, "objective name or term (default all)");
		if (std::string(name) != "optimize")
			sub->add_option("-a,--assertion", cfg.assertions, "assertion name or formula (default all)");
		sub->add_option("--levels", cfg.levels, "pareto levels for several objectives")
			->capture_default_str();
	}

	CLI::App *doe = mode("doe", "generate a design of experiments", false);
	doe->add_option("--method", f.method, "design method")
		->check(CLI::IsMember({ "full_factorial", "latin_hypercube", "uniform_random" }))
		->capture_default_str();
	doe->add_option("-n,--samples", cfg.samples, "rows (ignored by full_factorial)")->capture_default_str();
	doe->add_option("-c,--column", cfg.columns, "knob or input column (default all)");

	CLI::App *refine = mode("refine", "sample the system in a stability region");
	refine->add_option("-k,--knob", f.knobs, "region center, name=value");
	refine->add_option("-w,--witness", cfg.witness_path, "certificate holding the region center");
	refine->add_option("--oracle", f.oracle, "system output as a term, output=term");
	refine->add_option("--oracle-cmd", cfg.oracle_command,
	                   "system command: one CSV record in, one CSV record out");
	refine->add_option("-n,--samples", cfg.samples, "sample count")->capture_default_str();
	refine->add_option("--tau", f.tau, "discrepancy tolerance")->capture_default_str();
	refine->add_option("--workers", cfg.workers, "concurrent oracle calls")->capture_default_str();
	refine->add_option("--timeout", cfg.timeout, "seconds per oracle call")->capture_default_str();
	refine->add_option("--theta", f.theta, "stability region: as declared, or none")
		->check(CLI::IsMember({ "spec", "identity" }))->capture_default_str();

	CLI::App *encode = mode("encode", "write the first candidate query as SMT-LIB2");
	solving(encode);

	CLI::App *re = app.add_subcommand("recheck", "re-check a certificate");
	re->add_option("certificate", cert_path, "certificate (JSON)")->required();
	re->add_option("-s,--spec", cfg.spec_path, "spec replacing the certified path");
	re->add_option("-m,--model", cfg.model_path, "model replacing the certified path");

	try {
		app.parse(argc, argv);
	} catch (const CLI::CallForHelp &e) {
		return app.exit(e);
	} catch (const CLI::CallForVersion &e) {
		return app.exit(e);
	} catch (const CLI::ParseError &e) {
		app.exit(e);
		return exit_usage;
	}

	RunResult r;
	if (re->parsed()) {
		r = recheck(cert_path, cfg.spec_path, cfg.model_path);
	} else {
		try {
			finish(cfg, f);
		} catch (const Error &e) {
			std::cerr << errc_name(e.code()) << ": " << e.what() << "\n";
			return exit_usage;
		}
		r = run(cfg);
	}
	report(r);
	return r.exit_code;
}
