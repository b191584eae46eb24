/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#pragma once

#include "doe.hh"
#include "gear.hh"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gearbox {

extern const char *const tool_version;

/* Exit codes of every mode. */
enum ExitCode { exit_goal = 0, exit_refuted = 1, exit_unknown = 2, exit_usage = 3 };

enum class Mode { verify, query, synthesize, optimize, optsyn, rootcause, doe, refine, encode };

const char *mode_name(Mode m);
std::optional<Mode> parse_mode(std::string_view s);

using Binding = std::pair<std::string, std::string>; /* label, text */

struct RunConfig {
	Mode mode = Mode::verify;
	std::string spec_path, model_path;
	std::string out_dir = ".";

	Rational epsilon { 1, 20 };
	std::optional<Rational> delta; /* epsilon / 100 when unset */
	Backend backend = Backend::builtin;
	/* external backend; when empty the GEARBOX_SOLVER environment
	 * variable, then "z3 -in" */
	std::string solver_command;
	double timeout = 60;
	uint64_t seed = 0;

	std::vector<Binding> knobs;           /* verify, refine */
	std::vector<std::string> assertions;  /* empty: all declared */
	std::vector<std::string> objectives;  /* empty: all declared */
	std::string query;                    /* query */
	bool theta_identity = false;
	RegionPolicy region = RegionPolicy::contain;
	size_t max_iterations = 20000;
	size_t levels = 5;                    /* pareto */

	DoeMethod method = DoeMethod::latin_hypercube;
	size_t samples = 100;                 /* doe, refine */
	std::vector<std::string> columns;     /* doe; empty: knobs and inputs */

	Rational tau { 1, 10 };
	unsigned workers = 1;
	std::vector<Binding> oracle;          /* output = expression */
	std::string oracle_command;           /* run with sh -c */
	std::string witness_path;             /* refine: certificate holding the center */
};

Json config_json(const RunConfig &cfg);
/* Throws Error(usage) naming the offending field. */
RunConfig config_from_json(const Json &j);

struct RunResult {
	int exit_code = exit_unknown;
	std::string verdict;
	Json certificate;
	std::vector<std::string> files; /* written, certificate first */
	std::string message;            /* one line for the terminal */
	std::vector<std::string> warnings;
};

/* Runs one mode and writes its certificate to <out_dir>/<mode>.json along
 * with the mode's artifacts. Every failure maps to an exit code: input and
 * argument errors to exit_usage, backend and oracle failures to
 * exit_unknown. */
RunResult run(const RunConfig &cfg);

/* Re-checks a certificate against the spec and model it names (or the
 * given replacements): witnesses are validated by independent
 * verification queries, other verdicts by running the mode again. Exit
 * code exit_goal when the verdict is reproduced, exit_refuted when not. */
RunResult recheck(const std::string &certificate_path, const std::string &spec_path = "",
                  const std::string &model_path = "");

std::string sha256_hex(std::string_view data);

}
