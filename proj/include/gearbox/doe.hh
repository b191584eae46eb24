/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#pragma once

#include "json_util.hh"
#include "model.hh"
#include "spec.hh"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gearbox {

enum class DoeMethod { full_factorial, latin_hypercube, uniform_random };

const char *doe_method_name(DoeMethod m);
std::optional<DoeMethod> parse_doe_method(std::string_view s);

struct Design {
	DoeMethod method = DoeMethod::uniform_random;
	uint64_t seed = 0;
	std::vector<std::string> columns;
	std::vector<std::vector<Rational>> rows; /* set values as category indices */
};

/* Sampling plan over the given knob and input columns (all knobs then all
 * inputs when empty). Rows respect declared ranges and knob grids.
 *
 * full_factorial: Cartesian product of the grid, int, finite or set values
 * of each column, first column slowest; n is ignored. Throws
 * Error(ungridded_factorial_dimension) for a real column without a grid.
 * latin_hypercube: n rows; each column is cut into n strata and every
 * stratum receives one row, strata permuted per column.
 * uniform_random: n independent uniform rows.
 *
 * Real values are drawn on a lattice of 10^6 steps per stratum (per range
 * for uniform_random). Deterministic in seed. */
Design doe_generate(const ProblemSpec &spec, DoeMethod method, size_t n, uint64_t seed,
                    std::vector<std::string> columns = {});

/* header of labels, one record per row; set columns by category name */
std::string design_csv(const Design &d, const ProblemSpec &spec);

/* The system under study: either one expression per model output over the
 * knobs and inputs, or an external command that reads one CSV record of
 * knob and input values (all knobs then all inputs, spec order) on stdin
 * and writes one CSV record of output values, model output order, to
 * stdout, exiting 0. */
struct SystemOracle {
	std::vector<std::pair<std::string, Expr>> exprs;
	std::string command;
	std::vector<std::string> args;
	double timeout = 60;

	bool external() const { return !command.empty(); }
};

struct RefineConfig {
	size_t n = 100;
	uint64_t seed = 0;
	Rational tau = Rational(1, 10);
	unsigned workers = 1; /* concurrent oracle calls */
};

struct RefineSample {
	Assignment point; /* knobs and inputs */
	Assignment model, system;
	std::vector<Rational> discrepancy; /* per output, absolute */
};

struct RefinementReport {
	Assignment center;
	std::map<std::string, Interval> region; /* clipped theta hull per knob */
	std::vector<std::string> columns, outputs;
	std::vector<RefineSample> samples;
	std::vector<Rational> max_discrepancy; /* per output */
	Rational tau;
	bool adequate = false;
	size_t attempts = 0; /* draws including alpha rejections */
	std::string dataset_path;
};

/* Samples cfg.n points with knobs uniform in the theta region of center
 * (clipped to domains and grids) and inputs uniform over their domains,
 * rejecting draws where alpha fails; evaluates model and system and
 * compares. adequate iff every discrepancy is at most cfg.tau. Set outputs
 * differ by 1 when their categories differ.
 *
 * Throws Error(alpha_rejection_exhausted) after 100 n draws and
 * Error(oracle_failure) naming the first failing row. */
RefinementReport refine_region(const Assignment &center, const ProblemSpec &spec,
                               const ModelArtifact &model, const SystemOracle &oracle,
                               const ThetaSpec &theta, const RefineConfig &cfg);

/* knob and input columns, system outputs, and a weight column of 1s */
std::string dataset_csv(const RefinementReport &r, const ProblemSpec &spec);

Json to_json(const RefinementReport &r);

}
