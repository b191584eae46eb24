/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#pragma once

#include "gear.hh"

#include <string>
#include <utility>
#include <vector>

namespace gearbox {

struct OptStep {
	Rational threshold;
	GearStatus verdict;
	size_t iterations; /* candidates verified at this threshold */
};

/* Stable maximization of the region minimum of an objective.
 *
 * status witness: p is stable for beta and objective >= z (so z is a
 * certified lower bound of the max-min value) and the threshold upper was
 * refuted; upper - z <= epsilon - delta, so z <= max-min < z + epsilon up
 * to the solver slack. */
struct EpsilonSolution {
	GearStatus status = GearStatus::unknown;
	Assignment p;
	Rational z, upper, epsilon;
	std::string objective;
	std::vector<OptStep> trace;
	std::string reason; /* unknown only */
	SolverStats stats;
};

/* beta and objective >= z */
Formula threshold_beta(const Formula &beta, const Expr &objective, const Rational &z);

/* Bisection on a threshold z over solve_gear with beta and objective >= z,
 * starting from an interval enclosure of the objective over the domain
 * widened by epsilon. Requires 0 < delta < epsilon. */
EpsilonSolution optimize(const GearProblem &gp, const Expr &objective, const Rational &epsilon,
                         const SolverConfig &cfg, const std::string &label = "");

/* optimize with beta strengthened to beta and all assertions */
EpsilonSolution optsyn(GearProblem gp, const Expr &objective, const std::vector<Formula> &assertions,
                       const Rational &epsilon, const SolverConfig &cfg,
                       const std::string &label = "");

struct ParetoPoint {
	Assignment p;
	std::vector<Rational> bounds; /* certified lower bound per objective */
};

struct ParetoResult {
	GearStatus status = GearStatus::unknown; /* witness when points were found */
	std::vector<std::string> objectives;
	std::vector<ParetoPoint> points;
	std::string reason;
	SolverStats stats;
};

/* epsilon-constraint sweep: the first objective is held above levels
 * thresholds spread between its stable maximum and its value at the
 * lexicographic optimum of the others; at each level the remaining
 * objectives are maximized in order, each one then kept within epsilon of
 * its optimum. Points dominated by more than epsilon in every objective and
 * duplicates are dropped. */
ParetoResult pareto(const GearProblem &gp, const std::vector<std::pair<std::string, Expr>> &objectives,
                    const Rational &epsilon, const SolverConfig &cfg, size_t levels = 5);

Json to_json(const EpsilonSolution &s);
Json to_json(const ParetoResult &r);

/* knobs then objective bounds, one row per point */
std::string pareto_csv(const ParetoResult &r, const std::vector<std::string> &knobs);

}
