/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#pragma once

#include "json_util.hh"
#include "model.hh"
#include "solver.hh"
#include "spec.hh"

#include <map>
#include <string>
#include <vector>

namespace gearbox {

/* Where the stability region of a candidate may lie. clip: the region is
 * intersected with the knob domain. contain: candidates are restricted to
 * centers whose whole region lies inside the domain. Witness checks always
 * quantify over the clipped region. */
enum class RegionPolicy { clip, contain };

const char *region_policy_name(RegionPolicy r);

/* exists p. eta(p) and forall p' x y. theta(p, p') => (phi(p', x, y) => (alpha => beta))
 *
 * Formulas are written over the declared names; in the universal part a
 * knob name stands for the shadow copy p'. domain bounds every variable
 * occurring in phi, alpha and beta, including model outputs and auxiliaries. */
struct GearProblem {
	std::vector<std::string> knobs;
	Box domain;
	std::map<std::string, std::vector<Rational>> grids; /* knobs only */
	Formula eta, alpha, beta, phi;
	ThetaSpec theta;
	RegionPolicy region = RegionPolicy::contain;
	size_t max_iterations = 20000;
};

/* Problem from a spec and its encoded model: domain of knobs and inputs
 * from the spec, outputs and auxiliaries bounded by interval enclosures of
 * their defining terms (joined with a declared output range). */
GearProblem gear_problem(const ProblemSpec &spec, const EncodedModel &em);

/* Adds the model constraints and enclosures of em to gp. */
void attach_model(GearProblem &gp, const EncodedModel &em);

enum class GearStatus { witness, infeasible, unknown };
const char *gear_status_name(GearStatus s);

struct Exclusion {
	size_t iteration;
	Assignment candidate;      /* the rejected candidate */
	Assignment center;         /* knob part of its counterexample */
	Assignment counterexample; /* full assignment */
};

struct GearResult {
	GearStatus status = GearStatus::unknown;
	Assignment p;   /* witness knobs */
	size_t iterations = 0; /* candidates verified */
	std::vector<Exclusion> exclusions;
	std::string reason; /* unknown only */
	SolverStats stats;
};

/* Candidate search interleaved with exclusion of the theta-regions around
 * counterexamples. Candidates satisfy eta, the exclusions, alpha, the model
 * and beta with every comparison strengthened by delta; the verification
 * of a candidate uses beta as is. The exclusion around a counterexample p*
 * is the set of centers p with theta(p, p*), widened to delta per knob. */
GearResult solve_gear(const GearProblem &gp, const SolverConfig &cfg);

/* solve_gear with beta strengthened to beta and query */
GearResult solve_query(GearProblem gp, const Formula &query, const SolverConfig &cfg);

enum class CheckStatus { valid, cex, unknown };
const char *check_status_name(CheckStatus s);

struct WitnessCheck {
	CheckStatus status = CheckStatus::unknown;
	Assignment cex;
	std::string reason;
};

/* The single verification query of p: is there p' in the clipped
 * theta-region of p and x, y with alpha, phi and not beta. */
WitnessCheck check_witness(const GearProblem &gp, const Assignment &p, const SolverConfig &cfg,
                           SolverStats *stats = nullptr);

/* Verification query of p as a solver query, for export. */
SolverQuery verify_query(const GearProblem &gp, const Assignment &p);

/* Candidate query with the given exclusion centers, for export. */
SolverQuery candidate_query(const GearProblem &gp, const std::vector<Assignment> &excluded,
                            const Rational &delta);

/* Comparisons of an NNF formula tightened by margin: a <= b becomes
 * a <= b - margin, a >= b becomes a >= b + margin, strict ones likewise;
 * equalities and disequalities are kept. */
Formula strengthen(const Formula &nnf, const Rational &margin);

Json assignment_json(const Assignment &a);
Assignment json_assignment(const Json &j);
Json to_json(const GearResult &r);

}
