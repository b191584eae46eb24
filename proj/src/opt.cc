/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#include "gearbox/csv.hh"
#include "gearbox/error.hh"
#include "gearbox/opt.hh"

#include <algorithm>
#include <optional>

namespace gearbox {

Formula threshold_beta(const Formula &beta, const Expr &objective, const Rational &z)
{
	Formula at = ge(objective, cnst(z));
	return beta ? conj({ beta, at }) : at;
}

namespace {

void add_stats(SolverStats &to, const SolverStats &s)
{
	to.queries += s.queries;
	to.sat += s.sat;
	to.unsat += s.unsat;
	to.unknown += s.unknown;
	to.boxes += s.boxes;
	to.seconds += s.seconds;
}

}

EpsilonSolution optimize(const GearProblem &gp, const Expr &objective, const Rational &epsilon,
                         const SolverConfig &cfg, const std::string &label)
{
	if (epsilon <= 0)
		throw Error(Errc::usage, "epsilon must be positive");
	if (cfg.delta >= epsilon)
		throw Error(Errc::usage, "delta must be smaller than epsilon");
	EpsilonSolution s;
	s.epsilon = epsilon;
	s.objective = label;

	auto attempt = [&](const Rational &z) {
		GearProblem at = gp;
		at.beta = threshold_beta(gp.beta, objective, z);
		GearResult r = solve_gear(at, cfg);
		add_stats(s.stats, r.stats);
		s.trace.push_back({ z, r.status, r.iterations });
		return r;
	};

	Interval range = interval_bounds(objective, gp.domain);
	Rational lo = range.lo - epsilon, hi = range.hi + epsilon;
	GearResult first = attempt(lo);
	if (first.status != GearStatus::witness) {
		s.status = first.status;
		s.reason = first.reason;
		s.z = lo;
		s.upper = hi;
		return s;
	}
	s.p = first.p;
	/* the enclosure already refutes hi; confirm it for the trace */
	GearResult top = attempt(hi);
	if (top.status != GearStatus::infeasible) {
		s.status = GearStatus::unknown;
		s.reason = top.status == GearStatus::witness ? "objective exceeds its interval enclosure"
		                                             : "threshold " + to_string(hi) + ": " + top.reason;
		s.z = lo;
		s.upper = hi;
		return s;
	}
	Rational stop = epsilon - cfg.delta;
	while (hi - lo > stop) {
		Rational mid = (lo + hi) / 2;
		GearResult r = attempt(mid);
		if (r.status == GearStatus::witness) {
			lo = mid;
			s.p = r.p;
		} else if (r.status == GearStatus::infeasible) {
			hi = mid;
		} else {
			s.status = GearStatus::unknown;
			s.reason = "threshold " + to_string(mid) + ": " + r.reason;
			s.z = lo;
			s.upper = hi;
			return s;
		}
	}
	s.status = GearStatus::witness;
	s.z = lo;
	s.upper = hi;
	return s;
}

EpsilonSolution optsyn(GearProblem gp, const Expr &objective, const std::vector<Formula> &assertions,
                       const Rational &epsilon, const SolverConfig &cfg, const std::string &label)
{
	std::vector<Formula> parts;
	if (gp.beta)
		parts.push_back(gp.beta);
	parts.insert(parts.end(), assertions.begin(), assertions.end());
	gp.beta = conj(std::move(parts));
	return optimize(gp, objective, epsilon, cfg, label);
}

ParetoResult pareto(const GearProblem &gp, const std::vector<std::pair<std::string, Expr>> &objectives,
                    const Rational &epsilon, const SolverConfig &cfg, size_t levels)
{
	if (objectives.empty())
		throw Error(Errc::usage, "pareto needs at least one objective");
	if (levels == 0)
		throw Error(Errc::usage, "pareto needs at least one level");
	ParetoResult res;
	for (const auto &[name, _] : objectives)
		res.objectives.push_back(name);
	size_t k = objectives.size();
	bool failed = false;

	/* maximizes objectives[from..] in order on top of gp; the point bounds
	 * are the held thresholds and the last optimum */
	auto sweep = [&](GearProblem base, std::vector<Rational> bounds, size_t from,
	                 Assignment p) -> std::optional<ParetoPoint> {
		for (size_t j = from; j < k; j++) {
			EpsilonSolution s = optimize(base, objectives[j].second, epsilon, cfg, objectives[j].first);
			add_stats(res.stats, s.stats);
			if (s.status != GearStatus::witness) {
				if (s.status == GearStatus::unknown) {
					failed = true;
					res.status = GearStatus::unknown;
					res.reason = objectives[j].first + ": " + s.reason;
				}
				return std::nullopt;
			}
			Rational held = j + 1 < k ? Rational(s.z - epsilon) : s.z;
			base.beta = threshold_beta(base.beta, objectives[j].second, held);
			bounds.push_back(held);
			p = s.p;
		}
		return ParetoPoint { p, bounds };
	};

	EpsilonSolution top = optimize(gp, objectives[0].second, epsilon, cfg, objectives[0].first);
	add_stats(res.stats, top.stats);
	if (top.status != GearStatus::witness) {
		res.status = top.status;
		res.reason = top.reason;
		return res;
	}
	Rational high = top.z - epsilon, low = high;
	if (k > 1 && levels > 1) {
		/* the first objective at the lexicographic optimum of the others */
		std::vector<std::pair<std::string, Expr>> rest(objectives.begin() + 1, objectives.end());
		rest.push_back(objectives[0]);
		GearProblem base = gp;
		for (size_t j = 0; j < rest.size(); j++) {
			EpsilonSolution s = optimize(base, rest[j].second, epsilon, cfg, rest[j].first);
			add_stats(res.stats, s.stats);
			if (s.status != GearStatus::witness) {
				res.status = s.status == GearStatus::unknown ? GearStatus::unknown : GearStatus::infeasible;
				res.reason = rest[j].first + ": " + s.reason;
				return res;
			}
			if (j + 1 == rest.size())
				low = std::min(high, s.z);
			base.beta = threshold_beta(base.beta, rest[j].second, s.z - epsilon);
		}
	}
	size_t n = k > 1 ? levels : 1;
	std::vector<ParetoPoint> found;
	for (size_t l = 0; l < n; l++) {
		Rational t = n == 1 ? high : high - (high - low) * Rational(l, n - 1);
		GearProblem base = gp;
		base.beta = threshold_beta(gp.beta, objectives[0].second, t);
		auto pt = sweep(base, { t }, 1, top.p);
		if (failed)
			return res;
		if (pt)
			found.push_back(std::move(*pt));
	}

	/* drop points dominated by more than epsilon, then near duplicates */
	auto dominated = [&](const ParetoPoint &a, const ParetoPoint &b) {
		for (size_t i = 0; i < k; i++)
			if (b.bounds[i] < a.bounds[i] + epsilon)
				return false;
		return true;
	};
	auto same = [&](const ParetoPoint &a, const ParetoPoint &b) {
		for (size_t i = 0; i < k; i++)
			if (abs(a.bounds[i] - b.bounds[i]) >= epsilon)
				return false;
		return true;
	};
	for (size_t i = 0; i < found.size(); i++) {
		bool keep = true;
		for (size_t j = 0; j < found.size() && keep; j++)
			if (j != i && dominated(found[i], found[j]))
				keep = false;
		for (const ParetoPoint &q : res.points)
			if (keep && same(found[i], q))
				keep = false;
		if (keep)
			res.points.push_back(found[i]);
	}
	res.status = res.points.empty() ? GearStatus::infeasible : GearStatus::witness;
	return res;
}

Json to_json(const EpsilonSolution &s)
{
	Json j;
	j["verdict"] = gear_status_name(s.status);
	if (!s.objective.empty())
		j["objective"] = s.objective;
	j["epsilon"] = to_string(s.epsilon);
	if (s.status == GearStatus::witness) {
		j["witness"] = assignment_json(s.p);
		j["lower"] = to_string(s.z);
		j["upper"] = to_string(s.upper);
		j["lower_decimal"] = csv_number(s.z);
	}
	if (s.status == GearStatus::unknown) {
		j["reason"] = s.reason;
		j["lower"] = to_string(s.z);
		j["upper"] = to_string(s.upper);
	}
	Json tr = Json::array();
	for (const OptStep &st : s.trace)
		tr.push_back({ { "threshold", to_string(st.threshold) },
		               { "verdict", gear_status_name(st.verdict) },
		               { "iterations", st.iterations } });
	j["trace"] = std::move(tr);
	j["queries"] = { { "total", s.stats.queries }, { "sat", s.stats.sat },
	                 { "unsat", s.stats.unsat }, { "unknown", s.stats.unknown },
	                 { "seconds", s.stats.seconds } };
	return j;
}

Json to_json(const ParetoResult &r)
{
	Json j;
	j["verdict"] = gear_status_name(r.status);
	j["objectives"] = r.objectives;
	if (r.status == GearStatus::unknown)
		j["reason"] = r.reason;
	Json pts = Json::array();
	for (const ParetoPoint &p : r.points) {
		Json b = Json::object();
		for (size_t i = 0; i < r.objectives.size(); i++)
			b[r.objectives[i]] = to_string(p.bounds[i]);
		pts.push_back({ { "witness", assignment_json(p.p) }, { "lower", std::move(b) } });
	}
	j["points"] = std::move(pts);
	j["queries"] = { { "total", r.stats.queries }, { "seconds", r.stats.seconds } };
	return j;
}

std::string pareto_csv(const ParetoResult &r, const std::vector<std::string> &knobs)
{
	std::vector<std::string> head = knobs;
	head.insert(head.end(), r.objectives.begin(), r.objectives.end());
	std::string out = csv_row(head);
	for (const ParetoPoint &p : r.points) {
		std::vector<std::string> row;
		for (const std::string &k : knobs)
			row.push_back(csv_number(p.p.at(k)));
		for (const Rational &b : p.bounds)
			row.push_back(csv_number(b));
		out += csv_row(row);
	}
	return out;
}

}
