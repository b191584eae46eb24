/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#include "gearbox/error.hh"
#include "gearbox/gear.hh"

#include <algorithm>

namespace gearbox {

const char *region_policy_name(RegionPolicy r)
{
	return r == RegionPolicy::clip ? "clip" : "contain";
}

const char *gear_status_name(GearStatus s)
{
	switch (s) {
	case GearStatus::witness: return "witness";
	case GearStatus::infeasible: return "infeasible";
	case GearStatus::unknown: return "unknown";
	}
	return "?";
}

const char *check_status_name(CheckStatus s)
{
	switch (s) {
	case CheckStatus::valid: return "valid";
	case CheckStatus::cex: return "cex";
	case CheckStatus::unknown: return "unknown";
	}
	return "?";
}

void attach_model(GearProblem &gp, const EncodedModel &em)
{
	gp.phi = gp.phi ? conj({ gp.phi, em.phi }) : em.phi;
	VarSorts sorts = free_vars(em.phi);
	for (const auto &d : em.definitions) {
		Interval iv = interval_bounds(d.term, gp.domain);
		/* slack so that the bounds never bind in the solver */
		Rational lo = iv.lo - 1, hi = iv.hi + 1;
		auto it = gp.domain.find(d.name);
		if (it != gp.domain.end()) {
			lo = std::min(lo, it->second.lo);
			hi = std::max(hi, it->second.hi);
			gp.domain.erase(it);
		}
		if (sorts.count(d.name) && sorts.at(d.name) == Sort::integer)
			gp.domain.emplace(d.name, VarDomain::integer(floor(lo), ceil(hi)));
		else
			gp.domain.emplace(d.name, VarDomain::real(lo, hi));
	}
}

GearProblem gear_problem(const ProblemSpec &spec, const EncodedModel &em)
{
	GearProblem gp;
	Partition part = interface_partition(spec);
	gp.knobs = part.knobs;
	Box all = spec.domain();
	for (const auto &names : { part.knobs, part.inputs })
		for (const std::string &n : names)
			gp.domain.emplace(n, all.at(n));
	/* declared output ranges only widen the enclosure */
	for (const std::string &n : part.outputs)
		if (all.count(n) && !all.at(n).finite)
			gp.domain.emplace(n, all.at(n));
	gp.grids = spec.grids();
	gp.eta = spec.eta;
	gp.alpha = spec.alpha;
	gp.beta = spec.beta;
	gp.theta = spec.theta();
	attach_model(gp, em);
	for (const std::string &n : part.outputs)
		if (!gp.domain.count(n) && all.count(n))
			gp.domain.emplace(n, all.at(n));
	return gp;
}

Formula strengthen(const Formula &f, const Rational &margin)
{
	if (const auto *c = f->get<fm::Cmp>()) {
		switch (c->op) {
		case CmpOp::lt:
		case CmpOp::le: return le(c->lhs, sub(c->rhs, cnst(margin)));
		case CmpOp::gt:
		case CmpOp::ge: return ge(c->lhs, add(c->rhs, cnst(margin)));
		default: return f;
		}
	}
	auto map = [&](const std::vector<Formula> &args) {
		std::vector<Formula> r;
		for (const Formula &g : args)
			r.push_back(strengthen(g, margin));
		return r;
	};
	if (const auto *n = f->get<fm::And>())
		return conj(map(n->args));
	if (const auto *n = f->get<fm::Or>())
		return disj(map(n->args));
	return f;
}

namespace {

Formula all_true(const Formula &f)
{
	return f ? f : true_f();
}

/* centers p with theta(p, c), widened to delta */
Formula exclusion(const GearProblem &gp, const Assignment &c, const Rational &delta)
{
	std::vector<Formula> in;
	for (const std::string &k : gp.knobs) {
		const VarDomain &dom = gp.domain.at(k);
		Expr p = var(k, dom.sort), d = sub(p, cnst(c.at(k)));
		const Radius &rad = gp.theta.of(k);
		if (dom.sort == Sort::set) {
			in.push_back(eq(p, cnst(c.at(k))));
			continue;
		}
		Expr wide = cnst(rad.kind == RadiusKind::absolute ? std::max(rad.r, delta) : delta);
		Formula box = conj({ le(d, wide), ge(d, neg(wide)) });
		if (rad.kind == RadiusKind::relative && rad.r != 0) {
			Expr rho = mul(cnst(rad.r), abs(p));
			box = disj({ conj({ le(d, rho), ge(d, neg(rho)) }), box });
		}
		in.push_back(box);
	}
	return conj(std::move(in));
}

/* the centers whose whole region lies in the domain */
Formula containment(const GearProblem &gp)
{
	std::vector<Formula> parts;
	for (const std::string &k : gp.knobs) {
		const VarDomain &dom = gp.domain.at(k);
		const Radius &rad = gp.theta.of(k);
		if (dom.sort == Sort::set || rad.is_zero())
			continue;
		Expr p = var(k, dom.sort);
		Expr rho = rad.kind == RadiusKind::absolute ? cnst(rad.r) : mul(cnst(rad.r), abs(p));
		parts.push_back(ge(sub(p, rho), cnst(dom.lo)));
		parts.push_back(le(add(p, rho), cnst(dom.hi)));
	}
	return conj(std::move(parts));
}

Assignment knob_part(const GearProblem &gp, const Assignment &a)
{
	Assignment r;
	for (const std::string &k : gp.knobs)
		r.emplace(k, a.at(k));
	return r;
}

}

SolverQuery candidate_query(const GearProblem &gp, const std::vector<Assignment> &excluded,
                            const Rational &delta)
{
	std::vector<Formula> parts { all_true(gp.eta), all_true(gp.alpha), all_true(gp.phi),
	                             strengthen(to_nnf(all_true(gp.beta)), delta) };
	if (gp.region == RegionPolicy::contain)
		parts.push_back(strengthen(to_nnf(containment(gp)), delta));
	/* twice the margin so that a delta-relaxed candidate is strictly outside */
	for (const Assignment &c : excluded)
		parts.push_back(strengthen(to_nnf(lnot(exclusion(gp, c, delta))), 2 * delta));
	SolverQuery q { conj(std::move(parts)), gp.domain, {} };
	for (const auto &[k, g] : gp.grids)
		if (std::find(gp.knobs.begin(), gp.knobs.end(), k) != gp.knobs.end())
			q.grids.emplace(k, g);
	return q;
}

SolverQuery verify_query(const GearProblem &gp, const Assignment &p)
{
	SolverQuery q { conj({ all_true(gp.alpha), all_true(gp.phi), lnot(all_true(gp.beta)) }),
	                gp.domain, {} };
	for (const std::string &k : gp.knobs) {
		const VarDomain &dom = gp.domain.at(k);
		const Rational &c = p.at(k);
		if (!dom.contains(c))
			throw Error(Errc::usage, "knob '" + k + "' value " + to_string(c) +
			            " is outside its domain");
		const Radius &rad = gp.theta.of(k);
		VarDomain region;
		if (dom.sort == Sort::set || rad.is_zero()) {
			region = VarDomain::list(dom.sort, { c });
		} else {
			Interval h = theta_hull(c, rad);
			Rational lo = std::max(h.lo, dom.lo), hi = std::min(h.hi, dom.hi);
			if (dom.finite) {
				std::vector<Rational> vs;
				for (const Rational &v : dom.values)
					if (lo <= v && v <= hi)
						vs.push_back(v);
				region = VarDomain::list(dom.sort, vs);
			} else if (dom.sort == Sort::integer) {
				region = VarDomain::integer(ceil(lo), floor(hi));
			} else {
				region = VarDomain::real(lo, hi);
			}
		}
		q.box[k] = region;
	}
	return q;
}

WitnessCheck check_witness(const GearProblem &gp, const Assignment &p, const SolverConfig &cfg,
                           SolverStats *stats)
{
	Verdict v = check_sat(verify_query(gp, p), cfg, stats);
	switch (v.status) {
	case Status::unsat: return { CheckStatus::valid, {}, {} };
	case Status::sat: return { CheckStatus::cex, std::move(v.witness), {} };
	default: return { CheckStatus::unknown, {}, v.reason };
	}
}

GearResult solve_gear(const GearProblem &gp, const SolverConfig &cfg)
{
	GearResult r;
	std::vector<Assignment> excluded;
	while (true) {
		if (r.iterations >= gp.max_iterations) {
			r.status = GearStatus::unknown;
			r.reason = "iteration limit reached";
			return r;
		}
		Verdict cand = check_sat(candidate_query(gp, excluded, cfg.delta), cfg, &r.stats);
		if (cand.status == Status::unsat) {
			r.status = GearStatus::infeasible;
			return r;
		}
		if (cand.status == Status::unknown) {
			r.status = GearStatus::unknown;
			r.reason = "candidate query: " + cand.reason;
			return r;
		}
		r.iterations++;
		Assignment p = knob_part(gp, cand.witness);
		WitnessCheck chk = check_witness(gp, p, cfg, &r.stats);
		if (chk.status == CheckStatus::valid) {
			r.status = GearStatus::witness;
			r.p = std::move(p);
			return r;
		}
		if (chk.status == CheckStatus::unknown) {
			r.status = GearStatus::unknown;
			r.reason = "verification query: " + chk.reason;
			return r;
		}
		Assignment center = knob_part(gp, chk.cex);
		excluded.push_back(center);
		r.exclusions.push_back({ r.iterations, std::move(p), std::move(center), std::move(chk.cex) });
	}
}

GearResult solve_query(GearProblem gp, const Formula &query, const SolverConfig &cfg)
{
	gp.beta = conj({ all_true(gp.beta), query });
	return solve_gear(gp, cfg);
}

/* ---- certificates ---- */

Json assignment_json(const Assignment &a)
{
	Json j = Json::object();
	for (const auto &[k, v] : a)
		j[k] = to_string(v);
	return j;
}

Assignment json_assignment(const Json &j)
{
	if (!j.is_object())
		throw Error(Errc::malformed_json, "expected an object of values, got " + j.dump());
	Assignment a;
	for (const auto &[k, v] : j.items())
		a.emplace(k, json_rational(v, k.c_str()));
	return a;
}

Json to_json(const GearResult &r)
{
	Json j;
	j["verdict"] = gear_status_name(r.status);
	if (r.status == GearStatus::witness)
		j["witness"] = assignment_json(r.p);
	if (r.status == GearStatus::unknown)
		j["reason"] = r.reason;
	j["iterations"] = r.iterations;
	Json ex = Json::array();
	for (const Exclusion &e : r.exclusions)
		ex.push_back({ { "iteration", e.iteration },
		               { "candidate", assignment_json(e.candidate) },
		               { "center", assignment_json(e.center) },
		               { "counterexample", assignment_json(e.counterexample) } });
	j["exclusions"] = std::move(ex);
	j["queries"] = { { "total", r.stats.queries }, { "sat", r.stats.sat },
	                 { "unsat", r.stats.unsat }, { "unknown", r.stats.unknown },
	                 { "seconds", r.stats.seconds } };
	return j;
}

}
