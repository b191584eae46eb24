/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#include "gearbox/solver.hh"
#include "gearbox/error.hh"

#include <algorithm>
#include <chrono>
#include <optional>

namespace gearbox {

const char *status_name(Status s)
{
	switch (s) {
	case Status::sat: return "sat";
	case Status::unsat: return "unsat";
	case Status::unknown: return "unknown";
	}
	return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
	return std::chrono::duration<double>(Clock::now() - t0).count();
}

void record(SolverStats *stats, const Verdict &v, Clock::time_point t0)
{
	if (!stats)
		return;
	stats->queries++;
	switch (v.status) {
	case Status::sat: stats->sat++; break;
	case Status::unsat: stats->unsat++; break;
	case Status::unknown: stats->unknown++; break;
	}
	stats->seconds += seconds_since(t0);
}

/* ---- polynomial normal form ----
 *
 * Interval evaluation of lhs - rhs suffers from the dependency problem
 * (x - x encloses [-w, w]); the expanded polynomial cancels such terms. As
 * expansion can also lose tightness (x**2 - 2*x vs (x-1)**2) both
 * enclosures are computed and intersected. */

using Mono = std::vector<std::pair<std::string, unsigned>>;
using Poly = std::map<Mono, Rational>;

constexpr size_t max_poly_terms = 48;

struct Expander {
	std::map<std::string, Expr> vars;

	static Poly constant(const Rational &c)
	{
		Poly p;
		if (c != 0)
			p.emplace(Mono {}, c);
		return p;
	}

	static Mono mono_mul(const Mono &a, const Mono &b)
	{
		Mono r;
		size_t i = 0, j = 0;
		while (i < a.size() || j < b.size()) {
			if (j == b.size() || (i < a.size() && a[i].first < b[j].first))
				r.push_back(a[i++]);
			else if (i == a.size() || b[j].first < a[i].first)
				r.push_back(b[j++]);
			else {
				r.emplace_back(a[i].first, a[i].second + b[j].second);
				i++, j++;
			}
		}
		return r;
	}

	static std::optional<Poly> mul(const Poly &a, const Poly &b)
	{
		if (a.size() * b.size() > 4 * max_poly_terms)
			return std::nullopt;
		Poly r;
		for (const auto &[ma, ca] : a)
			for (const auto &[mb, cb] : b) {
				Rational &c = r[mono_mul(ma, mb)];
				c += ca * cb;
			}
		std::erase_if(r, [](const auto &kv) { return kv.second == 0; });
		if (r.size() > max_poly_terms)
			return std::nullopt;
		return r;
	}

	static Poly scale(Poly p, const Rational &k)
	{
		if (k == 0)
			return {};
		for (auto &[m, c] : p)
			c *= k;
		return p;
	}

	static std::optional<Poly> add(const Poly &a, const Poly &b)
	{
		Poly r = a;
		for (const auto &[m, c] : b)
			r[m] += c;
		std::erase_if(r, [](const auto &kv) { return kv.second == 0; });
		if (r.size() > max_poly_terms)
			return std::nullopt;
		return r;
	}

	std::optional<Poly> operator()(const Expr &e)
	{
		if (const auto *c = e->get<ex::Const>())
			return constant(c->value);
		if (const auto *v = e->get<ex::Var>()) {
			vars.emplace(v->name, e);
			return Poly { { Mono { { v->name, 1u } }, Rational(1) } };
		}
		if (const auto *n = e->get<ex::Add>()) {
			auto a = (*this)(n->lhs), b = a ? (*this)(n->rhs) : std::nullopt;
			return a && b ? add(*a, *b) : std::nullopt;
		}
		if (const auto *n = e->get<ex::Mul>()) {
			auto a = (*this)(n->lhs), b = a ? (*this)(n->rhs) : std::nullopt;
			return a && b ? mul(*a, *b) : std::nullopt;
		}
		if (const auto *n = e->get<ex::Neg>()) {
			auto a = (*this)(n->arg);
			return a ? std::optional(scale(*a, -1)) : std::nullopt;
		}
		if (const auto *n = e->get<ex::LinDiv>()) {
			auto a = (*this)(n->arg);
			return a ? std::optional(scale(*a, 1 / n->divisor)) : std::nullopt;
		}
		if (const auto *n = e->get<ex::Pow>()) {
			auto b = (*this)(n->base);
			if (!b)
				return std::nullopt;
			Poly r = constant(1);
			for (unsigned i = 0; i < n->exponent; i++) {
				auto m = mul(r, *b);
				if (!m)
					return std::nullopt;
				r = std::move(*m);
			}
			return r;
		}
		return std::nullopt;
	}

	Expr rebuild(const Poly &p) const
	{
		Expr sum;
		for (const auto &[m, c] : p) {
			Expr t;
			for (const auto &[name, k] : m) {
				Expr f = k == 1 ? vars.at(name) : gearbox::pow(vars.at(name), k);
				t = t ? gearbox::mul(t, f) : f;
			}
			if (!t)
				t = cnst(c);
			else if (c != 1)
				t = gearbox::mul(cnst(c), t);
			sum = sum ? gearbox::add(sum, t) : t;
		}
		return sum ? sum : cnst(0);
	}
};

/* ---- compiled formula ---- */

struct Atom {
	CmpOp op;
	Expr d;   /* lhs - rhs */
	Expr alt; /* expanded d, may be null */
};

struct Node {
	enum Kind { yes, no, atom, all, any } kind = yes;
	size_t atom_index = 0;
	std::vector<Node> kids;
};

struct Compiled {
	std::vector<Atom> atoms;
	Node root;
};

Node compile(const Formula &f, std::vector<Atom> &atoms)
{
	Node n;
	if (const auto *b = f->get<fm::Bool>()) {
		n.kind = b->value ? Node::yes : Node::no;
	} else if (const auto *c = f->get<fm::Cmp>()) {
		Expr d = fold(sub(c->lhs, c->rhs));
		Expander ex;
		Expr alt;
		if (auto p = ex(d))
			alt = ex.rebuild(*p);
		n.kind = Node::atom;
		n.atom_index = atoms.size();
		atoms.push_back({ c->op, d, alt });
	} else if (const auto *a = f->get<fm::And>()) {
		n.kind = Node::all;
		for (const Formula &g : a->args)
			n.kids.push_back(compile(g, atoms));
	} else if (const auto *o = f->get<fm::Or>()) {
		n.kind = Node::any;
		for (const Formula &g : o->args)
			n.kids.push_back(compile(g, atoms));
	} else {
		throw Error(Errc::invalid_spec, "solver input is not in negation normal form");
	}
	return n;
}

Tri tri_eval(const Node &n, const std::vector<Atom> &atoms, const IntervalEnv &env)
{
	switch (n.kind) {
	case Node::yes: return Tri::yes;
	case Node::no: return Tri::no;
	case Node::atom: {
		const Atom &a = atoms[n.atom_index];
		Interval i = interval_eval(a.d, env);
		if (a.alt) {
			Interval j = interval_eval(a.alt, env);
			i = { std::max(i.lo, j.lo), std::min(i.hi, j.hi) };
		}
		return interval_compare(a.op, i);
	}
	case Node::all: {
		Tri r = Tri::yes;
		for (const Node &k : n.kids) {
			Tri t = tri_eval(k, atoms, env);
			if (t == Tri::no)
				return Tri::no;
			if (t == Tri::maybe)
				r = Tri::maybe;
		}
		return r;
	}
	case Node::any: {
		Tri r = Tri::no;
		for (const Node &k : n.kids) {
			Tri t = tri_eval(k, atoms, env);
			if (t == Tri::yes)
				return Tri::yes;
			if (t == Tri::maybe)
				r = Tri::maybe;
		}
		return r;
	}
	}
	return Tri::maybe;
}

/* ---- preprocessing ---- */

VarDomain effective_domain(const SolverQuery &q, const std::string &name)
{
	auto it = q.box.find(name);
	if (it == q.box.end())
		throw Error(Errc::unbound_variable, "no domain for variable '" + name + "'");
	auto g = q.grids.find(name);
	if (g == q.grids.end())
		return it->second;
	return VarDomain::list(it->second.sort, g->second);
}

Rational sample(const VarDomain &d)
{
	if (d.finite)
		return d.values[(d.values.size() - 1) / 2];
	Rational m = (d.lo + d.hi) / 2;
	return d.sort == Sort::real ? m : floor(m);
}

struct Prepared {
	Formula nnf;                                       /* original, for the final check */
	Formula reduced;                                   /* after elimination */
	std::vector<std::pair<std::string, Expr>> defined; /* in elimination order */
	std::map<std::string, VarDomain> doms;
	bool trivially_unsat = false;
};

/* Removes top-level conjuncts v == t where v does not occur in t, by
 * substituting t for v; the domain of v becomes a constraint on t unless
 * interval bounds show it is implied. */
Prepared prepare(const SolverQuery &q)
{
	Prepared p;
	p.nnf = to_nnf(fold(q.formula));
	for (const auto &[name, _] : q.box)
		p.doms.emplace(name, effective_domain(q, name));
	Formula f = p.nnf;
	bool changed = true;
	while (changed) {
		changed = false;
		std::vector<Formula> cs = conjuncts(f);
		for (size_t i = 0; i < cs.size() && !changed; i++) {
			const auto *c = cs[i]->get<fm::Cmp>();
			if (!c || c->op != CmpOp::eq)
				continue;
			for (int side = 0; side < 2 && !changed; side++) {
				const Expr &lhs = side ? c->rhs : c->lhs, &rhs = side ? c->lhs : c->rhs;
				const auto *v = lhs->get<ex::Var>();
				if (!v)
					continue;
				VarSorts tv = free_vars(rhs);
				if (tv.count(v->name))
					continue;
				auto dit = p.doms.find(v->name);
				if (dit == p.doms.end())
					throw Error(Errc::unbound_variable,
					            "no domain for variable '" + v->name + "'");
				const VarDomain &dom = dit->second;
				std::vector<Formula> rest;
				if (const auto *k = rhs->get<ex::Const>()) {
					if (!dom.contains(k->value)) {
						p.trivially_unsat = true;
						return p;
					}
				} else if (dom.sort == Sort::real && !dom.finite) {
					Box tb;
					for (const auto &[n, _] : tv) {
						auto di = p.doms.find(n);
						if (di == p.doms.end())
							throw Error(Errc::unbound_variable,
							            "no domain for variable '" + n + "'");
						tb.emplace(n, di->second);
					}
					Interval r = interval_bounds(rhs, tb);
					if (r.lo < dom.lo)
						rest.push_back(ge(rhs, cnst(dom.lo)));
					if (r.hi > dom.hi)
						rest.push_back(le(rhs, cnst(dom.hi)));
				} else {
					continue;
				}
				for (size_t j = 0; j < cs.size(); j++)
					if (j != i)
						rest.push_back(cs[j]);
				f = fold(substitute(conj(std::move(rest)), { { v->name, rhs } }));
				p.defined.emplace_back(v->name, rhs);
				p.doms.erase(dit);
				changed = true;
			}
		}
	}
	p.reduced = f;
	return p;
}

/* ---- branch and prune ---- */

struct SBox {
	std::vector<Rational> lo, hi;   /* real and int dims */
	std::vector<size_t> i0, i1;     /* finite dims: index range into values */
};

class BranchAndPrune {
	const std::vector<std::string> &names_;
	const std::vector<VarDomain> &doms_;
	const Compiled &c_;
	const Formula &f_;
	Rational delta_, floor_;

public:
	size_t undecided = 0;

	BranchAndPrune(const std::vector<std::string> &names, const std::vector<VarDomain> &doms,
	               const Compiled &c, const Formula &f, const Rational &delta)
	: names_(names), doms_(doms), c_(c), f_(f), delta_(delta), floor_(delta / 4)
	{}

	SBox root() const
	{
		SBox b;
		for (const VarDomain &d : doms_) {
			b.lo.push_back(d.lo);
			b.hi.push_back(d.hi);
			b.i0.push_back(0);
			b.i1.push_back(d.finite ? d.values.size() - 1 : 0);
		}
		return b;
	}

	IntervalEnv env(const SBox &b) const
	{
		IntervalEnv e;
		for (size_t i = 0; i < doms_.size(); i++) {
			if (doms_[i].finite)
				e.emplace(names_[i], Interval { doms_[i].values[b.i0[i]], doms_[i].values[b.i1[i]] });
			else
				e.emplace(names_[i], Interval { b.lo[i], b.hi[i] });
		}
		return e;
	}

	/* which: 0 midpoint, 1 low corner, 2 high corner */
	Assignment point(const SBox &b, int which) const
	{
		Assignment a;
		for (size_t i = 0; i < doms_.size(); i++) {
			const VarDomain &d = doms_[i];
			Rational v;
			if (d.finite) {
				size_t k = which == 0 ? (b.i0[i] + b.i1[i]) / 2 : which == 1 ? b.i0[i] : b.i1[i];
				v = d.values[k];
			} else {
				v = which == 0 ? (b.lo[i] + b.hi[i]) / 2 : which == 1 ? b.lo[i] : b.hi[i];
				if (d.sort != Sort::real)
					v = floor(v);
			}
			a.emplace(names_[i], std::move(v));
		}
		return a;
	}

	/* index of the dimension to split, or -1 when the box is at the floor */
	int split_dim(const SBox &b) const
	{
		int best = -1;
		size_t best_count = 1;
		for (size_t i = 0; i < doms_.size(); i++) {
			size_t n = 0;
			if (doms_[i].finite)
				n = b.i1[i] - b.i0[i] + 1;
			else if (doms_[i].sort != Sort::real)
				n = Rational(b.hi[i] - b.lo[i] + 1).get_num().get_ui();
			if (n > best_count) {
				best = static_cast<int>(i);
				best_count = n;
			}
		}
		if (best >= 0)
			return best;
		Rational widest = floor_;
		for (size_t i = 0; i < doms_.size(); i++) {
			if (doms_[i].finite || doms_[i].sort != Sort::real)
				continue;
			Rational w = b.hi[i] - b.lo[i];
			if (w > widest) {
				widest = w;
				best = static_cast<int>(i);
			}
		}
		return best;
	}

	std::pair<SBox, SBox> split(const SBox &b, int i) const
	{
		SBox l = b, r = b;
		const VarDomain &d = doms_[i];
		if (d.finite) {
			size_t m = (b.i0[i] + b.i1[i]) / 2;
			l.i1[i] = m;
			r.i0[i] = m + 1;
		} else if (d.sort != Sort::real) {
			Rational m = floor((b.lo[i] + b.hi[i]) / 2);
			l.hi[i] = m;
			r.lo[i] = m + 1;
		} else {
			Rational m = (b.lo[i] + b.hi[i]) / 2;
			l.hi[i] = m;
			r.lo[i] = m;
		}
		return { std::move(l), std::move(r) };
	}

	Verdict run(const SolverConfig &cfg, SolverStats *stats, Clock::time_point t0)
	{
		std::vector<SBox> stack { root() };
		size_t boxes = 0;
		while (!stack.empty()) {
			SBox b = std::move(stack.back());
			stack.pop_back();
			if (++boxes > cfg.max_boxes) {
				if (stats)
					stats->boxes += boxes;
				return Verdict::unknown("box limit reached");
			}
			if ((boxes & 255) == 0 && seconds_since(t0) > cfg.timeout) {
				if (stats)
					stats->boxes += boxes;
				return Verdict::unknown("timeout");
			}
			Tri t = tri_eval(c_.root, c_.atoms, env(b));
			if (t == Tri::no)
				continue;
			for (int which = 0; which < (t == Tri::yes ? 1 : 3); which++) {
				Assignment a = point(b, which);
				if (eval(f_, a)) {
					if (stats)
						stats->boxes += boxes;
					return Verdict::sat(std::move(a));
				}
			}
			int dim = split_dim(b);
			if (dim < 0) {
				Assignment a = point(b, 0);
				if (eval_relaxed(f_, a, delta_)) {
					if (stats)
						stats->boxes += boxes;
					return Verdict::sat(std::move(a));
				}
				undecided++;
				continue;
			}
			auto [l, r] = split(b, dim);
			stack.push_back(std::move(r));
			stack.push_back(std::move(l));
		}
		if (stats)
			stats->boxes += boxes;
		if (undecided)
			return Verdict::unknown(std::to_string(undecided) +
			                        " boxes at the width floor without a delta-witness");
		return Verdict::unsat();
	}
};

}

Verdict builtin_solve(const SolverQuery &q, const SolverConfig &cfg, SolverStats *stats)
{
	auto t0 = Clock::now();
	if (cfg.delta <= 0)
		throw Error(Errc::usage, "delta must be positive");
	Prepared p = prepare(q);
	Verdict v;
	if (p.trivially_unsat) {
		v = Verdict::unsat();
	} else {
		VarSorts used = free_vars(p.reduced);
		std::vector<std::string> names;
		std::vector<VarDomain> doms;
		for (const auto &[name, _] : used) {
			auto it = p.doms.find(name);
			if (it == p.doms.end())
				throw Error(Errc::unbound_variable, "no domain for variable '" + name + "'");
			names.push_back(name);
			doms.push_back(it->second);
		}
		Compiled c;
		c.root = compile(p.reduced, c.atoms);
		BranchAndPrune bp(names, doms, c, p.reduced, cfg.delta);
		v = bp.run(cfg, stats, t0);
		if (v.status == Status::sat) {
			for (const auto &[name, d] : p.doms)
				v.witness.emplace(name, sample(d));
			for (auto it = p.defined.rbegin(); it != p.defined.rend(); ++it)
				v.witness[it->first] = eval(it->second, v.witness);
			if (!eval_relaxed(p.nnf, v.witness, cfg.delta))
				v = Verdict::unknown("internal: witness failed the relaxed re-check");
		}
	}
	record(stats, v, t0);
	return v;
}

Verdict check_sat(const SolverQuery &q, const SolverConfig &cfg, SolverStats *stats)
{
	if (cfg.backend == Backend::external)
		return external_solve(q, cfg, stats);
	return builtin_solve(q, cfg, stats);
}

}
