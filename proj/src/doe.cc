/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#include "gearbox/csv.hh"
#include "gearbox/doe.hh"
#include "gearbox/error.hh"
#include "gearbox/gear.hh"
#include "gearbox/process.hh"

#include <algorithm>
#include <atomic>
#include <exception>
#include <random>
#include <thread>

#include <sys/wait.h>

namespace gearbox {

const char *doe_method_name(DoeMethod m)
{
	switch (m) {
	case DoeMethod::full_factorial: return "full_factorial";
	case DoeMethod::latin_hypercube: return "latin_hypercube";
	case DoeMethod::uniform_random: return "uniform_random";
	}
	return "?";
}

std::optional<DoeMethod> parse_doe_method(std::string_view s)
{
	for (DoeMethod m : { DoeMethod::full_factorial, DoeMethod::latin_hypercube,
	                     DoeMethod::uniform_random })
		if (s == doe_method_name(m))
			return m;
	return std::nullopt;
}

namespace {

constexpr long lattice = 1000000;
constexpr size_t max_rows = 10000000;

using Rng = std::mt19937_64;

uint64_t draw(Rng &rng, uint64_t n)
{
	return std::uniform_int_distribution<uint64_t>(0, n - 1)(rng);
}

/* a + (b - a) k / steps */
Rational lerp(const Rational &a, const Rational &b, uint64_t k, const Rational &steps)
{
	Rational v = a + (b - a) * Rational(mpz_class(std::to_string(k), 10)) / steps;
	v.canonicalize();
	return v;
}

/* The values a column may take when it is discrete, in increasing order. */
std::optional<std::vector<Rational>> discrete_values(const VarDomain &d, const std::vector<Rational> *grid,
                                                     const Interval &within)
{
	std::vector<Rational> out;
	if (grid || d.finite) {
		for (const Rational &v : grid ? *grid : d.values)
			if (v >= within.lo && v <= within.hi && d.contains(v))
				out.push_back(v);
		std::sort(out.begin(), out.end());
		out.erase(std::unique(out.begin(), out.end()), out.end());
		return out;
	}
	if (d.sort != Sort::integer)
		return std::nullopt;
	Rational lo = ceil(std::max(d.lo, within.lo)), hi = floor(std::min(d.hi, within.hi));
	if (hi >= lo && hi - lo >= max_rows)
		throw Error(Errc::usage, "integer range too large to enumerate");
	for (Rational v = lo; v <= hi; v += 1)
		out.push_back(v);
	return out;
}

struct Column {
	std::string label;
	VarDomain dom;
	const std::vector<Rational> *grid = nullptr;
};

std::vector<Column> design_columns(const ProblemSpec &spec, std::vector<std::string> labels,
                                   const Box &dom, const std::map<std::string, std::vector<Rational>> &grids)
{
	if (labels.empty()) {
		Partition part = interface_partition(spec);
		labels = part.knobs;
		labels.insert(labels.end(), part.inputs.begin(), part.inputs.end());
	}
	std::vector<Column> cols;
	for (const std::string &l : labels) {
		const VarDecl *v = spec.find(l);
		if (!v)
			throw Error(Errc::undeclared_variable, "undeclared column '" + l + "'");
		if (v->iface == Interface::output)
			throw Error(Errc::usage, "column '" + l + "' is an output");
		for (const Column &c : cols)
			if (c.label == l)
				throw Error(Errc::usage, "duplicate column '" + l + "'");
		auto g = grids.find(l);
		cols.push_back({ l, dom.at(l), g == grids.end() ? nullptr : &g->second });
	}
	return cols;
}

Rational uniform_value(Rng &rng, const VarDomain &d, const std::vector<Rational> *grid,
                       const Interval &within)
{
	if (auto vs = discrete_values(d, grid, within)) {
		if (vs->empty())
			throw Error(Errc::usage, "no admissible value in the sampling range");
		return (*vs)[draw(rng, vs->size())];
	}
	Rational lo = std::max(d.lo, within.lo), hi = std::min(d.hi, within.hi);
	return lerp(lo, hi, draw(rng, lattice + 1), lattice);
}

std::string cell(const ProblemSpec &spec, const std::string &label, const Rational &v)
{
	const VarDecl &d = spec.at(label);
	if (d.type == Sort::set)
		return d.categories.at(static_cast<size_t>(v.get_num().get_ui()));
	return csv_number(v);
}

Rational parse_cell(const ProblemSpec &spec, const std::string &label, const std::string &text)
{
	const VarDecl *d = spec.find(label);
	if (d && d->type == Sort::set) {
		for (size_t i = 0; i < d->categories.size(); i++)
			if (d->categories[i] == text)
				return Rational(static_cast<long>(i));
		throw Error(Errc::oracle_failure, "unknown category '" + text + "' for " + label);
	}
	auto q = parse_rational(text);
	if (!q)
		throw Error(Errc::oracle_failure, "not a number '" + text + "' for " + label);
	return *q;
}

}

Design doe_generate(const ProblemSpec &spec, DoeMethod method, size_t n, uint64_t seed,
                    std::vector<std::string> columns)
{
	Box dom = spec.domain();
	auto grids = spec.grids();
	std::vector<Column> cols = design_columns(spec, std::move(columns), dom, grids);
	Design d;
	d.method = method;
	d.seed = seed;
	for (const Column &c : cols)
		d.columns.push_back(c.label);
	auto whole = [](const VarDomain &v) {
		return Interval { v.lo, v.hi };
	};

	if (method == DoeMethod::full_factorial) {
		std::vector<std::vector<Rational>> values;
		size_t total = 1;
		for (const Column &c : cols) {
			auto vs = discrete_values(c.dom, c.grid, whole(c.dom));
			if (!vs)
				throw Error(Errc::ungridded_factorial_dimension,
				            "column '" + c.label + "' is real and has no grid");
			if (vs->empty())
				return d;
			if (total > max_rows / vs->size())
				throw Error(Errc::usage, "full factorial design too large");
			total *= vs->size();
			values.push_back(std::move(*vs));
		}
		std::vector<size_t> idx(cols.size(), 0);
		for (size_t r = 0; r < total; r++) {
			std::vector<Rational> row;
			for (size_t i = 0; i < cols.size(); i++)
				row.push_back(values[i][idx[i]]);
			d.rows.push_back(std::move(row));
			for (size_t i = cols.size(); i-- > 0;) {
				if (++idx[i] < values[i].size())
					break;
				idx[i] = 0;
			}
		}
		return d;
	}

	if (n == 0)
		throw Error(Errc::usage, "the design needs at least one row");
	if (n > max_rows)
		throw Error(Errc::usage, "design too large");
	Rng rng(seed);
	d.rows.assign(n, std::vector<Rational>(cols.size()));
	if (method == DoeMethod::uniform_random) {
		for (size_t r = 0; r < n; r++)
			for (size_t i = 0; i < cols.size(); i++)
				d.rows[r][i] = uniform_value(rng, cols[i].dom, cols[i].grid, whole(cols[i].dom));
		return d;
	}

	/* latin hypercube, column by column */
	Rational steps = Rational(static_cast<long>(n)) * lattice;
	for (size_t i = 0; i < cols.size(); i++) {
		const Column &c = cols[i];
		std::vector<size_t> strata(n);
		for (size_t j = 0; j < n; j++)
			strata[j] = j;
		std::shuffle(strata.begin(), strata.end(), rng);
		auto vs = discrete_values(c.dom, c.grid, whole(c.dom));
		if (vs && vs->empty())
			throw Error(Errc::usage, "column '" + c.label + "' has no admissible value");
		for (size_t r = 0; r < n; r++) {
			size_t j = strata[r];
			if (vs) {
				/* stratum j covers the value indices [j m / n, (j + 1) m / n) */
				size_t m = vs->size(), a = j * m / n, b = (j + 1) * m / n;
				d.rows[r][i] = (*vs)[b > a ? a + draw(rng, b - a) : a];
			} else {
				uint64_t k = j * static_cast<uint64_t>(lattice) + draw(rng, lattice);
				d.rows[r][i] = lerp(c.dom.lo, c.dom.hi, k, steps);
			}
		}
	}
	return d;
}

std::string design_csv(const Design &d, const ProblemSpec &spec)
{
	std::string out = csv_row(d.columns);
	for (const auto &row : d.rows) {
		std::vector<std::string> f;
		for (size_t i = 0; i < row.size(); i++)
			f.push_back(cell(spec, d.columns[i], row[i]));
		out += csv_row(f);
	}
	return out;
}

RefinementReport refine_region(const Assignment &center, const ProblemSpec &spec,
                               const ModelArtifact &model, const SystemOracle &oracle,
                               const ThetaSpec &theta, const RefineConfig &cfg)
{
	if (cfg.n == 0)
		throw Error(Errc::usage, "refinement needs at least one sample");
	Box dom = spec.domain();
	auto grids = spec.grids();
	Partition part = interface_partition(spec);
	RefinementReport rep;
	rep.center = center;
	rep.tau = cfg.tau;
	rep.outputs = model.outputs;
	rep.columns = part.knobs;
	rep.columns.insert(rep.columns.end(), part.inputs.begin(), part.inputs.end());
	if (!oracle.external()) {
		for (const std::string &o : model.outputs) {
			bool found = false;
			for (const auto &[name, _] : oracle.exprs)
				found = found || name == o;
			if (!found)
				throw Error(Errc::usage, "system oracle has no expression for '" + o + "'");
		}
	}

	for (const std::string &k : part.knobs) {
		auto it = center.find(k);
		if (it == center.end())
			throw Error(Errc::usage, "no value for knob '" + k + "'");
		const VarDomain &d = dom.at(k);
		if (!d.contains(it->second))
			throw Error(Errc::usage, "knob '" + k + "' outside its domain");
		Interval h = d.sort == Sort::set ? Interval { it->second, it->second }
		                                 : theta_hull(it->second, theta.of(k));
		rep.region[k] = { std::max(h.lo, d.lo), std::min(h.hi, d.hi) };
	}

	Rng rng(cfg.seed);
	size_t cap = 100 * cfg.n;
	while (rep.samples.size() < cfg.n) {
		if (rep.attempts == cap)
			throw Error(Errc::alpha_rejection_exhausted,
			            "alpha rejected " + std::to_string(cap) + " draws; " +
			            std::to_string(rep.samples.size()) + " of " + std::to_string(cfg.n) +
			            " samples accepted");
		rep.attempts++;
		RefineSample s;
		for (const std::string &k : part.knobs) {
			const VarDomain &d = dom.at(k);
			auto g = grids.find(k);
			s.point[k] = uniform_value(rng, d, g == grids.end() ? nullptr : &g->second,
			                           rep.region.at(k));
		}
		for (const std::string &x : part.inputs) {
			const VarDomain &d = dom.at(x);
			s.point[x] = uniform_value(rng, d, nullptr, { d.lo, d.hi });
		}
		Assignment y = eval_model(model, s.point);
		for (const std::string &o : model.outputs)
			s.model[o] = y.at(o);
		if (spec.alpha) {
			Assignment all = s.point;
			all.insert(s.model.begin(), s.model.end());
			if (!eval(spec.alpha, all))
				continue;
		}
		rep.samples.push_back(std::move(s));
	}

	/* system evaluation; rows are filled in place so the order is fixed */
	std::vector<std::exception_ptr> failed(rep.samples.size());
	auto evaluate = [&](size_t i) {
		RefineSample &s = rep.samples[i];
		if (!oracle.external()) {
			for (const auto &[name, e] : oracle.exprs)
				s.system[name] = eval(e, s.point);
			return;
		}
		std::vector<std::string> in;
		for (const std::string &c : rep.columns)
			in.push_back(cell(spec, c, s.point.at(c)));
		ProcessResult r = run_process(oracle.command, oracle.args, csv_row(in), oracle.timeout);
		if (r.timed_out)
			throw Error(Errc::oracle_failure, "timeout");
		if (!WIFEXITED(r.status) || WEXITSTATUS(r.status) != 0)
			throw Error(Errc::oracle_failure, "exit status " +
			            std::to_string(WIFEXITED(r.status) ? WEXITSTATUS(r.status) : -1));
		auto out = csv_parse_row(r.out.substr(0, r.out.find('\n')));
		if (!out || out->size() != model.outputs.size())
			throw Error(Errc::oracle_failure, "expected " + std::to_string(model.outputs.size()) +
			            " values, got '" + r.out.substr(0, r.out.find('\n')) + "'");
		for (size_t j = 0; j < model.outputs.size(); j++)
			s.system[model.outputs[j]] = parse_cell(spec, model.outputs[j], (*out)[j]);
	};
	std::atomic<size_t> next { 0 };
	auto worker = [&] {
		for (size_t i; (i = next++) < rep.samples.size();) {
			try {
				evaluate(i);
			} catch (...) {
				failed[i] = std::current_exception();
			}
		}
	};
	unsigned nw = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(rep.samples.size())));
	std::vector<std::thread> pool;
	for (unsigned w = 1; w < nw; w++)
		pool.emplace_back(worker);
	worker();
	for (std::thread &t : pool)
		t.join();
	for (size_t i = 0; i < failed.size(); i++) {
		if (!failed[i])
			continue;
		try {
			std::rethrow_exception(failed[i]);
		} catch (const std::exception &e) {
			throw Error(Errc::oracle_failure, "system oracle failed on row " + std::to_string(i) +
			            ": " + e.what(), i);
		}
	}

	rep.max_discrepancy.assign(model.outputs.size(), Rational(0));
	rep.adequate = true;
	for (RefineSample &s : rep.samples) {
		for (size_t j = 0; j < model.outputs.size(); j++) {
			const std::string &o = model.outputs[j];
			const VarDecl *d = spec.find(o);
			Rational dis = d && d->type == Sort::set ? Rational(s.model.at(o) == s.system.at(o) ? 0 : 1)
			                                         : abs(s.model.at(o) - s.system.at(o));
			rep.max_discrepancy[j] = std::max(rep.max_discrepancy[j], dis);
			s.discrepancy.push_back(std::move(dis));
		}
	}
	for (const Rational &m : rep.max_discrepancy)
		rep.adequate = rep.adequate && m <= cfg.tau;
	return rep;
}

std::string dataset_csv(const RefinementReport &r, const ProblemSpec &spec)
{
	std::vector<std::string> head = r.columns;
	head.insert(head.end(), r.outputs.begin(), r.outputs.end());
	head.push_back("weight");
	std::string out = csv_row(head);
	for (const RefineSample &s : r.samples) {
		std::vector<std::string> f;
		for (const std::string &c : r.columns)
			f.push_back(cell(spec, c, s.point.at(c)));
		for (const std::string &o : r.outputs)
			f.push_back(cell(spec, o, s.system.at(o)));
		f.push_back("1");
		out += csv_row(f);
	}
	return out;
}

Json to_json(const RefinementReport &r)
{
	Json j;
	j["verdict"] = r.adequate ? "ADEQUATE" : "REFINE";
	j["tau"] = to_string(r.tau);
	j["center"] = assignment_json(r.center);
	Json region = Json::object();
	for (const auto &[k, h] : r.region)
		region[k] = { to_string(h.lo), to_string(h.hi) };
	j["region"] = std::move(region);
	Json maxd = Json::object();
	for (size_t i = 0; i < r.outputs.size(); i++)
		maxd[r.outputs[i]] = to_string(r.max_discrepancy[i]);
	j["max_discrepancy"] = std::move(maxd);
	j["samples"] = r.samples.size();
	j["attempts"] = r.attempts;
	Json rows = Json::array();
	for (const RefineSample &s : r.samples) {
		Json d = Json::object();
		for (size_t i = 0; i < r.outputs.size(); i++)
			d[r.outputs[i]] = to_string(s.discrepancy[i]);
		rows.push_back({ { "point", assignment_json(s.point) }, { "model", assignment_json(s.model) },
		                 { "system", assignment_json(s.system) }, { "discrepancy", std::move(d) } });
	}
	j["rows"] = std::move(rows);
	if (!r.dataset_path.empty())
		j["dataset"] = r.dataset_path;
	return j;
}

}
