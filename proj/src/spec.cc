/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#include "gearbox/spec.hh"
#include "gearbox/error.hh"
#include "gearbox/json_util.hh"

#include <set>

namespace gearbox {

const char *interface_name(Interface i)
{
	switch (i) {
	case Interface::input: return "input";
	case Interface::knob: return "knob";
	case Interface::output: return "output";
	}
	return "?";
}

const VarDecl *ProblemSpec::find(std::string_view label) const
{
	for (const VarDecl &v : variables)
		if (v.label == label)
			return &v;
	return nullptr;
}

const VarDecl &ProblemSpec::at(std::string_view label) const
{
	if (const VarDecl *v = find(label))
		return *v;
	throw Error(Errc::undeclared_variable,
	            "undeclared variable '" + std::string(label) + "'");
}

VarEnv ProblemSpec::env() const
{
	VarEnv env;
	for (const VarDecl &v : variables) {
		VarInfo info { v.type, nullptr };
		if (v.type == Sort::set)
			info.categories = std::make_shared<const std::vector<std::string>>(v.categories);
		env.emplace(v.label, std::move(info));
	}
	return env;
}

Expr ProblemSpec::variable(std::string_view label) const
{
	const VarDecl &v = at(label);
	Categories cats;
	if (v.type == Sort::set)
		cats = std::make_shared<const std::vector<std::string>>(v.categories);
	return var(v.label, v.type, std::move(cats));
}

namespace {

std::vector<Rational> category_indices(size_t n)
{
	std::vector<Rational> r;
	for (size_t i = 0; i < n; i++)
		r.emplace_back(static_cast<long>(i));
	return r;
}

}

Box ProblemSpec::domain() const
{
	Box b;
	for (const VarDecl &v : variables) {
		if (v.type == Sort::set)
			b.emplace(v.label, VarDomain::list(Sort::set, category_indices(v.categories.size())));
		else if (v.range && v.type == Sort::integer)
			b.emplace(v.label, VarDomain::integer(v.range->lo, v.range->hi));
		else if (v.range)
			b.emplace(v.label, VarDomain::real(v.range->lo, v.range->hi));
	}
	return b;
}

std::map<std::string, std::vector<Rational>> ProblemSpec::grids() const
{
	std::map<std::string, std::vector<Rational>> g;
	for (const VarDecl &v : variables)
		if (v.grid)
			g.emplace(v.label, *v.grid);
	return g;
}

ThetaSpec ProblemSpec::theta() const
{
	ThetaSpec ts;
	for (const VarDecl &v : variables) {
		if (v.iface != Interface::knob)
			continue;
		if (v.rad_abs)
			ts.radii[v.label] = Radius::absolute(*v.rad_abs);
		else if (v.rad_rel)
			ts.radii[v.label] = Radius::relative(*v.rad_rel);
		else
			ts.radii[v.label] = Radius::exact();
	}
	return ts;
}

const Formula *ProblemSpec::assertion(std::string_view label) const
{
	for (const auto &[k, f] : assertions)
		if (k == label)
			return &f;
	return nullptr;
}

const Expr *ProblemSpec::objective(std::string_view label) const
{
	for (const auto &[k, e] : objectives)
		if (k == label)
			return &e;
	return nullptr;
}

namespace {

[[noreturn]] void invalid(const std::string &msg)
{
	throw Error(Errc::invalid_spec, msg);
}

std::string get_string(const Json &obj, const char *field, const std::string &ctx)
{
	auto it = obj.find(field);
	if (it == obj.end())
		invalid(ctx + ": missing field '" + field + "'");
	if (!it->is_string())
		invalid(ctx + ": field '" + field + "' must be a string");
	return it->get<std::string>();
}

VarDecl parse_var(const Json &j)
{
	if (!j.is_object())
		invalid("variable entries must be objects");
	VarDecl v;
	v.label = get_string(j, "label", "variable");
	const std::string ctx = "variable '" + v.label + "'";

	std::string iface = get_string(j, "interface", ctx);
	if (iface == "input") v.iface = Interface::input;
	else if (iface == "knob") v.iface = Interface::knob;
	else if (iface == "output") v.iface = Interface::output;
	else
		throw Error(Errc::unknown_interface, ctx + ": unknown interface '" + iface + "'");

	std::string type = get_string(j, "type", ctx);
	if (type == "real") v.type = Sort::real;
	else if (type == "int") v.type = Sort::integer;
	else if (type == "set") v.type = Sort::set;
	else
		throw Error(Errc::unknown_type, ctx + ": unknown type '" + type + "'");

	for (const auto &[key, _] : j.items())
		if (key != "label" && key != "interface" && key != "type" &&
		    key != "range" && key != "grid" && key != "rad-abs" && key != "rad-rel")
			invalid(ctx + ": unknown field '" + key + "'");

	if (auto it = j.find("range"); it != j.end()) {
		if (!it->is_array())
			invalid(ctx + ": range must be an array");
		if (v.type == Sort::set) {
			if (it->empty())
				invalid(ctx + ": set range must list at least one value");
			for (const Json &x : *it)
				v.categories.push_back(x.is_string() ? x.get<std::string>() : x.dump());
			std::set<std::string> uniq(v.categories.begin(), v.categories.end());
			if (uniq.size() != v.categories.size())
				invalid(ctx + ": duplicate set values");
		} else {
			if (it->size() != 2)
				invalid(ctx + ": range must be [lo, hi]");
			Interval r { json_rational((*it)[0], "range"), json_rational((*it)[1], "range") };
			if (r.lo > r.hi)
				invalid(ctx + ": empty range");
			if (v.type == Sort::integer && ceil(r.lo) > floor(r.hi))
				invalid(ctx + ": int range contains no integer");
			v.range = r;
		}
	} else if (v.type == Sort::set) {
		invalid(ctx + ": set variables need a value list in 'range'");
	} else if (v.iface != Interface::output) {
		invalid(ctx + ": knobs and inputs need a bounded range");
	}

	auto radius = [&](const char *field) -> std::optional<Rational> {
		auto it = j.find(field);
		if (it == j.end())
			return std::nullopt;
		if (v.iface != Interface::knob)
			throw Error(Errc::radius_on_non_knob,
			            ctx + ": '" + field + "' is only allowed on knobs");
		if (v.type == Sort::set)
			invalid(ctx + ": categorical knobs cannot have a radius");
		Rational r = json_rational(*it, field);
		if (r < 0)
			invalid(ctx + ": negative radius");
		return r;
	};
	v.rad_abs = radius("rad-abs");
	v.rad_rel = radius("rad-rel");
	if (v.rad_abs && v.rad_rel)
		invalid(ctx + ": at most one of rad-abs and rad-rel");

	if (auto it = j.find("grid"); it != j.end()) {
		if (v.iface != Interface::knob)
			invalid(ctx + ": grids are only allowed on knobs");
		if (v.type == Sort::set)
			invalid(ctx + ": categorical knobs cannot have a grid");
		if (!it->is_array() || it->empty())
			invalid(ctx + ": grid must be a nonempty array");
		std::vector<Rational> g;
		for (const Json &x : *it) {
			Rational q = json_rational(x, "grid");
			if (!v.range->contains(q) || (v.type == Sort::integer && !is_integer(q)))
				throw Error(Errc::grid_out_of_range,
				            ctx + ": grid value " + to_string(q) + " outside range");
			g.push_back(std::move(q));
		}
		v.grid = std::move(g);
	}
	return v;
}

Formula parse_field(const Json &root, const char *field, const VarEnv &env)
{
	auto it = root.find(field);
	if (it == root.end())
		return true_f();
	if (it->is_boolean())
		return boolean(it->get<bool>());
	if (!it->is_string())
		invalid(std::string("'") + field + "' must be an expression string");
	return parse_formula(it->get<std::string>(), env);
}

void check_vars(const Formula &f, const ProblemSpec &s, std::set<Interface> allowed,
                const std::string &what)
{
	for (const auto &[name, _] : free_vars(f))
		if (!allowed.count(s.at(name).iface))
			invalid(what + " may not reference " +
			        interface_name(s.at(name).iface) + " '" + name + "'");
}

}

ProblemSpec parse_spec(std::string_view text)
{
	Json root = parse_json_exact(text);
	if (!root.is_object())
		throw Error(Errc::malformed_json, "specification must be a JSON object");

	ProblemSpec s;
	if (auto it = root.find("version"); it != root.end()) {
		if (!it->is_string())
			invalid("'version' must be a string");
		s.version = it->get<std::string>();
	}
	if (s.version != "1.2")
		s.warnings.push_back("specification version '" + s.version +
		                     "' differs from supported version 1.2");

	for (const auto &[key, _] : root.items())
		if (key != "version" && key != "variables" && key != "alpha" &&
		    key != "beta" && key != "eta" && key != "assertions" &&
		    key != "objectives")
			s.warnings.push_back("ignoring unknown field '" + key + "'");

	auto vars = root.find("variables");
	if (vars == root.end() || !vars->is_array())
		invalid("'variables' must be an array");
	std::set<std::string> seen;
	for (const Json &j : *vars) {
		VarDecl v = parse_var(j);
		if (!seen.insert(v.label).second)
			invalid("duplicate variable '" + v.label + "'");
		s.variables.push_back(std::move(v));
	}
	bool has_output = false;
	for (const VarDecl &v : s.variables)
		has_output |= v.iface == Interface::output;
	if (!has_output)
		invalid("at least one output variable must be declared");

	VarEnv env = s.env();
	s.alpha = parse_field(root, "alpha", env);
	s.beta = parse_field(root, "beta", env);
	s.eta = parse_field(root, "eta", env);
	check_vars(s.eta, s, { Interface::knob }, "eta");
	check_vars(s.alpha, s, { Interface::knob, Interface::input }, "alpha");

	auto named = [&](const char *field, auto &&parse) {
		auto it = root.find(field);
		if (it == root.end())
			return;
		if (!it->is_object())
			invalid(std::string("'") + field + "' must be an object");
		for (const auto &[k, v] : it->items()) {
			if (!v.is_string())
				invalid(std::string(field) + " '" + k + "' must be an expression string");
			parse(k, v.template get<std::string>());
		}
	};
	named("assertions", [&](const std::string &k, const std::string &t) {
		s.assertions.emplace_back(k, parse_formula(t, env));
	});
	named("objectives", [&](const std::string &k, const std::string &t) {
		s.objectives.emplace_back(k, parse_expr(t, env));
	});
	return s;
}

std::string serialize(const ProblemSpec &s)
{
	Json root = Json::object();
	root["version"] = s.version;
	Json vars = Json::array();
	for (const VarDecl &v : s.variables) {
		Json j = Json::object();
		j["label"] = v.label;
		j["interface"] = interface_name(v.iface);
		j["type"] = sort_name(v.type);
		if (v.type == Sort::set)
			j["range"] = v.categories;
		else if (v.range)
			j["range"] = Json::array({ rational_json(v.range->lo), rational_json(v.range->hi) });
		if (v.grid) {
			Json g = Json::array();
			for (const Rational &q : *v.grid)
				g.push_back(rational_json(q));
			j["grid"] = std::move(g);
		}
		if (v.rad_abs)
			j["rad-abs"] = rational_json(*v.rad_abs);
		if (v.rad_rel)
			j["rad-rel"] = rational_json(*v.rad_rel);
		vars.push_back(std::move(j));
	}
	root["variables"] = std::move(vars);
	root["alpha"] = to_string(s.alpha);
	root["beta"] = to_string(s.beta);
	root["eta"] = to_string(s.eta);
	Json a = Json::object();
	for (const auto &[k, f] : s.assertions)
		a[k] = to_string(f);
	root["assertions"] = std::move(a);
	Json o = Json::object();
	for (const auto &[k, e] : s.objectives)
		o[k] = to_string(e);
	root["objectives"] = std::move(o);
	return root.dump(2);
}

namespace {

bool same_interval(const std::optional<Interval> &a, const std::optional<Interval> &b)
{
	if (!a || !b)
		return !a && !b;
	return a->lo == b->lo && a->hi == b->hi;
}

}

bool equal(const ProblemSpec &a, const ProblemSpec &b)
{
	if (a.version != b.version || a.variables.size() != b.variables.size() ||
	    a.assertions.size() != b.assertions.size() ||
	    a.objectives.size() != b.objectives.size())
		return false;
	for (size_t i = 0; i < a.variables.size(); i++) {
		const VarDecl &x = a.variables[i], &y = b.variables[i];
		if (x.label != y.label || x.iface != y.iface || x.type != y.type ||
		    !same_interval(x.range, y.range) || x.categories != y.categories ||
		    x.grid != y.grid || x.rad_abs != y.rad_abs || x.rad_rel != y.rad_rel)
			return false;
	}
	if (!equal(a.eta, b.eta) || !equal(a.alpha, b.alpha) || !equal(a.beta, b.beta))
		return false;
	for (size_t i = 0; i < a.assertions.size(); i++)
		if (a.assertions[i].first != b.assertions[i].first ||
		    !equal(a.assertions[i].second, b.assertions[i].second))
			return false;
	for (size_t i = 0; i < a.objectives.size(); i++)
		if (a.objectives[i].first != b.objectives[i].first ||
		    !equal(a.objectives[i].second, b.objectives[i].second))
			return false;
	return true;
}

Partition interface_partition(const ProblemSpec &s)
{
	Partition p;
	for (const VarDecl &v : s.variables) {
		switch (v.iface) {
		case Interface::knob: p.knobs.push_back(v.label); break;
		case Interface::input: p.inputs.push_back(v.label); break;
		case Interface::output: p.outputs.push_back(v.label); break;
		}
	}
	return p;
}

}
