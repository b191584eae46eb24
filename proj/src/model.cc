/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#include "gearbox/model.hh"
#include "gearbox/error.hh"
#include "gearbox/parser.hh"
#include "gearbox/spec.hh"

#include <algorithm>
#include <set>

namespace gearbox {

const char *model_kind_name(ModelKind k)
{
	switch (k) {
	case ModelKind::polynomial: return "polynomial";
	case ModelKind::tree: return "tree";
	case ModelKind::forest: return "forest";
	case ModelKind::mlp: return "mlp";
	case ModelKind::expression: return "expression";
	}
	return "?";
}

size_t Tree::leaves() const
{
	return static_cast<size_t>(std::count_if(nodes.begin(), nodes.end(),
	                                         [](const TreeNode &n) { return n.leaf(); }));
}

std::string relu_aux_name(size_t layer, size_t neuron)
{
	return "#h" + std::to_string(layer) + "." + std::to_string(neuron);
}

namespace {

[[noreturn]] void dim_error(const std::string &msg)
{
	throw Error(Errc::dimension_mismatch, "model: " + msg);
}

[[noreturn]] void format_error(const std::string &msg)
{
	throw Error(Errc::invalid_spec, "model: " + msg);
}

const Json &field(const Json &j, const char *name)
{
	if (!j.is_object() || !j.contains(name))
		format_error(std::string("missing field '") + name + "'");
	return j.at(name);
}

const Json &array_field(const Json &j, const char *name)
{
	const Json &a = field(j, name);
	if (!a.is_array())
		format_error(std::string("field '") + name + "' must be an array");
	return a;
}

std::vector<Rational> rationals(const Json &j, const char *what)
{
	if (!j.is_array())
		format_error(std::string(what) + " must be an array");
	std::vector<Rational> r;
	for (const Json &v : j)
		r.push_back(json_rational(v, what));
	return r;
}

std::vector<std::string> labels(const Json &j, const char *name)
{
	std::vector<std::string> r;
	std::set<std::string> seen;
	for (const Json &v : array_field(j, name)) {
		if (!v.is_string())
			format_error(std::string(name) + " must hold strings");
		if (!seen.insert(v.get<std::string>()).second)
			format_error("duplicate label '" + v.get<std::string>() + "'");
		r.push_back(v.get<std::string>());
	}
	return r;
}

int node_index(const Json &j, const char *name)
{
	const Json &v = field(j, name);
	if (!v.is_number_integer())
		format_error(std::string("tree field '") + name + "' must be an integer");
	return v.get<int>();
}

Tree load_tree(const Json &j, size_t nfeatures, size_t noutputs)
{
	Tree t;
	for (const Json &n : array_field(j, "nodes")) {
		TreeNode node;
		if (n.contains("value")) {
			node.value = rationals(n.at("value"), "leaf value");
			if (node.value.size() != noutputs)
				dim_error("leaf has " + std::to_string(node.value.size()) +
				          " values for " + std::to_string(noutputs) + " outputs");
		} else {
			node.feature = node_index(n, "feature");
			node.threshold = json_rational(field(n, "threshold"), "threshold");
			node.left = node_index(n, "left");
			node.right = node_index(n, "right");
			if (node.feature < 0 || static_cast<size_t>(node.feature) >= nfeatures)
				dim_error("split feature index " + std::to_string(node.feature) +
				          " out of range");
		}
		t.nodes.push_back(std::move(node));
	}
	if (t.nodes.empty())
		format_error("empty tree");
	/* every node reachable from the root exactly once */
	std::vector<int> seen(t.nodes.size(), 0);
	std::vector<int> stack { 0 };
	while (!stack.empty()) {
		int i = stack.back();
		stack.pop_back();
		if (i < 0 || static_cast<size_t>(i) >= t.nodes.size())
			dim_error("child index " + std::to_string(i) + " out of range");
		if (seen[i]++)
			format_error("tree is not a tree (node " + std::to_string(i) +
			             " reached twice)");
		if (!t.nodes[i].leaf()) {
			stack.push_back(t.nodes[i].left);
			stack.push_back(t.nodes[i].right);
		}
	}
	if (std::find(seen.begin(), seen.end(), 0) != seen.end())
		format_error("tree has unreachable nodes");
	return t;
}

Layer load_layer(const Json &j)
{
	Layer l;
	for (const Json &row : array_field(j, "weights"))
		l.weights.push_back(rationals(row, "weight"));
	l.bias = rationals(field(j, "bias"), "bias");
	const Json &a = field(j, "activation");
	if (a == "relu")
		l.activation = Activation::relu;
	else if (a == "linear")
		l.activation = Activation::linear;
	else
		format_error("unknown activation " + a.dump());
	return l;
}

void check_layers(const ModelArtifact &m)
{
	if (m.layers.empty())
		dim_error("mlp without layers");
	size_t width = m.features.size();
	for (size_t i = 0; i < m.layers.size(); i++) {
		const Layer &l = m.layers[i];
		std::string where = "layer " + std::to_string(i);
		if (l.weights.empty())
			dim_error(where + " has no neurons");
		if (l.bias.size() != l.weights.size())
			dim_error(where + ": " + std::to_string(l.weights.size()) + " neurons but " +
			          std::to_string(l.bias.size()) + " biases");
		for (const auto &row : l.weights)
			if (row.size() != width)
				dim_error(where + ": weight row of length " + std::to_string(row.size()) +
				          ", expected " + std::to_string(width));
		width = l.weights.size();
	}
	if (width != m.outputs.size())
		dim_error("last layer has " + std::to_string(width) + " neurons for " +
		          std::to_string(m.outputs.size()) + " outputs");
	if (m.layers.back().activation != Activation::linear)
		dim_error("last layer must be linear");
}

std::string decimal(const Rational &q)
{
	std::string d = to_decimal(q);
	if (parse_rational(d) == q)
		return d;
	return to_string(q);
}

Json rationals_json(const std::vector<Rational> &v)
{
	Json a = Json::array();
	for (const Rational &q : v)
		a.push_back(decimal(q));
	return a;
}

Json tree_json(const Tree &t)
{
	Json nodes = Json::array();
	for (const TreeNode &n : t.nodes) {
		Json o = Json::object();
		if (n.leaf()) {
			o["value"] = rationals_json(n.value);
		} else {
			o["feature"] = n.feature;
			o["threshold"] = decimal(n.threshold);
			o["left"] = n.left;
			o["right"] = n.right;
		}
		nodes.push_back(std::move(o));
	}
	return Json { { "nodes", std::move(nodes) } };
}

VarEnv real_env(const std::vector<std::string> &features)
{
	VarEnv env;
	for (const std::string &f : features)
		env.emplace(f, VarInfo {});
	return env;
}

}

namespace {

ModelArtifact load(std::string_view json_text, const VarEnv *spec_env)
{
	Json j = parse_json_exact(json_text);
	if (!j.is_object())
		format_error("document must be an object");
	ModelArtifact m;
	const Json &kind = field(j, "kind");
	if (kind == "polynomial") m.kind = ModelKind::polynomial;
	else if (kind == "tree") m.kind = ModelKind::tree;
	else if (kind == "forest") m.kind = ModelKind::forest;
	else if (kind == "mlp") m.kind = ModelKind::mlp;
	else if (kind == "expression") m.kind = ModelKind::expression;
	else
		throw Error(Errc::unknown_kind, "model: unknown kind " + kind.dump());
	m.features = labels(j, "features");
	m.outputs = labels(j, "outputs");
	if (m.outputs.empty())
		dim_error("no outputs");
	const Json &p = field(j, "payload");
	switch (m.kind) {
	case ModelKind::polynomial: {
		const Json &per_output = array_field(p, "terms");
		if (per_output.size() != m.outputs.size())
			dim_error(std::to_string(per_output.size()) + " term lists for " +
			          std::to_string(m.outputs.size()) + " outputs");
		for (const Json &list : per_output) {
			if (!list.is_array())
				format_error("term list must be an array");
			std::vector<Monomial> terms;
			for (const Json &t : list) {
				Monomial mono;
				mono.coef = json_rational(field(t, "coef"), "coefficient");
				for (const Json &e : array_field(t, "exponents")) {
					if (!e.is_number_integer() || e.get<long long>() < 0)
						format_error("exponents must be natural numbers");
					mono.exponents.push_back(e.get<unsigned>());
				}
				if (mono.exponents.size() != m.features.size())
					dim_error("exponent vector of length " +
					          std::to_string(mono.exponents.size()) + " for " +
					          std::to_string(m.features.size()) + " features");
				terms.push_back(std::move(mono));
			}
			m.terms.push_back(std::move(terms));
		}
		break;
	}
	case ModelKind::tree:
		m.trees.push_back(load_tree(p, m.features.size(), m.outputs.size()));
		break;
	case ModelKind::forest:
		for (const Json &t : array_field(p, "trees"))
			m.trees.push_back(load_tree(t, m.features.size(), m.outputs.size()));
		if (m.trees.empty())
			dim_error("empty forest");
		break;
	case ModelKind::mlp:
		for (const Json &l : array_field(p, "layers"))
			m.layers.push_back(load_layer(l));
		check_layers(m);
		break;
	case ModelKind::expression: {
		const Json &defs = field(p, "outputs");
		if (!defs.is_object() || defs.size() != m.outputs.size())
			dim_error("expression model needs one term per output");
		/* features declared by the spec keep their sort, so that
		 * categorical knobs compare against their values */
		VarEnv env = real_env(m.features);
		if (spec_env)
			for (auto &[f, info] : env)
				if (spec_env->count(f))
					info = spec_env->at(f);
		for (const std::string &o : m.outputs) {
			if (!defs.contains(o) || !defs.at(o).is_string())
				dim_error("no term for output '" + o + "'");
			m.exprs.push_back(parse_expr(defs.at(o).get<std::string>(), env));
		}
		break;
	}
	}
	return m;
}

}

ModelArtifact load_model(std::string_view json_text)
{
	return load(json_text, nullptr);
}

ModelArtifact load_model(std::string_view json_text, const ProblemSpec &spec)
{
	VarEnv env = spec.env();
	ModelArtifact m = load(json_text, &env);
	check_model(m, spec);
	return m;
}

std::string serialize(const ModelArtifact &m)
{
	Json j = Json::object();
	j["kind"] = model_kind_name(m.kind);
	j["features"] = m.features;
	j["outputs"] = m.outputs;
	Json p = Json::object();
	switch (m.kind) {
	case ModelKind::polynomial: {
		Json per_output = Json::array();
		for (const auto &terms : m.terms) {
			Json list = Json::array();
			for (const Monomial &t : terms)
				list.push_back(Json { { "coef", decimal(t.coef) }, { "exponents", t.exponents } });
			per_output.push_back(std::move(list));
		}
		p["terms"] = std::move(per_output);
		break;
	}
	case ModelKind::tree:
		p = tree_json(m.trees.front());
		break;
	case ModelKind::forest: {
		Json trees = Json::array();
		for (const Tree &t : m.trees)
			trees.push_back(tree_json(t));
		p["trees"] = std::move(trees);
		break;
	}
	case ModelKind::mlp: {
		Json layers = Json::array();
		for (const Layer &l : m.layers) {
			Json w = Json::array();
			for (const auto &row : l.weights)
				w.push_back(rationals_json(row));
			layers.push_back(Json { { "weights", std::move(w) },
			                        { "bias", rationals_json(l.bias) },
			                        { "activation", l.activation == Activation::relu ? "relu" : "linear" } });
		}
		p["layers"] = std::move(layers);
		break;
	}
	case ModelKind::expression: {
		Json outs = Json::object();
		for (size_t i = 0; i < m.outputs.size(); i++)
			outs[m.outputs[i]] = to_string(m.exprs[i]);
		p["outputs"] = std::move(outs);
		break;
	}
	}
	j["payload"] = std::move(p);
	return j.dump(2) + "\n";
}

void check_model(const ModelArtifact &m, const ProblemSpec &spec)
{
	Partition part = interface_partition(spec);
	std::set<std::string> want(part.knobs.begin(), part.knobs.end());
	want.insert(part.inputs.begin(), part.inputs.end());
	std::set<std::string> have(m.features.begin(), m.features.end());
	auto diff = [](const std::set<std::string> &a, const std::set<std::string> &b) {
		std::string s;
		for (const std::string &x : a)
			if (!b.count(x))
				s += (s.empty() ? "" : ", ") + x;
		return s;
	};
	if (have != want) {
		std::string missing = diff(want, have), extra = diff(have, want);
		throw Error(Errc::feature_mismatch,
		            "model features do not match the spec's knobs and inputs" +
		            (missing.empty() ? "" : "; missing: " + missing) +
		            (extra.empty() ? "" : "; unexpected: " + extra));
	}
	std::set<std::string> outs(m.outputs.begin(), m.outputs.end());
	std::set<std::string> want_outs(part.outputs.begin(), part.outputs.end());
	if (outs != want_outs) {
		std::string missing = diff(want_outs, outs), extra = diff(outs, want_outs);
		throw Error(Errc::feature_mismatch,
		            "model outputs do not match the spec's outputs" +
		            (missing.empty() ? "" : "; missing: " + missing) +
		            (extra.empty() ? "" : "; unexpected: " + extra));
	}
}

/* ---- encoding ---- */

namespace {

Expr tree_term(const Tree &t, int node, size_t output, const std::vector<Expr> &fv)
{
	const TreeNode &n = t.nodes[node];
	if (n.leaf())
		return cnst(n.value[output]);
	return ite(le(fv[n.feature], cnst(n.threshold)), tree_term(t, n.left, output, fv),
	           tree_term(t, n.right, output, fv));
}

Expr sum(std::vector<Expr> terms)
{
	if (terms.empty())
		return cnst(0);
	Expr s = terms.front();
	for (size_t i = 1; i < terms.size(); i++)
		s = add(s, terms[i]);
	return s;
}

/* w . in + b, dropping zero weights */
Expr affine(const std::vector<Rational> &w, const Rational &b, const std::vector<Expr> &in)
{
	std::vector<Expr> terms;
	for (size_t i = 0; i < w.size(); i++) {
		if (w[i] == 0)
			continue;
		terms.push_back(w[i] == 1 ? in[i] : mul(cnst(w[i]), in[i]));
	}
	if (b != 0 || terms.empty())
		terms.push_back(cnst(b));
	return sum(std::move(terms));
}

EncodedModel encode(const ModelArtifact &m, const std::vector<Expr> &fv,
                    const std::vector<Expr> &ov)
{
	EncodedModel em;
	std::vector<Expr> out_terms(m.outputs.size());
	switch (m.kind) {
	case ModelKind::polynomial:
		for (size_t o = 0; o < m.outputs.size(); o++) {
			std::vector<Expr> terms;
			for (const Monomial &t : m.terms[o]) {
				Expr prod = cnst(t.coef);
				for (size_t i = 0; i < fv.size(); i++) {
					if (t.exponents[i] == 0)
						continue;
					Expr f = t.exponents[i] == 1 ? fv[i] : pow(fv[i], t.exponents[i]);
					prod = mul(prod, f);
				}
				terms.push_back(prod);
			}
			out_terms[o] = sum(std::move(terms));
		}
		break;
	case ModelKind::tree:
	case ModelKind::forest:
		for (size_t o = 0; o < m.outputs.size(); o++) {
			std::vector<Expr> per_tree;
			for (const Tree &t : m.trees)
				per_tree.push_back(tree_term(t, 0, o, fv));
			Expr s = sum(std::move(per_tree));
			out_terms[o] = m.trees.size() == 1
				? s : mul(cnst(Rational(1, static_cast<long>(m.trees.size()))), s);
		}
		for (const Tree &t : m.trees)
			em.paths += t.leaves();
		break;
	case ModelKind::mlp: {
		/* prev_sym: auxiliary variables, prev_inl: their inlined terms */
		std::vector<Expr> prev_sym = fv, prev_inl = fv;
		for (size_t l = 0; l < m.layers.size(); l++) {
			const Layer &layer = m.layers[l];
			bool last = l + 1 == m.layers.size();
			std::vector<Expr> sym, inl;
			for (size_t j = 0; j < layer.weights.size(); j++) {
				Expr pre_s = affine(layer.weights[j], layer.bias[j], prev_sym);
				Expr pre_i = affine(layer.weights[j], layer.bias[j], prev_inl);
				if (layer.activation == Activation::relu) {
					pre_s = ite(ge(pre_s, cnst(0)), pre_s, cnst(0));
					pre_i = ite(ge(pre_i, cnst(0)), pre_i, cnst(0));
				}
				if (last) {
					em.definitions.push_back({ m.outputs[j], pre_s });
					out_terms[j] = pre_i;
					continue;
				}
				std::string name = relu_aux_name(l + 1, j);
				em.definitions.push_back({ name, pre_s });
				em.aux.push_back(name);
				sym.push_back(var(name));
				inl.push_back(pre_i);
			}
			prev_sym = std::move(sym);
			prev_inl = std::move(inl);
		}
		break;
	}
	case ModelKind::expression: {
		Substitution s;
		for (size_t i = 0; i < fv.size(); i++)
			s.emplace(m.features[i], fv[i]);
		for (size_t o = 0; o < m.outputs.size(); o++)
			out_terms[o] = substitute(m.exprs[o], s);
		break;
	}
	}
	if (m.kind != ModelKind::mlp)
		for (size_t o = 0; o < m.outputs.size(); o++)
			em.definitions.push_back({ m.outputs[o], out_terms[o] });
	for (size_t o = 0; o < m.outputs.size(); o++)
		em.outputs.emplace(m.outputs[o], out_terms[o]);
	std::vector<Formula> eqs;
	for (const auto &d : em.definitions) {
		auto it = std::find(m.outputs.begin(), m.outputs.end(), d.name);
		Expr lhs = it != m.outputs.end() ? ov[it - m.outputs.begin()] : var(d.name);
		eqs.push_back(eq(lhs, d.term));
	}
	em.phi = conj(std::move(eqs));
	return em;
}

}

EncodedModel encode_model(const ModelArtifact &m, const ProblemSpec &spec)
{
	check_model(m, spec);
	std::vector<Expr> fv, ov;
	for (const std::string &f : m.features)
		fv.push_back(spec.variable(f));
	for (const std::string &o : m.outputs)
		ov.push_back(spec.variable(o));
	return encode(m, fv, ov);
}

EncodedModel encode_model(const ModelArtifact &m)
{
	std::vector<Expr> fv, ov;
	for (const std::string &f : m.features)
		fv.push_back(var(f));
	for (const std::string &o : m.outputs)
		ov.push_back(var(o));
	return encode(m, fv, ov);
}

/* ---- reference evaluation ---- */

Assignment eval_model(const ModelArtifact &m, const Assignment &point)
{
	std::vector<Rational> x;
	for (const std::string &f : m.features) {
		auto it = point.find(f);
		if (it == point.end())
			throw Error(Errc::unbound_variable, "no value for model feature '" + f + "'");
		x.push_back(it->second);
	}
	std::vector<Rational> y(m.outputs.size());
	switch (m.kind) {
	case ModelKind::polynomial:
		for (size_t o = 0; o < y.size(); o++)
			for (const Monomial &t : m.terms[o]) {
				Rational v = t.coef;
				for (size_t i = 0; i < x.size(); i++)
					v *= pow(x[i], t.exponents[i]);
				y[o] += v;
			}
		break;
	case ModelKind::tree:
	case ModelKind::forest:
		for (const Tree &t : m.trees) {
			int n = 0;
			while (!t.nodes[n].leaf())
				n = x[t.nodes[n].feature] <= t.nodes[n].threshold ? t.nodes[n].left
				                                                 : t.nodes[n].right;
			for (size_t o = 0; o < y.size(); o++)
				y[o] += t.nodes[n].value[o];
		}
		for (Rational &v : y)
			v /= static_cast<long>(m.trees.size());
		break;
	case ModelKind::mlp: {
		std::vector<Rational> in = x;
		for (const Layer &l : m.layers) {
			std::vector<Rational> out(l.weights.size());
			for (size_t j = 0; j < out.size(); j++) {
				Rational s = l.bias[j];
				for (size_t i = 0; i < in.size(); i++)
					s += l.weights[j][i] * in[i];
				if (l.activation == Activation::relu && s < 0)
					s = 0;
				out[j] = s;
			}
			in = std::move(out);
		}
		y = std::move(in);
		break;
	}
	case ModelKind::expression: {
		Assignment a;
		for (size_t i = 0; i < x.size(); i++)
			a.emplace(m.features[i], x[i]);
		for (size_t o = 0; o < y.size(); o++)
			y[o] = eval(m.exprs[o], a);
		break;
	}
	}
	Assignment out;
	for (size_t o = 0; o < y.size(); o++)
		out.emplace(m.outputs[o], y[o]);
	return out;
}

}
