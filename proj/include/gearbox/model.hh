/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#pragma once

#include "expr.hh"
#include "json_util.hh"

#include <string>
#include <string_view>
#include <vector>

namespace gearbox {

struct ProblemSpec;

/* Trained surrogate models in a portable JSON interchange format:
 *
 *   {"kind": "polynomial" | "tree" | "forest" | "mlp" | "expression",
 *    "features": [labels of knobs and inputs],
 *    "outputs": [labels of outputs],
 *    "payload": {...}}
 *
 * All weights, thresholds and coefficients are exact rationals, written as
 * JSON integers, decimal strings ("0.25") or fractions ("1/3"). See
 * docs/model-format.md for the payload of each kind. */

enum class ModelKind { polynomial, tree, forest, mlp, expression };
const char *model_kind_name(ModelKind k);

struct Monomial {
	Rational coef;
	std::vector<unsigned> exponents; /* one per feature */
};

/* Split nodes send feature <= threshold to the left child. */
struct TreeNode {
	int feature = -1; /* -1 for leaves */
	Rational threshold;
	int left = -1, right = -1;
	std::vector<Rational> value; /* leaves: one value per output */
	bool leaf() const { return feature < 0; }
};

struct Tree {
	std::vector<TreeNode> nodes; /* root is nodes[0] */
	size_t leaves() const;
};

enum class Activation { relu, linear };

struct Layer {
	std::vector<std::vector<Rational>> weights; /* rows: neurons, cols: inputs */
	std::vector<Rational> bias;
	Activation activation = Activation::linear;
};

struct ModelArtifact {
	ModelKind kind = ModelKind::polynomial;
	std::vector<std::string> features, outputs;
	std::vector<std::vector<Monomial>> terms; /* polynomial, per output */
	std::vector<Tree> trees;                  /* tree (one), forest (mean) */
	std::vector<Layer> layers;                /* mlp */
	std::vector<Expr> exprs;                  /* expression, per output */
};

/* Errors: malformed_json, unknown_kind, dimension_mismatch, invalid_spec. */
ModelArtifact load_model(std::string_view json_text);
/* Additionally checks the model against the spec (feature_mismatch). */
ModelArtifact load_model(std::string_view json_text, const ProblemSpec &spec);
std::string serialize(const ModelArtifact &m);

/* Features must be exactly the knobs and inputs of spec, outputs exactly
 * its outputs, in any order. Throws Error(feature_mismatch). */
void check_model(const ModelArtifact &m, const ProblemSpec &spec);

/* phi is the conjunction of "name == term" over definitions, auxiliary
 * variables (one per relu neuron) first, outputs last; every term refers to
 * features and earlier definitions only. outputs maps each output label to
 * its term over the features alone (auxiliaries inlined). */
struct EncodedModel {
	struct Definition {
		std::string name;
		Expr term;
	};
	Formula phi;
	std::vector<Definition> definitions;
	std::vector<std::string> aux;
	Substitution outputs;
	size_t paths = 0; /* leaves over all trees */
};

EncodedModel encode_model(const ModelArtifact &m, const ProblemSpec &spec);
/* Encoding with every feature and output of real sort, for models used
 * without a spec. */
EncodedModel encode_model(const ModelArtifact &m);

/* Exact forward evaluation, independent of the encoding. Throws
 * Error(unbound_variable) for missing features. */
Assignment eval_model(const ModelArtifact &m, const Assignment &point);

/* Name of the auxiliary variable of neuron j in hidden layer l. */
std::string relu_aux_name(size_t layer, size_t neuron);

}
