/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#include "gearbox/error.hh"

namespace gearbox {

const char *errc_name(Errc c)
{
	switch (c) {
	case Errc::malformed_json: return "MalformedJson";
	case Errc::unknown_interface: return "UnknownInterface";
	case Errc::unknown_type: return "UnknownType";
	case Errc::radius_on_non_knob: return "RadiusOnNonKnob";
	case Errc::grid_out_of_range: return "GridOutOfRange";
	case Errc::undeclared_variable: return "UndeclaredVariable";
	case Errc::invalid_spec: return "InvalidSpec";
	case Errc::syntax_error: return "SyntaxError";
	case Errc::non_constant_exponent: return "NonConstantExponent";
	case Errc::division_by_non_constant: return "DivisionByNonConstant";
	case Errc::sort_mismatch: return "SortMismatch";
	case Errc::unbound_variable: return "UnboundVariable";
	case Errc::dimension_mismatch: return "DimensionMismatch";
	case Errc::unknown_kind: return "UnknownKind";
	case Errc::feature_mismatch: return "FeatureMismatch";
	case Errc::backend_launch_failure: return "BackendLaunchFailure";
	case Errc::protocol_error: return "ProtocolError";
	case Errc::ungridded_factorial_dimension: return "UngriddedFactorialDimension";
	case Errc::alpha_rejection_exhausted: return "AlphaRejectionExhausted";
	case Errc::oracle_failure: return "OracleFailure";
	case Errc::usage: return "UsageError";
	}
	return "?";
}

}
