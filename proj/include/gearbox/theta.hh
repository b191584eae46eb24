/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#pragma once

#include "interval.hh"

#include <map>
#include <string>
#include <vector>

namespace gearbox {

/* Stability region of a knob configuration: a Chebyshev box whose per-knob
 * half-width is either a constant (absolute), a multiple of the magnitude
 * of the center value (relative) or zero (exact). Categorical knobs are
 * always exact. */

enum class RadiusKind { exact, absolute, relative };

struct Radius {
	RadiusKind kind = RadiusKind::exact;
	Rational r;

	static Radius exact() { return {}; }
	static Radius absolute(Rational r) { return { RadiusKind::absolute, std::move(r) }; }
	static Radius relative(Rational r) { return { RadiusKind::relative, std::move(r) }; }

	/* half-width of the region around a concrete center */
	Rational at(const Rational &center) const;
	bool is_zero() const { return kind == RadiusKind::exact || r == 0; }
};

struct ThetaSpec {
	std::map<std::string, Radius> radii;

	/* exact for knobs without an entry */
	const Radius &of(const std::string &knob) const;
	bool is_identity() const;
};

/* Conjunction over knobs of |shadow_i - center_i| <= radius_i(center_i).
 * center and shadow map each knob to a term, usually a variable or a
 * constant; reflexive by construction since all radii are nonnegative. */
Formula theta_formula(const std::vector<std::string> &knobs,
                      const Substitution &center, const Substitution &shadow,
                      const ThetaSpec &ts);

/* [c - rho, c + rho] for the radius of knob at concrete center c */
Interval theta_hull(const Rational &center, const Radius &radius);

}
