/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#include "gearbox/theta.hh"

namespace gearbox {

Rational Radius::at(const Rational &center) const
{
	switch (kind) {
	case RadiusKind::exact: return 0;
	case RadiusKind::absolute: return r;
	case RadiusKind::relative: return r * abs(center);
	}
	return 0;
}

const Radius &ThetaSpec::of(const std::string &knob) const
{
	static const Radius none;
	auto it = radii.find(knob);
	return it == radii.end() ? none : it->second;
}

bool ThetaSpec::is_identity() const
{
	for (const auto &[_, r] : radii)
		if (!r.is_zero())
			return false;
	return true;
}

Formula theta_formula(const std::vector<std::string> &knobs,
                      const Substitution &center, const Substitution &shadow,
                      const ThetaSpec &ts)
{
	std::vector<Formula> parts;
	for (const std::string &k : knobs) {
		const Expr &c = center.at(k);
		const Expr &s = shadow.at(k);
		const Radius &rad = ts.of(k);
		if (rad.kind == RadiusKind::exact) {
			parts.push_back(eq(s, c));
			continue;
		}
		Expr rho;
		if (rad.kind == RadiusKind::absolute)
			rho = cnst(rad.r);
		else if (const auto *cc = c->get<ex::Const>())
			rho = cnst(rad.at(cc->value));
		else
			rho = mul(cnst(rad.r), abs(c));
		Expr d = sub(s, c);
		parts.push_back(le(d, rho));
		parts.push_back(ge(d, neg(rho)));
	}
	return conj(std::move(parts));
}

Interval theta_hull(const Rational &center, const Radius &radius)
{
	Rational rho = radius.at(center);
	return { center - rho, center + rho };
}

}
