/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#include "gearbox/rational.hh"

#include <cctype>
#include <cstdio>

namespace gearbox {

namespace {

bool all_digits(std::string_view s)
{
	if (s.empty())
		return false;
	for (char c : s)
		if (!std::isdigit(static_cast<unsigned char>(c)))
			return false;
	return true;
}

Rational ten_pow(long e)
{
	mpz_class p;
	mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(e < 0 ? -e : e));
	return e < 0 ? Rational(1, p) : Rational(p);
}

}

std::optional<Rational> parse_rational(std::string_view s)
{
	if (s.empty())
		return std::nullopt;
	bool neg = false;
	if (s.front() == '-' || s.front() == '+') {
		neg = s.front() == '-';
		s.remove_prefix(1);
	}
	if (auto slash = s.find('/'); slash != std::string_view::npos) {
		auto num = s.substr(0, slash), den = s.substr(slash + 1);
		if (!all_digits(num) || !all_digits(den))
			return std::nullopt;
		mpz_class n(std::string(num), 10), d(std::string(den), 10);
		if (d == 0)
			return std::nullopt;
		Rational q(n, d);
		q.canonicalize();
		return neg ? Rational(-q) : q;
	}
	long exp10 = 0;
	if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
		auto es = s.substr(e + 1);
		bool eneg = false;
		if (!es.empty() && (es.front() == '-' || es.front() == '+')) {
			eneg = es.front() == '-';
			es.remove_prefix(1);
		}
		if (!all_digits(es) || es.size() > 6)
			return std::nullopt;
		exp10 = std::stol(std::string(es));
		if (eneg)
			exp10 = -exp10;
		s = s.substr(0, e);
	}
	std::string digits;
	auto dot = s.find('.');
	if (dot == std::string_view::npos) {
		if (!all_digits(s))
			return std::nullopt;
		digits = s;
	} else {
		auto ip = s.substr(0, dot), fp = s.substr(dot + 1);
		if (ip.empty() && fp.empty())
			return std::nullopt;
		if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)))
			return std::nullopt;
		digits = std::string(ip) + std::string(fp);
		exp10 -= static_cast<long>(fp.size());
	}
	Rational q{mpz_class(digits, 10)};
	q *= ten_pow(exp10);
	q.canonicalize();
	return neg ? Rational(-q) : q;
}

std::string to_string(const Rational &q)
{
	return q.get_str();
}

std::string to_decimal(const Rational &q, unsigned max_digits)
{
	mpz_class den = q.get_den();
	unsigned twos = 0, fives = 0;
	while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
		den /= 2;
		twos++;
	}
	while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
		den /= 5;
		fives++;
	}
	unsigned k = std::max(twos, fives);
	if (den != 1 || k > max_digits) {
		char buf[64];
		std::snprintf(buf, sizeof(buf), "%.17g", q.get_d());
		return buf;
	}
	if (k == 0)
		return q.get_num().get_str();
	mpz_class scaled = q.get_num() * (Rational(ten_pow(k)).get_num()) / q.get_den();
	bool neg = scaled < 0;
	std::string s = mpz_class(neg ? mpz_class(-scaled) : scaled).get_str();
	if (s.size() <= k)
		s.insert(0, k + 1 - s.size(), '0');
	s.insert(s.size() - k, ".");
	while (s.back() == '0')
		s.pop_back();
	if (s.back() == '.')
		s.pop_back();
	return neg ? "-" + s : s;
}

double to_double(const Rational &q)
{
	return q.get_d();
}

bool is_integer(const Rational &q)
{
	return q.get_den() == 1;
}

Rational floor(const Rational &q)
{
	mpz_class r;
	mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
	return Rational(r);
}

Rational ceil(const Rational &q)
{
	mpz_class r;
	mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
	return Rational(r);
}

Rational abs(const Rational &q)
{
	return q < 0 ? Rational(-q) : q;
}

Rational pow(const Rational &q, unsigned n)
{
	mpz_class num, den;
	mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), n);
	mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), n);
	return Rational(num, den);
}

}
