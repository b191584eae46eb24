/* SPDX-License-Identifier: Apache-2.0
 *
 * Copyright 2026 The gearbox authors
 */

#include "gearbox/json_util.hh"
#include "gearbox/error.hh"

#include <vector>

namespace gearbox {

namespace {

class ExactSax : public nlohmann::json_sax<Json> {
	Json root_;
	std::vector<Json *> stack_;
	std::string key_;
	std::string error_;

	bool put(Json v)
	{
		if (stack_.empty()) {
			root_ = std::move(v);
			return true;
		}
		Json &top = *stack_.back();
		if (top.is_array())
			top.push_back(std::move(v));
		else
			top[key_] = std::move(v);
		return true;
	}

	bool open(Json v)
	{
		Json *slot;
		if (stack_.empty()) {
			root_ = std::move(v);
			slot = &root_;
		} else if (Json &top = *stack_.back(); top.is_array()) {
			top.push_back(std::move(v));
			slot = &top.back();
		} else {
			top[key_] = std::move(v);
			slot = &top[key_];
		}
		stack_.push_back(slot);
		return true;
	}

public:
	bool null() override { return put(nullptr); }
	bool boolean(bool b) override { return put(b); }
	bool number_integer(number_integer_t v) override { return put(v); }
	bool number_unsigned(number_unsigned_t v) override { return put(v); }
	bool number_float(number_float_t, const string_t &s) override { return put(s); }
	bool string(string_t &s) override { return put(s); }
	bool binary(binary_t &) override { return put(nullptr); }
	bool start_object(std::size_t) override { return open(Json::object()); }
	bool key(string_t &k) override { key_ = k; return true; }
	bool end_object() override { stack_.pop_back(); return true; }
	bool start_array(std::size_t) override { return open(Json::array()); }
	bool end_array() override { stack_.pop_back(); return true; }
	bool parse_error(std::size_t pos, const std::string &,
	                 const nlohmann::detail::exception &ex) override
	{
		error_ = ex.what();
		throw Error(Errc::malformed_json, error_, pos);
	}

	Json take() { return std::move(root_); }
};

}

Json parse_json_exact(std::string_view text)
{
	ExactSax sax;
	Json::sax_parse(text.begin(), text.end(), &sax);
	return sax.take();
}

Rational json_rational(const Json &j, const char *what)
{
	if (j.is_number_integer())
		return Rational(std::to_string(j.get<long long>()), 10);
	if (j.is_number_unsigned())
		return Rational(std::to_string(j.get<unsigned long long>()), 10);
	if (j.is_string())
		if (auto q = parse_rational(j.get<std::string>()))
			return *q;
	throw Error(Errc::invalid_spec,
	            std::string("expected a number for ") + what + ", got " + j.dump());
}

Json rational_json(const Rational &q)
{
	if (is_integer(q) && q.get_num().fits_slong_p())
		return q.get_num().get_si();
	std::string d = to_decimal(q, 12);
	if (d.find_first_of("eE") == std::string::npos && parse_rational(d) == q) {
		size_t digits = 0;
		for (char c : d)
			digits += c >= '0' && c <= '9';
		if (digits <= 15)
			return std::stod(d);
	}
	return to_string(q);
}

}
