#pragma once

#include "errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace robustwork {

/// Exact rational used on every analysis path (capacities, rates, LP).
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
        s.remove_suffix(1);
    return s;
}

inline Rational parse_decimal(std::string_view s, std::string_view whole) {
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (s.empty())
        throw ConfigError("not a number: '" + std::string(whole) + "'");
    Integer numerator = 0;
    Integer denominator = 1;
    bool seen_point = false;
    bool seen_digit = false;
    for (char c : s) {
        if (c == '.') {
            if (seen_point)
                throw ConfigError("not a number: '" + std::string(whole) + "'");
            seen_point = true;
        } else if (c >= '0' && c <= '9') {
            numerator = numerator * 10 + (c - '0');
            if (seen_point)
                denominator *= 10;
            seen_digit = true;
        } else {
            throw ConfigError("not a number: '" + std::string(whole) + "'");
        }
    }
    if (!seen_digit)
        throw ConfigError("not a number: '" + std::string(whole) + "'");
    Rational r(numerator, denominator);
    return negative ? Rational(-r) : r;
}

} // namespace detail

/// Parses "3", "0.99", "17.1", "1/3" or "0.5/3" into an exact rational.
inline Rational parse_rational(std::string_view text) {
    auto s = detail::trim(text);
    auto slash = s.find('/');
    if (slash == std::string_view::npos)
        return detail::parse_decimal(s, text);
    Rational num = detail::parse_decimal(detail::trim(s.substr(0, slash)), text);
    Rational den = detail::parse_decimal(detail::trim(s.substr(slash + 1)), text);
    if (den == 0)
        throw ConfigError("zero denominator: '" + std::string(text) + "'");
    return num / den;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// "p/q" or "p" when the denominator is one.
inline std::string to_string(const Rational& r) {
    if (boost::multiprecision::denominator(r) == 1)
        return boost::multiprecision::numerator(r).str();
    return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

/// Largest integer not greater than r.
inline Integer floor(const Rational& r) {
    Integer q = boost::multiprecision::numerator(r) / boost::multiprecision::denominator(r);
    if (r < 0 && Rational(q) != r)
        q -= 1;
    return q;
}

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ConfigError("not a floating-point number: '" + std::string(s) + "'");
    return v;
}

inline std::int64_t parse_int(std::string_view s) {
    s = detail::trim(s);
    std::int64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ConfigError("not an integer: '" + std::string(s) + "'");
    return v;
}

} // namespace robustwork
