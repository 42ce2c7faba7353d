// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

#include "grnsynth/error.hpp"

namespace grnsynth {

using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "p/q", "-p/q", an integer, or a finite decimal such as "0.3".
/// The result is canonicalized.
inline Rational parse_rational(std::string_view text)
{
    std::string s{text};
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
    if (s.empty()) throw ParseError("empty rational literal", 0);

    auto dot = s.find('.');
    if (dot != std::string::npos) {
        if (s.find('/') != std::string::npos)
            throw ParseError("rational literal mixes '.' and '/': " + s, dot);
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        std::size_t frac_len = s.size() - dot - 1;
        Integer num;
        if (digits.empty() || digits == "-" || num.set_str(digits, 10) != 0)
            throw ParseError("malformed decimal literal: " + s, 0);
        Integer den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(frac_len));
        Rational r{num, den};
        r.canonicalize();
        return r;
    }

    Rational r;
    if (r.set_str(s, 10) != 0) throw ParseError("malformed rational literal: " + s, 0);
    if (r.get_den() == 0) throw ParseError("zero denominator: " + s, s.find('/'));
    r.canonicalize();
    return r;
}

/// num/den in canonical form; mpq arithmetic requires canonical operands.
inline Rational make_rational(long num, long den)
{
    if (den == 0) throw RangeError("zero denominator");
    Rational r{num, den};
    r.canonicalize();
    return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(10); }

inline double to_double(const Rational& r) { return r.get_d(); }

inline Integer binomial(unsigned long n, unsigned long k)
{
    Integer out;
    mpz_bin_uiui(out.get_mpz_t(), n, k);
    return out;
}

inline Rational pow(const Rational& base, unsigned long exp)
{
    Integer num, den;
    mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), exp);
    mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), exp);
    Rational r{num, den};
    r.canonicalize();
    return r;
}

} // namespace grnsynth
