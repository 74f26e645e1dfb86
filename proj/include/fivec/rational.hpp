#pragma once

#include <cstdint>
#include <string>

namespace fivec {

// Exact fraction. Supports and support thresholds are kept as integer
// numerator/denominator so that comparisons at the mining threshold are
// free of float boundary effects; doubles are for display only.
struct Rational {
    long long num = 0;
    long long den = 1;

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Normalizes sign and divides out the gcd. den must be nonzero.
Rational make_rational(long long num, long long den);

// Accepts "0.05", ".5", "1", "3/40". Throws ParseError on anything else and
// ArgumentError when the value falls outside (0, 1].
Rational parse_support_threshold(const std::string& text);

// Cross-multiplied comparisons (overflow-safe via 128-bit intermediates).
bool rat_eq(const Rational& a, const Rational& b);
bool rat_less(const Rational& a, const Rational& b);
bool rat_leq(const Rational& a, const Rational& b);
bool rat_geq(const Rational& a, const Rational& b);

std::string rat_to_string(const Rational& r);

} // namespace fivec
