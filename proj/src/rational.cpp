#include "fivec/rational.hpp"

#include "fivec/errors.hpp"

#include <cctype>
#include <numeric>

namespace fivec {

Rational make_rational(long long num, long long den) {
    if (den == 0) throw ArgumentError("rational denominator must be nonzero");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return Rational{num, den};
}

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (const char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

} // namespace

Rational parse_support_threshold(const std::string& text) {
    Rational r;
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const std::string a = text.substr(0, slash);
        const std::string b = text.substr(slash + 1);
        if (!all_digits(a) || !all_digits(b)) {
            throw ParseError("cannot parse support threshold '" + text + "'");
        }
        r = make_rational(std::stoll(a), std::stoll(b));
    } else {
        const auto dot = text.find('.');
        if (dot == std::string::npos) {
            if (!all_digits(text)) throw ParseError("cannot parse support threshold '" + text + "'");
            r = make_rational(std::stoll(text), 1);
        } else {
            const std::string whole = text.substr(0, dot);
            const std::string frac = text.substr(dot + 1);
            if ((!whole.empty() && !all_digits(whole)) || !all_digits(frac) || frac.size() > 15) {
                throw ParseError("cannot parse support threshold '" + text + "'");
            }
            long long den = 1;
            for (size_t i = 0; i < frac.size(); ++i) den *= 10;
            const long long whole_v = whole.empty() ? 0 : std::stoll(whole);
            r = make_rational(whole_v * den + std::stoll(frac), den);
        }
    }
    if (r.num <= 0 || rat_less(Rational{1, 1}, r)) {
        throw ArgumentError("support threshold must lie in (0, 1], got '" + text + "'");
    }
    return r;
}

bool rat_eq(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den == static_cast<__int128>(b.num) * a.den;
}

bool rat_less(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
}

bool rat_leq(const Rational& a, const Rational& b) { return !rat_less(b, a); }

bool rat_geq(const Rational& a, const Rational& b) { return !rat_less(a, b); }

std::string rat_to_string(const Rational& r) {
    return std::to_string(r.num) + "/" + std::to_string(r.den);
}

} // namespace fivec
