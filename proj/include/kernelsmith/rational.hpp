#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kernelsmith {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Rat rat(long long p, long long q = 1) { return Rat(p, q); }

inline Int numer(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int denom(const Rat& r) { return boost::multiprecision::denominator(r); }

inline bool is_integer(const Rat& r) { return denom(r) == 1; }

/// Largest integer <= r.
inline Int rat_floor(const Rat& r) {
    Int q = numer(r) / denom(r);
    if (numer(r) < 0 && q * denom(r) != numer(r)) --q;
    return q;
}

inline Rat rat_pow(const Rat& base, long long e) {
    if (e == 0) return Rat(1);
    if (base == 0) {
        if (e < 0) throw std::domain_error("rat_pow: 0^negative");
        return Rat(0);
    }
    Rat b = e < 0 ? Rat(1) / base : base;
    long long k = e < 0 ? -e : e;
    Rat out(1);
    while (k > 0) {
        if (k & 1) out *= b;
        b *= b;
        k >>= 1;
    }
    return out;
}

inline Int factorial(int n) {
    if (n < 0) throw std::domain_error("factorial of negative");
    Int f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

/// (m-1)!! for odd m-1 style products; dfact(k) = k*(k-2)*... down to 1 or 2.
inline Int double_factorial(int k) {
    if (k <= 0) return 1;
    Int f = 1;
    for (int i = k; i > 1; i -= 2) f *= i;
    return f;
}

/// 2-adic valuation of a nonzero rational.
inline long long two_valuation(const Rat& r) {
    if (r == 0) throw std::domain_error("two_valuation of zero");
    Int n = numer(r), d = denom(r);
    if (n < 0) n = -n;
    return static_cast<long long>(boost::multiprecision::lsb(n)) -
           static_cast<long long>(boost::multiprecision::lsb(d));
}

inline std::string rat_str(const Rat& r) {
    std::string s = numer(r).str();
    if (denom(r) != 1) s += "/" + denom(r).str();
    return s;
}

/// Parses "p", "-p" or "p/q" with exact integers.
inline Rat rat_parse(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(Int(s));
        Int p(s.substr(0, slash)), q(s.substr(slash + 1));
        if (q == 0) throw std::invalid_argument("zero denominator");
        return Rat(p, q);
    } catch (const std::exception&) {
        throw std::invalid_argument("rat_parse: bad rational '" + s + "'");
    }
}

}  // namespace kernelsmith
