#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace consensus {

// Exact-arithmetic backend. The float backend is plain double; generic code is
// templated on the scalar type and uses the helpers below for the few places
// where the two behave differently.
using Rat = mpq_class;

inline Rat ratio(long num, long den) {
    if (den == 0) throw std::invalid_argument("ratio: zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline double to_double(const Rat& r) { return r.get_d(); }
inline double to_double(double d) { return d; }

// Parses "p/q", "p", or a plain decimal ("0.25") into an exact rational.
inline Rat parse_rational(const std::string& s) {
    if (s.find('/') != std::string::npos) {
        Rat r;
        if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
        r.canonicalize();
        if (r.get_den() == 0) throw std::invalid_argument("bad rational: " + s);
        return r;
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) {
        Rat r;
        if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
        return r;
    }
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    size_t frac_len = s.size() - dot - 1;
    Rat num;
    if (num.set_str(digits, 10) != 0) throw std::invalid_argument("bad rational: " + s);
    Rat den(1);
    for (size_t i = 0; i < frac_len; ++i) den *= 10;
    Rat r = num / den;
    r.canonicalize();
    return r;
}

// floor(r) as a big integer quotient (toward -infinity).
inline mpz_class floor_to_int(const Rat& r) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
    return q;
}

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
    static constexpr bool exact = false;
    static double from_long_ratio(long num, long den) { return double(num) / double(den); }
    static double from_rat(const Rat& r) { return r.get_d(); }
};

template <>
struct scalar_traits<Rat> {
    static constexpr bool exact = true;
    static Rat from_long_ratio(long num, long den) { return ratio(num, den); }
    static Rat from_rat(const Rat& r) { return r; }
};

}  // namespace consensus
