#pragma once

#include <gmpxx.h>
#include <optional>
#include <stdexcept>
#include <string>

namespace conedef {

// Exact arbitrary-precision rationals. All arithmetic in this library is
// over Q; there is no floating point anywhere.
using Rational = mpq_class;

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Rational rat(long num, long den = 1)
{
    if (den == 0)
        throw error("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline std::string rat_str(const Rational& q)
{
    return q.get_str();
}

// Accepts "p", "-p", "p/q".
inline std::optional<Rational> parse_rational(const std::string& s)
{
    if (s.empty())
        return std::nullopt;
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) {
            mpz_class num(s);
            return Rational(num);
        }
        mpz_class num(s.substr(0, slash));
        mpz_class den(s.substr(slash + 1));
        if (den == 0)
            return std::nullopt;
        Rational r(num, den);
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

inline Rational rat_pow(const Rational& q, int e)
{
    if (e < 0)
        throw error("rat_pow: negative exponent");
    Rational acc(1);
    for (int i = 0; i < e; ++i)
        acc *= q;
    return acc;
}

inline mpz_class factorial(int n)
{
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
    return f;
}

inline mpz_class binomial(int n, int k)
{
    if (k < 0 || k > n)
        return 0;
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n),
                 static_cast<unsigned long>(k));
    return b;
}

} // namespace conedef
