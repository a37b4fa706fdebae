#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace xius {

using Z = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                        boost::multiprecision::et_off>;
using Q = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                        boost::multiprecision::et_off>;

// "p/q" in lowest terms, "p" when the denominator is 1.
std::string to_string(const Q& q);
std::string to_string(const Z& z);

// Accepts "p/q", "p", and finite decimals such as "-0.125".
Q parse_q(std::string_view s);
Z parse_z(std::string_view s);

inline Q qabs(const Q& q) { return q < 0 ? Q(-q) : q; }

inline Q make_q(const Z& num, const Z& den) { return Q(num, den); }

inline Z num(const Q& q) { return boost::multiprecision::numerator(q); }
inline Z den(const Q& q) { return boost::multiprecision::denominator(q); }

// Decimal rendering with `digits` places after the point, truncated toward zero.
// Only for human-facing output; never fed back into a computation.
std::string to_decimal(const Q& q, int digits = 12);

Z pow_z(const Z& base, std::uint64_t e);
Q pow_q(const Q& base, std::uint64_t e);

// 2^e for small e.
Z pow2(std::uint64_t e);

// Number of bits of |z| (0 for 0).
std::uint64_t bit_length(const Z& z);

// True iff z is a positive power of two; sets e with z = 2^e.
bool is_pow2(const Z& z, std::uint64_t& e);

// Least integer s >= 0 with 2^s >= z (z >= 1).
std::uint64_t ceil_log2(const Z& z);

// floor(sqrt(z)) and exact check helpers.
Z isqrt(const Z& z);

}  // namespace xius
