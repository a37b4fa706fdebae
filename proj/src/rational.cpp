#include "xius/rational.hpp"

#include <gmp.h>

#include <stdexcept>

namespace xius {

std::string to_string(const Z& z) { return z.str(); }

std::string to_string(const Q& q) {
  if (den(q) == 1) return num(q).str();
  return num(q).str() + "/" + den(q).str();
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

// Base 10 always; the generic constructor would read a leading 0 as octal.
Z decimal_z(std::string_view digits) {
  Z z;
  std::string d(digits);
  mpz_set_str(z.backend().data(), d.c_str(), 10);
  return z;
}

}  // namespace

Z parse_z(std::string_view s) {
  std::string_view body = s;
  if (!body.empty() && (body[0] == '-' || body[0] == '+')) body.remove_prefix(1);
  if (!all_digits(body)) throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  Z z = decimal_z(body);
  return s[0] == '-' ? Z(-z) : z;
}

Q parse_q(std::string_view s) {
  auto slash = s.find('/');
  if (slash != std::string_view::npos) {
    Z p = parse_z(s.substr(0, slash));
    Z q = parse_z(s.substr(slash + 1));
    if (q == 0) throw std::invalid_argument("zero denominator: '" + std::string(s) + "'");
    return Q(p, q);
  }
  auto dot = s.find('.');
  if (dot == std::string_view::npos) return Q(parse_z(s));
  std::string_view ip = s.substr(0, dot);
  std::string_view fp = s.substr(dot + 1);
  bool neg = !ip.empty() && ip[0] == '-';
  if (!ip.empty() && (ip[0] == '-' || ip[0] == '+')) ip.remove_prefix(1);
  if ((!ip.empty() && !all_digits(ip)) || !all_digits(fp))
    throw std::invalid_argument("not a decimal: '" + std::string(s) + "'");
  Z whole = ip.empty() ? Z(0) : decimal_z(ip);
  Z frac = decimal_z(fp);
  Z scale = pow_z(Z(10), fp.size());
  Q r = Q(whole) + Q(frac, scale);
  return neg ? Q(-r) : r;
}

std::string to_decimal(const Q& q, int digits) {
  Q a = qabs(q);
  Z scale = pow_z(Z(10), static_cast<std::uint64_t>(digits));
  Z scaled = num(a) * scale / den(a);
  std::string s = scaled.str();
  if (static_cast<int>(s.size()) <= digits) s = std::string(digits + 1 - s.size(), '0') + s;
  std::string out = s.substr(0, s.size() - digits);
  if (digits > 0) out += "." + s.substr(s.size() - digits);
  if (q < 0 && scaled != 0) out = "-" + out;
  return out;
}

Z pow_z(const Z& base, std::uint64_t e) {
  Z r;
  mpz_pow_ui(r.backend().data(), base.backend().data(), e);
  return r;
}

Q pow_q(const Q& base, std::uint64_t e) { return Q(pow_z(num(base), e), pow_z(den(base), e)); }

Z pow2(std::uint64_t e) {
  Z r;
  mpz_setbit(r.backend().data(), e);
  return r;
}

std::uint64_t bit_length(const Z& z) {
  if (z == 0) return 0;
  return mpz_sizeinbase(z.backend().data(), 2);
}

bool is_pow2(const Z& z, std::uint64_t& e) {
  if (z <= 0) return false;
  if (mpz_popcount(z.backend().data()) != 1) return false;
  e = bit_length(z) - 1;
  return true;
}

std::uint64_t ceil_log2(const Z& z) {
  if (z <= 1) return 0;
  std::uint64_t b = bit_length(z);
  std::uint64_t e;
  if (is_pow2(z, e)) return e;
  return b;
}

Z isqrt(const Z& z) {
  Z r;
  mpz_sqrt(r.backend().data(), z.backend().data());
  return r;
}

}  // namespace xius
