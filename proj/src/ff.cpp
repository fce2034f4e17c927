#include "pgrowth/ff.hpp"

#include <cmath>
#include <numbers>

namespace pgrowth {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0) return false;
  for (std::uint64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

PrimeField::PrimeField(std::uint32_t p) : p_(p) {
  if (!is_prime(p)) throw DomainError("modulus must be prime");
}

FieldElem PrimeField::elem(std::int64_t v) const {
  auto r = v % static_cast<std::int64_t>(p_);
  if (r < 0) r += p_;
  return {static_cast<std::uint32_t>(r)};
}

FieldElem PrimeField::add(FieldElem a, FieldElem b) const {
  std::uint32_t s = a.value + b.value;
  return {s >= p_ ? s - p_ : s};
}

FieldElem PrimeField::sub(FieldElem a, FieldElem b) const {
  return {a.value >= b.value ? a.value - b.value : a.value + p_ - b.value};
}

FieldElem PrimeField::mul(FieldElem a, FieldElem b) const {
  return {static_cast<std::uint32_t>(
      static_cast<std::uint64_t>(a.value) * b.value % p_)};
}

FieldElem PrimeField::neg(FieldElem a) const {
  return {a.value == 0 ? 0 : p_ - a.value};
}

FieldElem PrimeField::inv(FieldElem a) const {
  if (a.value == 0) throw DomainError("inverse of zero");
  return pow(a, p_ - 2);
}

FieldElem PrimeField::pow(FieldElem a, std::uint64_t e) const {
  return {static_cast<std::uint32_t>(pow_mod(a.value, e, p_))};
}

bool PrimeField::is_square(FieldElem a) const {
  if (a.value == 0) throw DomainError("quadratic character of zero");
  if (p_ == 2) return true;
  return pow(a, (p_ - 1) / 2).value == 1;
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp,
                      std::uint64_t mod) {
  if (mod == 1) return 0;
  unsigned __int128 result = 1;
  unsigned __int128 b = base % mod;
  while (exp) {
    if (exp & 1) result = result * b % mod;
    b = b * b % mod;
    exp >>= 1;
  }
  return static_cast<std::uint64_t>(result);
}

std::uint64_t multiplicative_order(std::uint64_t a, std::uint64_t p) {
  if (a % p == 0) throw DomainError("order of zero");
  std::uint64_t x = a % p;
  std::uint64_t k = 1;
  while (x != 1) {
    x = x * (a % p) % p;
    ++k;
  }
  return k;
}

std::uint32_t primitive_root(std::uint32_t p) {
  if (!is_prime(p)) throw DomainError("modulus must be prime");
  if (p == 2) return 1;
  // Distinct prime factors of p - 1; g generates iff g^((p-1)/r) != 1 for all.
  std::vector<std::uint32_t> factors;
  std::uint32_t m = p - 1;
  for (std::uint32_t d = 2; d * d <= m; ++d) {
    if (m % d == 0) {
      factors.push_back(d);
      while (m % d == 0) m /= d;
    }
  }
  if (m > 1) factors.push_back(m);
  for (std::uint32_t g = 2; g < p; ++g) {
    bool ok = true;
    for (auto r : factors) {
      if (pow_mod(g, (p - 1) / r, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw DomainError("no primitive root");  // unreachable for prime p
}

CharTable::CharTable(std::uint32_t p)
    : p_(p), g_(primitive_root(p)), dlog_(p, 0), pow_(p - 1, 0) {
  std::uint64_t x = 1;
  for (std::uint32_t k = 0; k + 1 < p; ++k) {
    pow_[k] = static_cast<std::uint32_t>(x);
    dlog_[x] = k;
    x = x * g_ % p;
  }
}

std::uint32_t CharTable::dlog(FieldElem x) const {
  if (x.value == 0 || x.value >= p_) throw DomainError("discrete log of zero");
  return dlog_[x.value];
}

FieldElem CharTable::exp(std::uint64_t k) const {
  return {pow_[k % (p_ - 1)]};
}

std::complex<double> CharTable::mult_character(std::uint32_t j,
                                               FieldElem x) const {
  auto k = dlog(x);
  if (j == 0) return {1.0, 0.0};
  // Reduce the exponent exactly before converting to an angle.
  auto num = static_cast<std::uint64_t>(j) * k % (p_ - 1);
  double theta = 2.0 * std::numbers::pi * static_cast<double>(num) /
                 static_cast<double>(p_ - 1);
  return std::polar(1.0, theta);
}

std::complex<double> CharTable::add_character(FieldElem x) const {
  double theta = 2.0 * std::numbers::pi * static_cast<double>(x.value % p_) /
                 static_cast<double>(p_);
  return std::polar(1.0, theta);
}

}  // namespace pgrowth
