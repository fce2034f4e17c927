#ifndef PGROWTH_FF_HPP
#define PGROWTH_FF_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pgrowth {

/// Raised when an argument lies outside the domain of an operation
/// (inverse of zero, discrete log of zero, composite modulus, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

bool is_prime(std::uint64_t n);

/// Residue modulo a prime carried by the surrounding PrimeField.
/// The value is always the canonical representative in [0, p).
struct FieldElem {
  std::uint32_t value = 0;

  friend constexpr auto operator<=>(FieldElem, FieldElem) = default;
};

class PrimeField {
 public:
  /// Throws DomainError("modulus must be prime") for composite p.
  explicit PrimeField(std::uint32_t p);

  std::uint32_t modulus() const { return p_; }

  FieldElem elem(std::int64_t v) const;
  FieldElem zero() const { return {0}; }
  FieldElem one() const { return {1}; }

  FieldElem add(FieldElem a, FieldElem b) const;
  FieldElem sub(FieldElem a, FieldElem b) const;
  FieldElem mul(FieldElem a, FieldElem b) const;
  FieldElem neg(FieldElem a) const;
  FieldElem inv(FieldElem a) const;
  FieldElem pow(FieldElem a, std::uint64_t e) const;

  /// Quadratic residue test for nonzero a (Euler's criterion).
  bool is_square(FieldElem a) const;

 private:
  std::uint32_t p_;
};

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod);
std::uint64_t multiplicative_order(std::uint64_t a, std::uint64_t p);

/// Smallest generator of F_p^*. For p = 2 this is 1.
std::uint32_t primitive_root(std::uint32_t p);

/// Discrete-log table for F_p^* with respect to the smallest primitive root.
/// O(p) memory; intended for p up to a few times 10^5.
class CharTable {
 public:
  explicit CharTable(std::uint32_t p);

  std::uint32_t modulus() const { return p_; }
  std::uint32_t generator() const { return g_; }

  /// k in [0, p-1) with g^k = x. Throws DomainError for x = 0.
  std::uint32_t dlog(FieldElem x) const;
  FieldElem exp(std::uint64_t k) const;

  /// chi_j(x) = exp(2 pi i j dlog(x) / (p-1)), 0 <= j < p-1.
  std::complex<double> mult_character(std::uint32_t j, FieldElem x) const;

  /// psi(x) = exp(2 pi i x / p).
  std::complex<double> add_character(FieldElem x) const;

 private:
  std::uint32_t p_;
  std::uint32_t g_;
  std::vector<std::uint32_t> dlog_;  // indexed by x, dlog_[0] unused
  std::vector<std::uint32_t> pow_;   // pow_[k] = g^k
};

}  // namespace pgrowth

#endif  // PGROWTH_FF_HPP
