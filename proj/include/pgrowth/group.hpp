#ifndef PGROWTH_GROUP_HPP
#define PGROWTH_GROUP_HPP

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgrowth/ff.hpp"

namespace pgrowth {

/// Raised when an enumeration or product would exceed its element budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a caller violates a documented precondition
/// (set not disjoint from P, g inside P, mismatched contexts, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kMaxDim = 4;
inline constexpr std::uint64_t kDefaultBudget = 10'000'000;

/// An n x n matrix over F_p, row-major, canonical entries in [0, p).
/// Unused trailing slots are always zero so defaulted comparison and
/// hashing act on the canonical form.
struct GroupElem {
  std::uint8_t n = 0;
  std::array<std::uint16_t, kMaxDim * kMaxDim> e{};

  std::uint32_t at(int i, int j) const { return e[i * n + j]; }
  void set(int i, int j, std::uint32_t v) {
    e[i * n + j] = static_cast<std::uint16_t>(v);
  }

  friend auto operator<=>(const GroupElem&, const GroupElem&) = default;
};

struct GroupElemHash {
  std::size_t operator()(const GroupElem& g) const noexcept;
};

/// SL_n(F_p) as a computational context.
class MatGroup {
 public:
  /// 2 <= n <= 4, p prime below 2^16.
  MatGroup(int n, std::uint32_t p);

  int dim() const { return n_; }
  std::uint32_t modulus() const { return field_.modulus(); }
  const PrimeField& field() const { return field_; }

  GroupElem identity() const;
  GroupElem scalar(std::int64_t c) const;  // c*I, det may differ from 1

  /// Builds an element from row-major integers reduced mod p.
  /// Throws DomainError unless the determinant is 1.
  GroupElem make(std::span<const std::int64_t> rowmajor) const;
  GroupElem make(std::initializer_list<std::int64_t> rowmajor) const {
    return make(std::span<const std::int64_t>(rowmajor.begin(), rowmajor.size()));
  }
  /// Same as make() without the determinant check (for GL_n data).
  GroupElem make_unchecked(std::span<const std::int64_t> rowmajor) const;

  GroupElem mul(const GroupElem& a, const GroupElem& b) const;
  GroupElem mul(const GroupElem& a, const GroupElem& b,
                const GroupElem& c) const {
    return mul(mul(a, b), c);
  }
  GroupElem inv(const GroupElem& a) const;
  std::uint32_t det(const GroupElem& a) const;
  GroupElem conj(const GroupElem& g, const GroupElem& x) const {
    return mul(g, x, inv(g));
  }

  bool is_upper_triangular(const GroupElem& a) const;

  /// Exact order of SL_n(F_p), or throws std::overflow_error.
  std::uint64_t order() const;

  std::string to_string(const GroupElem& a) const;

  friend bool operator==(const MatGroup& a, const MatGroup& b) {
    return a.n_ == b.n_ && a.modulus() == b.modulus();
  }

 private:
  int n_;
  PrimeField field_;
};

/// Finite subset of SL_n(F_p): sorted, duplicate-free, one shared context.
/// Sorted storage makes iteration order (and every report built from it)
/// independent of how the set was produced.
class ElemSet {
 public:
  explicit ElemSet(const MatGroup& group) : group_(group) {}
  ElemSet(const MatGroup& group, std::vector<GroupElem> elems);

  const MatGroup& group() const { return group_; }
  std::size_t size() const { return elems_.size(); }
  bool empty() const { return elems_.empty(); }
  bool contains(const GroupElem& g) const;

  auto begin() const { return elems_.begin(); }
  auto end() const { return elems_.end(); }
  const std::vector<GroupElem>& elems() const { return elems_; }
  const GroupElem& operator[](std::size_t i) const { return elems_[i]; }

  ElemSet inverse() const;

  friend bool operator==(const ElemSet& a, const ElemSet& b) {
    return a.group_ == b.group_ && a.elems_ == b.elems_;
  }

 private:
  MatGroup group_;
  std::vector<GroupElem> elems_;
};

void require_same_group(const ElemSet& a, const ElemSet& b);

ElemSet set_union(const ElemSet& a, const ElemSet& b);
ElemSet set_intersection(const ElemSet& a, const ElemSet& b);
ElemSet set_difference(const ElemSet& a, const ElemSet& b);
bool is_subset(const ElemSet& a, const ElemSet& b);

}  // namespace pgrowth

#endif  // PGROWTH_GROUP_HPP
