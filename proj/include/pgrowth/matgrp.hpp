#ifndef PGROWTH_MATGRP_HPP
#define PGROWTH_MATGRP_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pgrowth/group.hpp"

namespace pgrowth {

/// Element of the type-A Weyl group S_n. Stored 0-based: perm()[j] is the
/// image of j. The matrix representative sends e_j to +-e_{w(j)}.
class WeylElem {
 public:
  WeylElem() = default;
  explicit WeylElem(std::vector<int> perm);  // validates bijectivity

  static WeylElem identity(int n);
  /// Fundamental reflection s_r swapping r and r+1 (1-based, 1 <= r < n).
  static WeylElem reflection(int n, int r);
  /// Reversal, the longest element.
  static WeylElem longest(int n);
  /// All n! elements in lexicographic order.
  static std::vector<WeylElem> all(int n);

  int degree() const { return static_cast<int>(perm_.size()); }
  const std::vector<int>& perm() const { return perm_; }
  int operator()(int j) const { return perm_[j]; }

  /// Number of inversions.
  int length() const;
  WeylElem inverse() const;
  bool is_identity() const { return length() == 0; }

  /// (this * other)(j) = this(other(j)).
  WeylElem operator*(const WeylElem& other) const;

  /// 1-based one-line notation, e.g. "[2,1,3]".
  std::string to_string() const;

  friend auto operator<=>(const WeylElem&, const WeylElem&) = default;

 private:
  std::vector<int> perm_;
};

/// Signed permutation matrix for w with det 1: the entry of the last row
/// whose 1 is off the diagonal is negated when w is odd.
GroupElem weyl_rep(const MatGroup& G, const WeylElem& w);

/// Fundamental reflection indices J subset {1..n-1}. Rows i and i+1 lie
/// in one diagonal block iff i is in J.
using ReflectionSet = std::vector<int>;

/// Block index (0-based) of each row under the composition induced by J.
std::vector<int> block_of(int n, const ReflectionSet& J);

/// Weyl elements preserving every block of J (the parabolic W_J).
std::vector<WeylElem> weyl_parabolic(int n, const ReflectionSet& J);

/// (q-1)^{n-1} q^{n(n-1)/2} sum_{w in W_J} q^{l(w)}. Throws
/// std::overflow_error if the result does not fit in 64 bits.
std::uint64_t parabolic_order(const ReflectionSet& J, int n, std::uint64_t q);

enum class SubgroupKind { Borel, Unipotent, Torus, Parabolic, LowerBorel };

struct SubgroupSpec {
  SubgroupKind kind = SubgroupKind::Borel;
  ReflectionSet J;  // Parabolic only

  static SubgroupSpec borel() { return {SubgroupKind::Borel, {}}; }
  static SubgroupSpec lower_borel() { return {SubgroupKind::LowerBorel, {}}; }
  static SubgroupSpec unipotent() { return {SubgroupKind::Unipotent, {}}; }
  static SubgroupSpec torus() { return {SubgroupKind::Torus, {}}; }
  static SubgroupSpec parabolic(ReflectionSet J) {
    return {SubgroupKind::Parabolic, std::move(J)};
  }

  std::string to_string() const;
};

/// Every determinant-1 matrix exactly once. Throws BudgetExceeded when
/// |SL_n(F_p)| > budget.
ElemSet enumerate_group(const MatGroup& G,
                        std::uint64_t budget = kDefaultBudget);

/// Borel: upper triangular; Unipotent: upper unitriangular; Torus:
/// diagonal; Parabolic(J): block upper triangular (stabilizer of the flag
/// determined by J); LowerBorel: lower triangular.
ElemSet subgroup(const MatGroup& G, const SubgroupSpec& spec,
                 std::uint64_t budget = kDefaultBudget);

/// Root subgroup element I + t E_{ij} (0-based, i != j).
GroupElem root_element(const MatGroup& G, int i, int j, std::uint32_t t);

/// g = b * rep(w) * u with b in B and u in U''_w, the upper unitriangular
/// matrices supported on the inversion positions of w.
struct BruhatForm {
  GroupElem b;
  WeylElem w;
  GroupElem u;
};

BruhatForm bruhat_decompose(const MatGroup& G, const GroupElem& g);

/// True iff u is upper unitriangular and supported on inversions of w.
bool in_u_double_prime(const MatGroup& G, const WeylElem& w,
                       const GroupElem& u);

/// All of U''_w (size q^{l(w)}).
ElemSet u_double_prime(const MatGroup& G, const WeylElem& w);

/// Number of group elements in each cell B w U''_w.
std::map<WeylElem, std::uint64_t> bruhat_cell_census(
    const MatGroup& G, std::uint64_t budget = kDefaultBudget);

/// Every element of rep(s_r) B rep(w) lies in B w B or B s_r w B.
bool check_inclusion_wrBw(const MatGroup& G, int r, const WeylElem& w);

/// {g s g^{-1} : s in S}.
ElemSet conjugate(const GroupElem& g, const ElemSet& S);

}  // namespace pgrowth

#endif  // PGROWTH_MATGRP_HPP
