#ifndef PGROWTH_CFRAC_HPP
#define PGROWTH_CFRAC_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pgrowth/group.hpp"
#include "pgrowth/setops.hpp"

namespace pgrowth {

/// Regular continued fraction [0; b_1, ..., b_s] = u/v with b_s >= 2.
struct CFExpansion {
  std::vector<BigInt> digits;
  BigInt u = 0, v = 1;
};

/// Euclidean digits of a/q. Requires 0 <= a <= q, q >= 1, gcd(a, q) = 1,
/// and (a, q) != (1, 1); throws DomainError otherwise. expand(0, 1) is
/// the empty expansion.
CFExpansion expand(const BigInt& a, const BigInt& q);

/// (p_{s-1} p_s | q_{s-1} q_s) = prod_j (0 1 | 1 b_j).
struct Continuant {
  BigInt m[2][2] = {{1, 0}, {0, 1}};
  BigInt det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
  BigInt numerator() const { return m[0][1]; }    // p_s
  BigInt denominator() const { return m[1][1]; }  // q_s
  /// M <- M (0 1 | 1 b).
  void push(const BigInt& b);
};

/// Fixed-width continuant for exhaustive sweeps. push() returns false and
/// leaves the matrix unchanged when an entry would exceed INT64_MAX.
struct Continuant64 {
  std::int64_t m[2][2] = {{1, 0}, {0, 1}};
  bool push(std::uint32_t b);
  /// Exact; entries are below 2^63 so the products fit in 128 bits.
  __int128 det() const {
    return static_cast<__int128>(m[0][0]) * m[1][1] - static_cast<__int128>(m[0][1]) * m[1][0];
  }
};

Continuant continuant(const std::vector<BigInt>& digits);
Continuant continuant(const std::vector<std::uint32_t>& digits);

using Alphabet = std::set<std::uint32_t>;

/// Parses "1..5" or "1,2,7" style alphabets. Throws DomainError on bad
/// input or a zero digit.
Alphabet parse_alphabet(const std::string& text);
std::string alphabet_to_string(const Alphabet& alphabet);

/// Visitor for enumerate_F: (u, v, digits), with u/v reduced.
using FractionVisitor = std::function<void(std::uint64_t, std::uint64_t,
                                           const std::vector<std::uint32_t>&)>;

/// Depth-first walk over digit strings in `alphabet`, pruned once the
/// denominator exceeds Q. Visits each element of F_A(Q) once: 0/1 is
/// included, 1/1 is not, and the last digit of every nonempty string is
/// at least 2. Digits are tried in ascending order.
void enumerate_F(const Alphabet& alphabet, std::uint64_t Q, const FractionVisitor& visit);

struct Fraction {
  std::uint64_t u = 0, v = 1;
  std::vector<std::uint32_t> digits;
  friend auto operator<=>(const Fraction&, const Fraction&) = default;
};

std::vector<Fraction> list_F(const Alphabet& alphabet, std::uint64_t Q);

/// |F_A(Q)| without storage. With jobs > 1 the walk is split by first
/// digit; the count does not depend on jobs.
std::uint64_t count_F(const Alphabet& alphabet, std::uint64_t Q, unsigned jobs = 1);

struct DimensionEstimate {
  double slope = 0;  // estimates 2 w_A
  std::vector<std::pair<std::uint64_t, std::uint64_t>> table;  // (Q, count)
};

/// Least-squares slope of log count_F against log Q. Requires at least two
/// strictly increasing Q values and non-constant counts (DomainError).
DimensionEstimate dimension_estimate(const Alphabet& alphabet,
                                     const std::vector<std::uint64_t>& Q_list,
                                     unsigned jobs = 1);

struct ZarembaResult {
  std::uint64_t p = 0;
  BigInt q, a;
  std::vector<std::uint32_t> digits;
  std::uint64_t multiple_index = 0;  // q / p
  double exponent = 0;               // log q / log p
};

enum class ZarembaStrategy { Dfs, AScan };

/// Smallest q in {p, 2p, ..., multiple_limit p} admitting a/q with every
/// partial quotient in the alphabet, then the smallest such a.
std::optional<ZarembaResult> zaremba_search(std::uint64_t p, const Alphabet& alphabet,
                                            std::uint64_t multiple_limit,
                                            ZarembaStrategy strategy = ZarembaStrategy::Dfs);

/// Re-expands a/q and checks every ZarembaResult invariant.
bool zaremba_result_valid(const ZarembaResult& r, const Alphabet& alphabet);

enum class Parity { Even, Odd, Both };
Parity parse_parity(const std::string& text);

/// Continuants of F_A(Q) with the requested parity of s, reduced mod p.
/// Only even parity fits SL_2; Odd or Both throw DomainError (use
/// matrix_set_mod_p_gl).
ElemSet matrix_set_mod_p(const Alphabet& alphabet, std::uint64_t Q, std::uint32_t p,
                         Parity parity = Parity::Even);

/// Same construction with entries stored without a determinant check,
/// sorted and duplicate-free.
std::vector<GroupElem> matrix_set_mod_p_gl(const Alphabet& alphabet, std::uint64_t Q,
                                           std::uint32_t p, Parity parity);

/// True when distinct fractions give distinct reduced matrices.
bool matrix_set_injective(const Alphabet& alphabet, std::uint64_t Q, std::uint32_t p,
                          Parity parity = Parity::Even);

/// floor(x^{1/k}) for k >= 1.
std::uint64_t integer_root(std::uint64_t x, unsigned k);

/// Even-parity continuants of F_A(floor((p-1)^{1/k})) mod p, k >= 2.
ElemSet lambda_set(std::uint32_t p, const Alphabet& alphabet, unsigned k);

struct LambdaSquareReport {
  std::uint64_t size_lambda_sq = 0;
  std::uint64_t outside_a = 0;  // |Lambda^2 \ A|
  bool contained() const { return outside_a == 0; }
};

LambdaSquareReport lambda_square_in_a(const ElemSet& lambda, const ElemSet& A);

struct SigmaReport {
  std::uint64_t p = 0, M = 0, size_a = 0;
  std::uint64_t sigma_a_ainv = 0;     // sigma_B(A, A^{-1})
  std::uint64_t sigma_ainv_a = 0;     // sigma_B(A^{-1}, A)
  std::uint64_t max_left = 0;         // max_g |A cap gB|
  std::uint64_t max_right = 0;        // max_g |A cap Bg|
  std::uint64_t max_double = 0;       // max_{g,h} |A cap gBh|
  bool sigma_bound = false;           // sigma_B(A, A^{-1}) <= p|A|
  bool sigma_inv_bound = false;       // sigma_B(A^{-1}, A) <= M^2 p|A|
  bool sigma_inv_bound_m = false;     // sigma_B(A^{-1}, A) <= M p|A| (recorded)
  bool coset_bound = false;           // max_left, max_right <= M p
  bool ok() const { return sigma_bound && sigma_inv_bound && coset_bound; }
};

SigmaReport verify_sigma_bounds(const ElemSet& A, std::uint64_t M);

struct LambdaEnergyReport {
  std::uint64_t size_lambda = 0, size_x = 0, M = 0;
  std::uint64_t energy = 0;      // E(Lambda, X)
  std::uint64_t energy_inv = 0;  // E(Lambda^{-1}, X)
  std::uint64_t size_b_lambda = 0, size_lambda_b = 0, size_b = 0;
  bool energy_equal = false;     // E(Lambda, X) = |Lambda||X|
  bool energy_inv_bound = false; // E(Lambda^{-1}, X) <= M^4 |Lambda||X|
  bool b_lambda_exact = false;   // |B Lambda| = |B||Lambda|
  bool lambda_b_bound = false;   // |Lambda B| M^4 >= |B||Lambda|
  bool ok() const {
    return energy_equal && energy_inv_bound && b_lambda_exact && lambda_b_bound;
  }
};

/// X must lie in the standard Borel (PreconditionError otherwise).
LambdaEnergyReport lambda_energy_check(const ElemSet& lambda, const ElemSet& X,
                                       std::uint64_t M);

struct AbaReport {
  std::uint64_t size_aba = 0, size_ainv_b_ainv = 0;
  double ratio = 0, ratio_inv = 0;  // divided by p^3
};

/// |ABA| and |A^{-1}BA^{-1}| for the standard Borel B of SL_2. Throws
/// BudgetExceeded when (#left cosets)(|B|)(#right cosets) exceeds budget.
AbaReport aba_size(const ElemSet& A, const ElemSet& B,
                   std::uint64_t budget = 2'000'000'000ULL);

}  // namespace pgrowth

#endif  // PGROWTH_CFRAC_HPP
