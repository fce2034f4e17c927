#ifndef PGROWTH_SETOPS_HPP
#define PGROWTH_SETOPS_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pgrowth/group.hpp"

namespace pgrowth {

using BigInt = boost::multiprecision::cpp_int;

// ---------------------------------------------------------------------------
// Product-set algebra
// ---------------------------------------------------------------------------

/// {ab : a in A, b in B}. With jobs > 1 the left factor is split across
/// threads; the result is identical for every jobs value.
ElemSet product(const ElemSet& A, const ElemSet& B, unsigned jobs = 1);

/// A^n for n >= 1.
ElemSet power(const ElemSet& A, int n);

/// |{(a, b) in A x B : ab = x}|.
std::uint64_t rep_count(const ElemSet& A, const ElemSet& B, const GroupElem& x);

/// Common energy E(A, B) = sum_x r_{A^{-1}B}(x)^2.
std::uint64_t energy(const ElemSet& A, const ElemSet& B);

/// sigma_P(B, C) = sum_{x in P} r_{BC}(x) = |{(b, c) : bc in P}|.
std::uint64_t sigma(const ElemSet& P, const ElemSet& B, const ElemSet& C);

bool intersects(const ElemSet& A, const ElemSet& B);

// ---------------------------------------------------------------------------
// Cosets of a subgroup
// ---------------------------------------------------------------------------

enum class CosetSide { Left, Right };  // gP or Pg

/// Canonical representative of gP (Left) or Pg (Right) for a fixed
/// subgroup P. The standard Borel of SL_2 uses the projective-line
/// description; any other P falls back to min over the coset.
class CosetIndex {
 public:
  explicit CosetIndex(const ElemSet& P);
  GroupElem key(const GroupElem& g, CosetSide side) const;
  const ElemSet& subgroup() const { return P_; }

 private:
  ElemSet P_;
  bool sl2_borel_ = false;
};

struct CosetMax {
  std::uint64_t count = 0;
  std::optional<GroupElem> witness;  // representative of a maximizing coset
};

/// max |A cap gP| (Left) or |A cap Pg| (Right). By default the coset P
/// itself is skipped, giving Delta = max_{g notin P} |A cap gP|.
CosetMax max_coset_intersection(const ElemSet& A, const ElemSet& P,
                                CosetSide side = CosetSide::Left,
                                bool include_trivial_coset = false);

/// A * P * C for a subgroup P, via left-coset representatives of A.
ElemSet product_through_subgroup(const ElemSet& A, const ElemSet& P,
                                 const ElemSet& C);

// ---------------------------------------------------------------------------
// Growth relative to a parabolic subgroup
// ---------------------------------------------------------------------------

struct GrowthReport {
  std::uint64_t q = 0;
  std::uint64_t size_a = 0, size_p = 0, size_ap = 0, size_pa = 0;
  std::uint64_t size_a_cap_p = 0;
  std::uint64_t delta = 0;            // max_{g notin P} |A cap gP|
  std::optional<GroupElem> delta_witness;

  bool first_alternative = false;     // |AP||A cap P| >= |A|^2 / 2
  bool second_alternative = false;    // |AP||PA| >= |A||P|q / 4
  bool max_bound = false;             // max{|AP|,|PA|} >= min{...}/2
  bool ap_energy_bound = false;       // |AP| >= min{|A||P|/Delta, |A|^2/|A cap P|}/2
  bool pa_delta_bound = false;        // |PA| >= q Delta / 2

  bool disjunction() const { return first_alternative || second_alternative; }
  bool ok() const {
    return disjunction() && max_bound && ap_energy_bound && pa_delta_bound;
  }
};

/// Evaluates the growth alternatives for A against the subgroup P with
/// q = p. Booleans are recomputable from the recorded sizes.
GrowthReport verify_growth(const ElemSet& A, const ElemSet& P);

/// Recomputes the booleans of a report from its sizes.
GrowthReport recompute_growth_flags(GrowthReport r);

struct ApaReport {
  std::uint64_t q = 0;
  std::uint64_t size_a = 0, size_p = 0, size_apa = 0;
  std::uint64_t sigma_inv_a = 0;  // sigma_P(A^{-1}, A)
  std::uint64_t sigma_a_inv = 0;  // sigma_P(A, A^{-1})
  bool holds = false;  // |APA| >= |P|/4 * min{q, |A|^4 / (sigma sigma')}
};

ApaReport verify_apa(const ElemSet& A, const ElemSet& P);

struct PabReport {
  std::uint64_t q = 0;
  std::uint64_t size_p = 0, size_pab = 0;
  bool holds = false;  // |PAB| >= q|P|
};

/// Requires A not contained in P (PreconditionError otherwise).
PabReport verify_pab(const ElemSet& A, const ElemSet& Borel, const ElemSet& P);

struct RpgpReport {
  std::uint64_t q = 0;
  std::uint64_t size_p = 0;
  std::uint64_t max_r = 0;            // max_x r_{PgP}(x)
  std::uint64_t double_cosets = 0;    // distinct PgP examined
  bool bound_holds = false;           // max_r <= 2|P|/q
  bool sharp = false;                 // max_r == |P|/q
};

/// max_x r_{PgP}(x) for one g notin P.
RpgpReport check_r_pgp(const ElemSet& P, const GroupElem& g);

/// Maximum over every g in G \ P. r_{PgP} is constant along PgP up to
/// translation, so one representative per double coset suffices.
RpgpReport check_r_pgp_all(const ElemSet& P, const ElemSet& G);

struct SubgroupIntersectionReport {
  std::uint64_t max_xy = 0;  // max_{x,y} |x G1 cap G2 y|
  std::uint64_t max_xx = 0;  // max_x |x G1 cap G2 x|
  std::uint64_t size_cap = 0;
  std::uint64_t size_g1 = 0, size_g2 = 0, size_group = 0;
  bool maxima_equal = false;
  bool lower_bound_holds = false;  // |G1 cap G2| |G| >= |G1||G2|
};

SubgroupIntersectionReport subgroup_intersection(const ElemSet& G1,
                                                 const ElemSet& G2,
                                                 const ElemSet& G);

struct PowerIntersectReport {
  std::optional<int> first_n;            // smallest n with A^n cap P != {}
  std::vector<std::uint64_t> power_sizes;  // |A^1|, |A^2|, ...
  bool stabilized = false;
};

/// Iterates A, A^2, ... up to n_max, stopping early once A^{n+1} = A^n.
PowerIntersectReport power_intersect(const ElemSet& A, const ElemSet& P,
                                     int n_max);

struct QuasirandomReport {
  BigInt lhs;  // q |X| |P|^3 d^{n+2} prod |Y_j|
  BigInt rhs;  // 4 |G|^{n+4}
  bool condition_holds = false;
  bool intersection_nonempty = false;
  bool implication_ok() const {
    return !condition_holds || intersection_nonempty;
  }
};

/// Requires X cap P = {} (PreconditionError otherwise).
QuasirandomReport quasirandom_check(const ElemSet& X,
                                    const std::vector<ElemSet>& Ys,
                                    const ElemSet& P, std::uint64_t d_min);

struct TriplingReport {
  std::uint64_t size_a = 0, size_aa = 0, size_aaa = 0;
  double ratio_aa() const {
    return size_a ? static_cast<double>(size_aa) / size_a : 0.0;
  }
  double ratio_aaa() const {
    return size_a ? static_cast<double>(size_aaa) / size_a : 0.0;
  }
};

/// |AA|/|A| and |AAA|/|A|. Throws BudgetExceeded if |AA||A| > budget.
TriplingReport tripling(const ElemSet& A, std::uint64_t budget = 100'000'000);

/// Elements (l u | 0 l^{-1}) of SL_2(F_p) with u != 0 and l, u quadratic
/// residues. Requires p = 3 (mod 4).
ElemSet qr_fixture(const MatGroup& G);

// ---------------------------------------------------------------------------
// Seeded sampling
// ---------------------------------------------------------------------------

using Rng = std::mt19937_64;

/// Uniform integer in [0, n) by rejection; portable across standard
/// libraries, unlike std::uniform_int_distribution.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n);

/// Uniform k-subset of `universe` (k clamped to its size).
ElemSet random_subset(const ElemSet& universe, std::size_t k, Rng& rng);

/// Uniform element of SL_n(F_p) without enumerating the group.
GroupElem random_element(const MatGroup& G, Rng& rng);

}  // namespace pgrowth

#endif  // PGROWTH_SETOPS_HPP
