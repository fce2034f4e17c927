#include "pgrowth/setops.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace pgrowth {

namespace {

using ElemHashSet = std::unordered_set<GroupElem, GroupElemHash>;
using ElemCounter = std::unordered_map<GroupElem, std::uint64_t, GroupElemHash>;

BigInt big(std::uint64_t v) { return BigInt(v); }

}  // namespace

ElemSet product(const ElemSet& A, const ElemSet& B, unsigned jobs) {
  require_same_group(A, B);
  const auto& G = A.group();
  if (A.empty() || B.empty()) return ElemSet(G);
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(A.size())));

  auto work = [&](std::size_t lo, std::size_t hi, ElemHashSet& out) {
    for (std::size_t i = lo; i < hi; ++i)
      for (const auto& b : B) out.insert(G.mul(A[i], b));
  };

  std::vector<ElemHashSet> parts(jobs);
  if (jobs == 1) {
    work(0, A.size(), parts[0]);
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (A.size() + jobs - 1) / jobs;
    for (unsigned t = 0; t < jobs; ++t) {
      std::size_t lo = t * chunk, hi = std::min(A.size(), lo + chunk);
      threads.emplace_back(work, lo, hi, std::ref(parts[t]));
    }
    for (auto& th : threads) th.join();
  }
  std::vector<GroupElem> out;
  for (auto& part : parts) out.insert(out.end(), part.begin(), part.end());
  return ElemSet(G, std::move(out));
}

ElemSet power(const ElemSet& A, int n) {
  if (n < 1) throw DomainError("power requires n >= 1");
  ElemSet cur = A;
  for (int k = 1; k < n; ++k) cur = product(cur, A);
  return cur;
}

std::uint64_t rep_count(const ElemSet& A, const ElemSet& B, const GroupElem& x) {
  require_same_group(A, B);
  const auto& G = A.group();
  std::uint64_t count = 0;
  for (const auto& a : A)
    if (B.contains(G.mul(G.inv(a), x))) ++count;
  return count;
}

std::uint64_t energy(const ElemSet& A, const ElemSet& B) {
  require_same_group(A, B);
  const auto& G = A.group();
  ElemCounter r;
  r.reserve(A.size() * B.size());
  for (const auto& a : A) {
    const auto ainv = G.inv(a);
    for (const auto& b : B) ++r[G.mul(ainv, b)];
  }
  std::uint64_t e = 0;
  for (const auto& [x, c] : r) e += c * c;
  return e;
}

std::uint64_t sigma(const ElemSet& P, const ElemSet& B, const ElemSet& C) {
  require_same_group(P, B);
  require_same_group(P, C);
  const auto& G = P.group();
  std::uint64_t s = 0;
  for (const auto& b : B)
    for (const auto& c : C)
      if (P.contains(G.mul(b, c))) ++s;
  return s;
}

bool intersects(const ElemSet& A, const ElemSet& B) {
  require_same_group(A, B);
  const auto& small = A.size() <= B.size() ? A : B;
  const auto& large = A.size() <= B.size() ? B : A;
  return std::any_of(small.begin(), small.end(),
                     [&](const GroupElem& g) { return large.contains(g); });
}

CosetIndex::CosetIndex(const ElemSet& P) : P_(P) {
  const auto& G = P.group();
  const std::uint64_t p = G.modulus();
  if (G.dim() == 2 && P.size() == p * (p - 1)) {
    sl2_borel_ = std::all_of(P.begin(), P.end(), [&](const GroupElem& g) {
      return G.is_upper_triangular(g);
    });
  }
}

GroupElem CosetIndex::key(const GroupElem& g, CosetSide side) const {
  const auto& G = P_.group();
  if (sl2_borel_) {
    const auto& f = G.field();
    if (side == CosetSide::Left) {
      // gB is determined by the line through the first column of g.
      FieldElem a{g.at(0, 0)}, c{g.at(1, 0)};
      if (c.value == 0) return G.identity();
      auto x = f.mul(a, f.inv(c));
      return G.make_unchecked(std::vector<std::int64_t>{x.value, -1, 1, 0});
    }
    // Bg is determined by the line through the second row of g.
    FieldElem c{g.at(1, 0)}, d{g.at(1, 1)};
    if (c.value == 0) return G.identity();
    auto y = f.mul(d, f.inv(c));
    return G.make_unchecked(std::vector<std::int64_t>{0, -1, 1, y.value});
  }
  GroupElem best = side == CosetSide::Left ? G.mul(g, P_[0]) : G.mul(P_[0], g);
  for (const auto& h : P_) {
    auto x = side == CosetSide::Left ? G.mul(g, h) : G.mul(h, g);
    if (x < best) best = x;
  }
  return best;
}

CosetMax max_coset_intersection(const ElemSet& A, const ElemSet& P,
                                CosetSide side, bool include_trivial_coset) {
  require_same_group(A, P);
  CosetIndex index(P);
  const auto trivial = index.key(P.group().identity(), side);
  std::map<GroupElem, std::uint64_t> counts;
  for (const auto& a : A) {
    auto k = index.key(a, side);
    if (!include_trivial_coset && k == trivial) continue;
    ++counts[k];
  }
  CosetMax best;
  for (const auto& [k, c] : counts)
    if (c > best.count) best = {c, k};
  return best;
}

ElemSet product_through_subgroup(const ElemSet& A, const ElemSet& P,
                                 const ElemSet& C) {
  require_same_group(A, P);
  require_same_group(A, C);
  const auto& G = A.group();
  CosetIndex index(P);
  std::vector<GroupElem> reps;
  for (const auto& a : A) reps.push_back(index.key(a, CosetSide::Left));
  ElemSet rep_set(G, std::move(reps));
  return product(rep_set, product(P, C));
}

GrowthReport recompute_growth_flags(GrowthReport r) {
  const BigInt a = big(r.size_a), p = big(r.size_p), q = big(r.q);
  const BigInt ap = big(r.size_ap), pa = big(r.size_pa);
  const BigInt cap = big(r.size_a_cap_p), delta = big(r.delta);
  const BigInt m = std::max(ap, pa);

  r.first_alternative = 2 * ap * cap >= a * a;
  r.second_alternative = 4 * ap * pa >= a * p * q;
  // 2 max >= min{|A|^2/|A cap P|, sqrt(|A||P|q)}; an infinite term never
  // attains the minimum.
  r.max_bound = (cap > 0 && 2 * m * cap >= a * a) || 4 * m * m >= a * p * q;
  r.ap_energy_bound = r.size_a == 0 ||
                      (delta > 0 && 2 * ap * delta >= a * p) ||
                      (cap > 0 && 2 * ap * cap >= a * a);
  r.pa_delta_bound = 2 * pa >= q * delta;
  return r;
}

GrowthReport verify_growth(const ElemSet& A, const ElemSet& P) {
  require_same_group(A, P);
  GrowthReport r;
  r.q = A.group().modulus();
  r.size_a = A.size();
  r.size_p = P.size();
  r.size_ap = product(A, P).size();
  r.size_pa = product(P, A).size();
  r.size_a_cap_p = set_intersection(A, P).size();
  auto dm = max_coset_intersection(A, P, CosetSide::Left, false);
  r.delta = dm.count;
  r.delta_witness = dm.witness;
  return recompute_growth_flags(r);
}

ApaReport verify_apa(const ElemSet& A, const ElemSet& P) {
  require_same_group(A, P);
  ApaReport r;
  r.q = A.group().modulus();
  r.size_a = A.size();
  r.size_p = P.size();
  r.size_apa = product_through_subgroup(A, P, A).size();
  const auto Ainv = A.inverse();
  r.sigma_inv_a = sigma(P, Ainv, A);
  r.sigma_a_inv = sigma(P, A, Ainv);
  const BigInt apa = big(r.size_apa), p = big(r.size_p), q = big(r.q);
  const BigInt a4 = pow(big(r.size_a), 4);
  r.holds = 4 * apa >= p * q ||
            4 * apa * big(r.sigma_inv_a) * big(r.sigma_a_inv) >= p * a4;
  return r;
}

PabReport verify_pab(const ElemSet& A, const ElemSet& Borel, const ElemSet& P) {
  require_same_group(A, P);
  require_same_group(A, Borel);
  if (is_subset(A, P))
    throw PreconditionError("verify_pab requires A not contained in P");
  const auto& G = A.group();
  ElemSet id(G, {G.identity()});
  auto ab = product_through_subgroup(A, Borel, id);
  PabReport r;
  r.q = G.modulus();
  r.size_p = P.size();
  r.size_pab = product(P, ab).size();
  r.holds = big(r.size_pab) >= big(r.q) * big(r.size_p);
  return r;
}

namespace {

ElemCounter r_pgp_counts(const ElemSet& P, const GroupElem& g) {
  const auto& G = P.group();
  ElemCounter r;
  r.reserve(P.size() * 4);
  for (const auto& a : P) {
    const auto ag = G.mul(a, g);
    for (const auto& b : P) ++r[G.mul(ag, b)];
  }
  return r;
}

void finish_rpgp(RpgpReport& r) {
  r.bound_holds = big(r.max_r) * big(r.q) <= 2 * big(r.size_p);
  r.sharp = big(r.max_r) * big(r.q) == big(r.size_p);
}

}  // namespace

RpgpReport check_r_pgp(const ElemSet& P, const GroupElem& g) {
  if (P.contains(g)) throw PreconditionError("check_r_pgp requires g notin P");
  RpgpReport r;
  r.q = P.group().modulus();
  r.size_p = P.size();
  r.double_cosets = 1;
  for (const auto& [x, c] : r_pgp_counts(P, g)) r.max_r = std::max(r.max_r, c);
  finish_rpgp(r);
  return r;
}

RpgpReport check_r_pgp_all(const ElemSet& P, const ElemSet& G) {
  require_same_group(P, G);
  RpgpReport r;
  r.q = P.group().modulus();
  r.size_p = P.size();
  ElemHashSet covered;
  for (const auto& g : G) {
    if (P.contains(g) || covered.count(g)) continue;
    auto counts = r_pgp_counts(P, g);
    ++r.double_cosets;
    for (const auto& [x, c] : counts) {
      r.max_r = std::max(r.max_r, c);
      covered.insert(x);
    }
  }
  finish_rpgp(r);
  return r;
}

SubgroupIntersectionReport subgroup_intersection(const ElemSet& G1,
                                                 const ElemSet& G2,
                                                 const ElemSet& G) {
  require_same_group(G1, G2);
  require_same_group(G1, G);
  const auto& grp = G.group();
  SubgroupIntersectionReport r;
  r.size_g1 = G1.size();
  r.size_g2 = G2.size();
  r.size_group = G.size();
  r.size_cap = set_intersection(G1, G2).size();
  // |x G1 cap G2 y| = |{g in G1 : x g y^{-1} in G2}|
  for (const auto& x : G) {
    for (const auto& y : G) {
      const auto yinv = grp.inv(y);
      std::uint64_t c = 0;
      for (const auto& g : G1)
        if (G2.contains(grp.mul(x, g, yinv))) ++c;
      r.max_xy = std::max(r.max_xy, c);
      if (x == y) r.max_xx = std::max(r.max_xx, c);
    }
  }
  r.maxima_equal = r.max_xy == r.max_xx;
  r.lower_bound_holds =
      big(r.size_cap) * big(r.size_group) >= big(r.size_g1) * big(r.size_g2);
  return r;
}

PowerIntersectReport power_intersect(const ElemSet& A, const ElemSet& P,
                                     int n_max) {
  require_same_group(A, P);
  if (n_max < 1) throw DomainError("n_max must be >= 1");
  PowerIntersectReport r;
  ElemSet cur = A;
  for (int n = 1; n <= n_max; ++n) {
    r.power_sizes.push_back(cur.size());
    if (intersects(cur, P)) {
      r.first_n = n;
      return r;
    }
    if (n == n_max) break;
    ElemSet next = product(cur, A);
    if (next == cur) {
      r.stabilized = true;
      break;
    }
    cur = std::move(next);
  }
  return r;
}

QuasirandomReport quasirandom_check(const ElemSet& X,
                                    const std::vector<ElemSet>& Ys,
                                    const ElemSet& P, std::uint64_t d_min) {
  require_same_group(X, P);
  if (intersects(X, P))
    throw PreconditionError("quasirandom_check requires X cap P = {}");
  const auto& G = X.group();
  const std::size_t n = Ys.size();
  QuasirandomReport r;
  r.lhs = big(G.modulus()) * big(X.size()) * pow(big(P.size()), 3) *
          pow(big(d_min), static_cast<unsigned>(n + 2));
  for (const auto& Y : Ys) r.lhs *= big(Y.size());
  r.rhs = 4 * pow(big(G.order()), static_cast<unsigned>(n + 4));
  r.condition_holds = r.lhs >= r.rhs;

  ElemSet chain = X;
  for (const auto& Y : Ys) {
    require_same_group(X, Y);
    chain = product(chain, Y);
  }
  // X Y_1 ... Y_n X meets P iff some z in the chain has z x in P.
  r.intersection_nonempty = false;
  for (const auto& z : chain) {
    for (const auto& x : X)
      if (P.contains(G.mul(z, x))) {
        r.intersection_nonempty = true;
        break;
      }
    if (r.intersection_nonempty) break;
  }
  return r;
}

TriplingReport tripling(const ElemSet& A, std::uint64_t budget) {
  TriplingReport r;
  r.size_a = A.size();
  auto aa = product(A, A);
  r.size_aa = aa.size();
  if (big(aa.size()) * big(A.size()) > big(budget))
    throw BudgetExceeded("|AA||A| exceeds budget");
  r.size_aaa = product(aa, A).size();
  return r;
}

ElemSet qr_fixture(const MatGroup& G) {
  if (G.dim() != 2) throw DomainError("qr_fixture lives in SL_2");
  const auto p = G.modulus();
  if (p % 4 != 3) throw DomainError("qr_fixture requires p = 3 (mod 4)");
  const auto& f = G.field();
  std::vector<GroupElem> out;
  for (std::uint32_t l = 1; l < p; ++l) {
    if (!f.is_square({l})) continue;
    const auto linv = f.inv({l}).value;
    for (std::uint32_t u = 1; u < p; ++u) {
      if (!f.is_square({u})) continue;
      out.push_back(G.make(std::vector<std::int64_t>{l, u, 0, linv}));
    }
  }
  return ElemSet(G, std::move(out));
}

std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  if (n == 0) throw DomainError("uniform_below(0)");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

ElemSet random_subset(const ElemSet& universe, std::size_t k, Rng& rng) {
  k = std::min(k, universe.size());
  std::vector<std::size_t> idx(universe.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<GroupElem> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    auto j = i + uniform_below(rng, idx.size() - i);
    std::swap(idx[i], idx[j]);
    out.push_back(universe[idx[i]]);
  }
  return ElemSet(universe.group(), std::move(out));
}

GroupElem random_element(const MatGroup& G, Rng& rng) {
  const int n = G.dim();
  const auto& f = G.field();
  std::vector<std::int64_t> v(n * n);
  while (true) {
    for (auto& x : v) x = static_cast<std::int64_t>(uniform_below(rng, G.modulus()));
    auto g = G.make_unchecked(v);
    auto d = G.det(g);
    if (d == 0) continue;
    // Scaling the first row by det^{-1} maps GL_n onto SL_n uniformly.
    auto dinv = f.inv({d});
    for (int j = 0; j < n; ++j) g.set(0, j, f.mul({g.at(0, j)}, dinv).value);
    return g;
  }
}

}  // namespace pgrowth
