#include "pgrowth/setops.hpp"

#include <gtest/gtest.h>

#include "pgrowth/matgrp.hpp"

using namespace pgrowth;

namespace {

struct Sl2 {
  MatGroup G;
  ElemSet all, B, Bminus, T, U;
  GroupElem w;
  explicit Sl2(std::uint32_t p)
      : G(2, p),
        all(enumerate_group(G)),
        B(subgroup(G, SubgroupSpec::borel())),
        Bminus(subgroup(G, SubgroupSpec::lower_borel())),
        T(subgroup(G, SubgroupSpec::torus())),
        U(subgroup(G, SubgroupSpec::unipotent())),
        w(weyl_rep(G, WeylElem::reflection(2, 1))) {}
};

ElemSet single(const MatGroup& G, const GroupElem& g) { return ElemSet(G, {g}); }

// Oracle: E(A,B) as the literal quadruple count.
std::uint64_t brute_energy(const ElemSet& A, const ElemSet& B) {
  const auto& G = A.group();
  std::uint64_t e = 0;
  for (const auto& a : A)
    for (const auto& a1 : A)
      for (const auto& b : B)
        for (const auto& b1 : B)
          if (G.mul(G.inv(a), b) == G.mul(G.inv(a1), b1)) ++e;
  return e;
}

// Oracle: scan every g notin P and count A cap gP directly.
std::uint64_t brute_delta(const ElemSet& A, const ElemSet& P, const ElemSet& all) {
  const auto& G = A.group();
  std::uint64_t best = 0;
  for (const auto& g : all) {
    if (P.contains(g)) continue;
    std::uint64_t c = 0;
    for (const auto& a : A)
      if (P.contains(G.mul(G.inv(g), a))) ++c;
    best = std::max(best, c);
  }
  return best;
}

}  // namespace

TEST(Product, Identities) {
  Sl2 s(5);
  auto id = single(s.G, s.G.identity());
  EXPECT_EQ(product(id, s.B), s.B);
  EXPECT_EQ(product(s.B, s.B).size(), 20u);
  auto bwb = product(product(s.B, single(s.G, s.w)), s.B);
  auto A = set_union(s.B, bwb);
  EXPECT_EQ(A.size(), 120u);
  EXPECT_EQ(product(A, s.B), A);
  EXPECT_EQ(product(s.B, A), A);
}

TEST(Product, JobsDoNotChangeResult) {
  Sl2 s(7);
  Rng rng(11);
  auto A = random_subset(s.all, 40, rng);
  auto C = random_subset(s.all, 25, rng);
  EXPECT_EQ(product(A, C, 1), product(A, C, 4));
}

TEST(Product, SizeBounds) {
  Sl2 s(7);
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    auto A = random_subset(s.all, 1 + uniform_below(rng, 30), rng);
    auto C = set_union(random_subset(s.all, 1 + uniform_below(rng, 30), rng),
                       single(s.G, s.G.identity()));
    auto AC = product(A, C);
    EXPECT_LE(AC.size(), A.size() * C.size());
    EXPECT_GE(AC.size(), std::max(A.size(), C.size()) > 0 ? A.size() : 0);
  }
}

TEST(Product, ContextMismatch) {
  MatGroup G5(2, 5), G7(2, 7);
  EXPECT_THROW(product(ElemSet(G5, {G5.identity()}), ElemSet(G7, {G7.identity()})),
               PreconditionError);
}

TEST(RepCount, Examples) {
  Sl2 s(5);
  Rng rng(5);
  auto A = random_subset(s.all, 17, rng);
  EXPECT_EQ(rep_count(A, A.inverse(), s.G.identity()), A.size());
  for (int i = 0; i < 10; ++i)
    EXPECT_EQ(rep_count(s.all, s.all, s.all[i * 7]), 120u);
  auto g = s.all[3], h = s.all[8];
  EXPECT_EQ(rep_count(single(s.G, g), single(s.G, h), s.G.mul(g, h)), 1u);
  EXPECT_EQ(rep_count(single(s.G, g), single(s.G, h), s.G.mul(h, h)),
            s.G.mul(g, h) == s.G.mul(h, h) ? 1u : 0u);
}

TEST(Energy, SubgroupAndSymmetry) {
  Sl2 s(5);
  EXPECT_EQ(energy(s.B, s.B), 20u * 20u * 20u);
  EXPECT_EQ(energy(s.T, s.T), 4u * 4u * 4u);
  Rng rng(17);
  for (int t = 0; t < 5; ++t) {
    auto A = random_subset(s.all, 9, rng);
    auto C = random_subset(s.all, 7, rng);
    EXPECT_EQ(energy(A, C), energy(C, A));
    EXPECT_EQ(energy(A, C), brute_energy(A, C));
  }
}

TEST(Energy, CauchySchwarz) {
  Sl2 s3(3);
  // Equality case: 216 * 6 = 6^2 * 6^2.
  EXPECT_EQ(energy(s3.B, s3.B), 216u);
  EXPECT_EQ(energy(s3.B, s3.B) * product(s3.B.inverse(), s3.B).size(), 1296u);
  Sl2 s(7);
  Rng rng(23);
  for (int t = 0; t < 30; ++t) {
    auto A = random_subset(s.all, 1 + uniform_below(rng, 40), rng);
    auto C = random_subset(s.all, 1 + uniform_below(rng, 40), rng);
    const std::uint64_t a = A.size(), c = C.size();
    EXPECT_GE(energy(A, C) * product(A.inverse(), C).size(), a * a * c * c);
  }
}

TEST(Sigma, Examples) {
  Sl2 s(5);
  Rng rng(2);
  auto A = random_subset(s.all, 12, rng);
  auto C = random_subset(s.all, 9, rng);
  EXPECT_EQ(sigma(s.all, A, C), 12u * 9u);
  // U * U = U is disjoint from the non-unipotent torus elements.
  auto Tnontrivial = set_difference(s.T, single(s.G, s.G.identity()));
  EXPECT_EQ(sigma(Tnontrivial, s.U, s.U), 0u);
}

TEST(CosetIndex, BorelFastPathMatchesMembership) {
  Sl2 s(7);
  CosetIndex idx(s.B);
  for (std::size_t i = 0; i < s.all.size(); i += 5)
    for (std::size_t j = 0; j < s.all.size(); j += 7) {
      const auto& g = s.all[i];
      const auto& h = s.all[j];
      bool same_left = s.B.contains(s.G.mul(s.G.inv(h), g));
      bool same_right = s.B.contains(s.G.mul(g, s.G.inv(h)));
      EXPECT_EQ(idx.key(g, CosetSide::Left) == idx.key(h, CosetSide::Left),
                same_left);
      EXPECT_EQ(idx.key(g, CosetSide::Right) == idx.key(h, CosetSide::Right),
                same_right);
    }
}

TEST(MaxCosetIntersection, Examples) {
  Sl2 s(7);
  EXPECT_EQ(max_coset_intersection(s.T, s.B).count, 0u);
  auto coset = product(single(s.G, s.w), s.B);
  EXPECT_EQ(max_coset_intersection(coset, s.B).count, s.B.size());
  Rng rng(50);
  for (int t = 0; t < 5; ++t) {
    auto A = random_subset(s.all, 50, rng);
    auto got = max_coset_intersection(A, s.B);
    EXPECT_EQ(got.count, brute_delta(A, s.B, s.all));
    ASSERT_TRUE(got.witness.has_value());
    EXPECT_FALSE(s.B.contains(*got.witness));
  }
}

TEST(VerifyGrowth, DisjointSetsGrow) {
  Sl2 s(7);
  auto outside = set_difference(s.all, s.B);
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    auto A = random_subset(outside, 1 + uniform_below(rng, s.B.size()), rng);
    auto r = verify_growth(A, s.B);
    const std::uint64_t m = std::max(r.size_ap, r.size_pa);
    EXPECT_GE(4 * m * m, r.size_a * r.size_p * r.q);
    EXPECT_TRUE(r.ok());
  }
}

TEST(VerifyGrowth, AEqualsP) {
  Sl2 s(7);
  auto r = verify_growth(s.B, s.B);
  EXPECT_EQ(r.size_ap, s.B.size());
  EXPECT_EQ(r.size_pa, s.B.size());
  EXPECT_TRUE(r.first_alternative);
  EXPECT_EQ(r.delta, 0u);
  EXPECT_TRUE(r.ok());
}

TEST(VerifyGrowth, TightnessFixture) {
  for (std::uint32_t p : {5u, 7u}) {
    Sl2 s(p);
    auto A = set_union(s.B, product_through_subgroup(s.B, s.B, product(single(s.G, s.w), s.B)));
    EXPECT_EQ(A.size(), s.B.size() * (1 + p));
    auto r = verify_growth(A, s.B);
    EXPECT_EQ(r.size_ap, A.size());
    EXPECT_EQ(r.size_pa, A.size());
    EXPECT_TRUE(r.ok());
  }
}

TEST(VerifyGrowth, RandomSetsSl3) {
  MatGroup G(3, 3);
  auto all = enumerate_group(G);
  Rng rng(99);
  for (ReflectionSet J : {ReflectionSet{}, ReflectionSet{1}, ReflectionSet{2}}) {
    auto P = subgroup(G, SubgroupSpec::parabolic(J));
    for (int t = 0; t < 5; ++t) {
      auto A = random_subset(all, 1 + uniform_below(rng, 200), rng);
      EXPECT_TRUE(verify_growth(A, P).ok());
    }
  }
}

TEST(VerifyGrowth, FlagsRecomputable) {
  Sl2 s(5);
  Rng rng(4);
  auto A = random_subset(s.all, 30, rng);
  auto r = verify_growth(A, s.B);
  auto again = recompute_growth_flags(r);
  EXPECT_EQ(again.first_alternative, r.first_alternative);
  EXPECT_EQ(again.second_alternative, r.second_alternative);
  EXPECT_EQ(again.max_bound, r.max_bound);
}

TEST(VerifyApa, Examples) {
  Sl2 s(7);
  auto id = single(s.G, s.G.identity());
  auto r = verify_apa(id, s.B);
  EXPECT_EQ(r.size_apa, s.B.size());
  EXPECT_TRUE(r.holds);
  Rng rng(12);
  for (int t = 0; t < 20; ++t)
    EXPECT_TRUE(verify_apa(random_subset(s.all, 1 + uniform_below(rng, 60), rng), s.B).holds);
  auto coset = product(single(s.G, s.all[77]), s.B);
  auto rc = verify_apa(coset, s.B);
  EXPECT_TRUE(rc.holds);
  EXPECT_GT(rc.sigma_a_inv, 0u);
}

TEST(VerifyApa, MatchesPlainTripleProduct) {
  Sl2 s(5);
  Rng rng(31);
  auto A = random_subset(s.all, 15, rng);
  EXPECT_EQ(product_through_subgroup(A, s.B, A), product(product(A, s.B), A));
}

TEST(VerifyPab, Examples) {
  Sl2 s5(5);
  auto r = verify_pab(single(s5.G, s5.w), s5.B, s5.B);
  EXPECT_EQ(r.size_pab, 100u);
  EXPECT_TRUE(r.holds);

  Sl2 s7(7);
  auto g = s7.G.make({2, 3, 1, 2});
  auto r7 = verify_pab(single(s7.G, g), s7.B, s7.B);
  EXPECT_GE(r7.size_pab, 7u * 42u);
  EXPECT_TRUE(r7.holds);

  EXPECT_THROW(verify_pab(s7.T, s7.B, s7.B), PreconditionError);
}

TEST(CheckRpgp, BorelSl2IsSharp) {
  Sl2 s5(5);
  auto r = check_r_pgp(s5.B, s5.w);
  EXPECT_EQ(r.max_r, 4u);
  EXPECT_TRUE(r.sharp);
  Sl2 s7(7);
  auto r7 = check_r_pgp_all(s7.B, s7.all);
  EXPECT_EQ(r7.max_r, 6u);
  EXPECT_EQ(r7.double_cosets, 1u);
  EXPECT_THROW(check_r_pgp(s7.B, s7.G.identity()), PreconditionError);
}

TEST(CheckRpgp, DoubleCosetReductionAgreesWithDirectScan) {
  MatGroup G(3, 2);
  auto all = enumerate_group(G);
  auto P = subgroup(G, SubgroupSpec::parabolic({1}));
  std::uint64_t direct = 0;
  for (const auto& g : all)
    if (!P.contains(g)) direct = std::max(direct, check_r_pgp(P, g).max_r);
  auto reduced = check_r_pgp_all(P, all);
  EXPECT_EQ(reduced.max_r, direct);
  EXPECT_TRUE(reduced.bound_holds);
}

TEST(CheckRpgp, Sl3F3Parabolic) {
  MatGroup G(3, 3);
  auto P = subgroup(G, SubgroupSpec::parabolic({1}));
  auto g = weyl_rep(G, WeylElem::reflection(3, 2));
  ASSERT_FALSE(P.contains(g));
  auto r = check_r_pgp(P, g);
  EXPECT_TRUE(r.bound_holds);
  EXPECT_LE(r.max_r * 3, 2 * P.size());
}

TEST(SubgroupIntersection, Examples) {
  Sl2 s(5);
  auto same = subgroup_intersection(s.B, s.B, s.all);
  EXPECT_EQ(same.max_xy, s.B.size());
  EXPECT_EQ(same.max_xx, s.B.size());
  auto Bw = conjugate(s.w, s.B);
  auto r = subgroup_intersection(s.B, Bw, s.all);
  EXPECT_EQ(r.size_cap, 4u);
  EXPECT_TRUE(r.lower_bound_holds);
  EXPECT_TRUE(r.maxima_equal);
  EXPECT_EQ(set_intersection(s.T, s.B), s.T);
}

TEST(SubgroupIntersection, AllPairsSl2F5) {
  Sl2 s(5);
  std::vector<ElemSet> subs{s.T, s.U, s.B, s.Bminus, s.all,
                            conjugate(s.G.make({1, 2, 3, 2}), s.B)};
  for (const auto& g1 : subs)
    for (const auto& g2 : subs) {
      auto r = subgroup_intersection(g1, g2, s.all);
      EXPECT_TRUE(r.maxima_equal);
      EXPECT_TRUE(r.lower_bound_holds);
    }
}

TEST(PowerIntersect, Examples) {
  Sl2 s(7);
  EXPECT_EQ(power_intersect(s.T, s.B, 5).first_n, 1);
  auto A = qr_fixture(s.G);
  auto r = power_intersect(A, s.Bminus, 10);
  ASSERT_TRUE(r.first_n.has_value());
  EXPECT_GE(*r.first_n, 3);
  EXPECT_EQ(*r.first_n, 3);  // frozen from iteration

  Sl2 s11(11);
  Rng rng(7);
  auto outside = set_difference(s11.all, s11.B);
  auto big_set = random_subset(outside, 200, rng);  // > |G|^{2/3} = 1320^{2/3}
  auto rb = power_intersect(big_set, s11.B, 6);
  ASSERT_TRUE(rb.first_n.has_value());
  EXPECT_LE(*rb.first_n, 6);
}

TEST(PowerIntersect, StabilizesOnSubgroup) {
  Sl2 s(7);
  auto r = power_intersect(s.U, s.Bminus, 10);
  EXPECT_EQ(r.first_n, 1);  // identity is in both
  auto outside_u = product(single(s.G, s.G.make({1, 0, 1, 1})), s.U);
  auto r2 = power_intersect(outside_u, s.U, 10);
  EXPECT_TRUE(r2.first_n.has_value() || r2.stabilized);
}

TEST(QuasirandomCheck, FullComplementSl2F5) {
  Sl2 s(5);
  auto X = set_difference(s.all, s.B);
  const std::uint64_t dmin = (5 - 1) / 2;
  // n = 1: q|X||P|^3 d^3 |G| = 5*100*8000*8*120, 4|G|^5 = 4*120^5.
  auto r1 = quasirandom_check(X, {s.all}, s.B, dmin);
  EXPECT_EQ(r1.lhs, BigInt(3'840'000'000ULL));
  EXPECT_EQ(r1.rhs, BigInt(99'532'800'000ULL));
  EXPECT_FALSE(r1.condition_holds);
  EXPECT_TRUE(r1.intersection_nonempty);
  // The ratio doubles with each extra factor G; n = 6 is the first success.
  for (int n = 1; n <= 6; ++n) {
    std::vector<ElemSet> ys(n, s.all);
    auto r = quasirandom_check(X, ys, s.B, dmin);
    EXPECT_EQ(r.condition_holds, n == 6) << n;
    EXPECT_TRUE(r.intersection_nonempty);
  }
}

TEST(QuasirandomCheck, RandomDrawsNeverViolate) {
  Sl2 s(5);
  auto outside = set_difference(s.all, s.B);
  Rng rng(2024);
  for (int t = 0; t < 200; ++t) {
    auto X = random_subset(outside, 1 + uniform_below(rng, outside.size()), rng);
    std::vector<ElemSet> ys;
    const int n = 1 + static_cast<int>(uniform_below(rng, 6));
    for (int j = 0; j < n; ++j)
      ys.push_back(random_subset(s.all, 1 + uniform_below(rng, s.all.size()), rng));
    EXPECT_TRUE(quasirandom_check(X, ys, s.B, 2).implication_ok());
  }
}

TEST(QuasirandomCheck, TinySetAndPrecondition) {
  Sl2 s(5);
  auto X = single(s.G, s.w);
  auto r = quasirandom_check(X, {X}, s.B, 2);
  EXPECT_FALSE(r.condition_holds);
  EXPECT_THROW(quasirandom_check(s.T, {s.all}, s.B, 2), PreconditionError);
}

TEST(Tripling, Examples) {
  Sl2 s(11);
  auto t = tripling(s.B);
  EXPECT_DOUBLE_EQ(t.ratio_aaa(), 1.0);
  auto one = tripling(single(s.G, s.G.make({1, 1, 0, 1})));
  EXPECT_DOUBLE_EQ(one.ratio_aaa(), 1.0);
  Rng rng(30);
  auto r = tripling(random_subset(s.all, 30, rng));
  EXPECT_GT(r.ratio_aaa(), 1.0);
  EXPECT_THROW(tripling(s.all, 1000), BudgetExceeded);
}

TEST(QrFixture, EmptyFirstAndSecondPowers) {
  for (std::uint32_t p : {7u, 11u}) {
    Sl2 s(p);
    auto A = qr_fixture(s.G);
    EXPECT_EQ(A.size(), ((p - 1) / 2) * ((p - 1) / 2));
    EXPECT_FALSE(intersects(A, s.Bminus));
    EXPECT_FALSE(intersects(product(A, A), s.Bminus));
  }
  EXPECT_THROW(qr_fixture(MatGroup(2, 5)), DomainError);
}

TEST(RandomElement, LandsInGroupAndCoversIt) {
  MatGroup G(2, 3);
  Rng rng(1);
  std::set<GroupElem> seen;
  for (int i = 0; i < 2000; ++i) {
    auto g = random_element(G, rng);
    ASSERT_EQ(G.det(g), 1u);
    seen.insert(g);
  }
  EXPECT_EQ(seen.size(), 24u);
}
