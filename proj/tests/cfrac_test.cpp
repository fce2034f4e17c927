#include "pgrowth/cfrac.hpp"

#include <gtest/gtest.h>

#include <numeric>

#include "pgrowth/matgrp.hpp"

using namespace pgrowth;

namespace {

// Oracle: plain Euclid digits of u/v, 0 < u < v.
std::vector<std::uint64_t> euclid(std::uint64_t u, std::uint64_t v) {
  std::vector<std::uint64_t> d;
  while (u) {
    d.push_back(v / u);
    std::uint64_t r = v % u;
    v = u;
    u = r;
  }
  return d;
}

// Oracle: F_A(Q) by filtering every reduced fraction in [0, 1).
std::set<std::pair<std::uint64_t, std::uint64_t>> brute_F(const Alphabet& A, std::uint64_t Q) {
  std::set<std::pair<std::uint64_t, std::uint64_t>> out{{0, 1}};
  for (std::uint64_t v = 2; v <= Q; ++v)
    for (std::uint64_t u = 1; u < v; ++u) {
      if (std::gcd(u, v) != 1) continue;
      auto d = euclid(u, v);
      if (std::all_of(d.begin(), d.end(), [&](std::uint64_t b) { return A.count(b) > 0; }))
        out.insert({u, v});
    }
  return out;
}

std::vector<BigInt> big_digits(std::initializer_list<int> ds) {
  return {ds.begin(), ds.end()};
}

// Oracle for the a-scan: first a/q with q = p, 2p, ... whose Euclid digits lie in A.
std::optional<std::pair<std::uint64_t, std::uint64_t>> scan_oracle(std::uint64_t p,
                                                                   const Alphabet& A,
                                                                   std::uint64_t limit) {
  for (std::uint64_t q = p; q <= limit * p; q += p)
    for (std::uint64_t a = 1; a < q; ++a) {
      if (std::gcd(a, q) != 1) continue;
      auto d = euclid(a, q);
      if (std::all_of(d.begin(), d.end(), [&](std::uint64_t b) { return A.count(b) > 0; }))
        return std::make_pair(a, q);
    }
  return std::nullopt;
}

}  // namespace

TEST(Expand, Examples) {
  EXPECT_EQ(expand(2, 7).digits, big_digits({3, 2}));
  EXPECT_EQ(expand(5, 7).digits, big_digits({1, 2, 2}));
  EXPECT_EQ(expand(1, 2).digits, big_digits({2}));
  EXPECT_TRUE(expand(0, 1).digits.empty());
}

TEST(Expand, Errors) {
  EXPECT_THROW(expand(2, 4), DomainError);
  EXPECT_THROW(expand(8, 7), DomainError);
  EXPECT_THROW(expand(-1, 7), DomainError);
  EXPECT_THROW(expand(0, 0), DomainError);
  EXPECT_THROW(expand(1, 1), DomainError);
  EXPECT_THROW(expand(0, 3), DomainError);
}

TEST(Expand, BigValues) {
  BigInt q = BigInt(1) << 200;
  BigInt a = q / 3;  // odd, so coprime to q
  auto e = expand(a, q);
  auto c = continuant(e.digits);
  EXPECT_EQ(c.numerator(), a);
  EXPECT_EQ(c.denominator(), q);
}

TEST(Continuant, Examples) {
  auto c = continuant(big_digits({2}));
  EXPECT_EQ(c.m[0][0], 0);
  EXPECT_EQ(c.m[0][1], 1);
  EXPECT_EQ(c.m[1][0], 1);
  EXPECT_EQ(c.m[1][1], 2);
  auto c12 = continuant(big_digits({1, 2}));
  EXPECT_EQ(c12.m[0][0], 1);
  EXPECT_EQ(c12.m[0][1], 2);
  EXPECT_EQ(c12.m[1][0], 1);
  EXPECT_EQ(c12.m[1][1], 3);
  EXPECT_EQ(c12.det(), 1);
  auto c32 = continuant(big_digits({3, 2}));
  EXPECT_EQ(c32.numerator(), 2);
  EXPECT_EQ(c32.denominator(), 7);
  EXPECT_THROW(continuant(big_digits({1, 0})), DomainError);
}

TEST(Continuant, RoundTrip) {
  for (int q = 2; q <= 500; ++q)
    for (int a = 1; a < q; ++a) {
      if (std::gcd(a, q) != 1) continue;
      auto c = continuant(expand(a, q).digits);
      ASSERT_EQ(c.numerator(), a);
      ASSERT_EQ(c.denominator(), q);
    }
}

TEST(Continuant, DeterminantSign) {
  // All digit strings of length <= 12 over {1..5}, walked incrementally.
  std::uint64_t checked = 0;
  std::vector<Continuant64> stack{Continuant64{}};
  std::vector<int> depth{0};
  while (!stack.empty()) {
    auto c = stack.back();
    int d = depth.back();
    stack.pop_back();
    depth.pop_back();
    ASSERT_EQ(c.det(), d % 2 == 0 ? 1 : -1);
    ++checked;
    if (d == 12) continue;
    for (std::uint32_t b = 1; b <= 5; ++b) {
      auto next = c;
      ASSERT_TRUE(next.push(b));
      stack.push_back(next);
      depth.push_back(d + 1);
    }
  }
  EXPECT_EQ(checked, (std::uint64_t{244140625} * 5 - 1) / 4);  // sum 5^k, k <= 12
}

TEST(Continuant, FixedWidthMatchesBigInt) {
  Rng rng(4);
  for (int t = 0; t < 2000; ++t) {
    std::vector<std::uint32_t> d(1 + uniform_below(rng, 10));
    for (auto& b : d) b = 1 + static_cast<std::uint32_t>(uniform_below(rng, 50));
    Continuant64 c64;
    for (auto b : d) ASSERT_TRUE(c64.push(b));
    auto c = continuant(d);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) ASSERT_EQ(BigInt(c64.m[i][j]), c.m[i][j]);
  }
  Continuant64 big;
  int pushed = 0;
  while (big.push(1000000)) ++pushed;
  EXPECT_EQ(pushed, 3);  // (10^6)^4 > 2^63
}

TEST(Alphabet, Parse) {
  EXPECT_EQ(parse_alphabet("1..5"), (Alphabet{1, 2, 3, 4, 5}));
  EXPECT_EQ(parse_alphabet("1,2,7"), (Alphabet{1, 2, 7}));
  EXPECT_EQ(parse_alphabet("1..2,9"), (Alphabet{1, 2, 9}));
  EXPECT_EQ(alphabet_to_string({1, 2, 9}), "1,2,9");
  EXPECT_THROW(parse_alphabet("0..3"), DomainError);
  EXPECT_THROW(parse_alphabet("a"), DomainError);
  EXPECT_THROW(parse_alphabet("5..1"), DomainError);
  EXPECT_THROW(parse_alphabet(""), DomainError);
}

TEST(EnumerateF, MatchesBruteForce) {
  for (const auto& A : {Alphabet{1, 2}, Alphabet{1, 2, 3, 4, 5}, Alphabet{2, 3}, Alphabet{1, 4}}) {
    std::set<std::pair<std::uint64_t, std::uint64_t>> got;
    std::size_t visits = 0;
    enumerate_F(A, 100, [&](std::uint64_t u, std::uint64_t v, const std::vector<std::uint32_t>&) {
      got.insert({u, v});
      ++visits;
    });
    EXPECT_EQ(visits, got.size()) << "duplicates";
    EXPECT_EQ(got, brute_F(A, 100)) << alphabet_to_string(A);
  }
}

TEST(EnumerateF, Examples) {
  auto two = list_F({2}, 2);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].v, 1u);
  EXPECT_EQ(two[1].u, 1u);
  EXPECT_EQ(two[1].v, 2u);
  std::set<std::pair<std::uint64_t, std::uint64_t>> got;
  for (const auto& f : list_F({1, 2}, 3)) got.insert({f.u, f.v});
  EXPECT_EQ(got, (std::set<std::pair<std::uint64_t, std::uint64_t>>{{0, 1}, {1, 2}, {2, 3}}));
  EXPECT_EQ(list_F({1}, 1000).size(), 1u);
  EXPECT_TRUE(list_F({1, 2}, 0).empty());
}

TEST(EnumerateF, DigitsAreCanonicalAndDenominatorsIncrease) {
  for (const auto& f : list_F({1, 2, 3}, 400)) {
    if (f.digits.empty()) continue;
    EXPECT_GE(f.digits.back(), 2u);
    Continuant64 c;
    std::int64_t prev_q = 1;
    for (std::size_t i = 0; i < f.digits.size(); ++i) {
      ASSERT_TRUE(c.push(f.digits[i]));
      if (i > 0) EXPECT_GT(c.m[1][1], prev_q);
      prev_q = c.m[1][1];
    }
    EXPECT_EQ(static_cast<std::uint64_t>(c.m[0][1]), f.u);
    EXPECT_EQ(static_cast<std::uint64_t>(c.m[1][1]), f.v);
  }
}

TEST(CountF, Examples) {
  EXPECT_EQ(count_F({1, 2}, 1000), list_F({1, 2}, 1000).size());
  EXPECT_EQ(count_F({2}, 2), 2u);
  EXPECT_EQ(count_F({1, 2, 3}, 5000, 1), count_F({1, 2, 3}, 5000, 3));
  std::uint64_t prev = 0;
  for (std::uint64_t Q : {1, 10, 50, 100, 500, 1000}) {
    auto c = count_F({1, 2}, Q);
    EXPECT_GE(c, prev);
    EXPECT_LE(c, count_F({1, 2, 3}, Q));
    prev = c;
  }
}

TEST(Dimension, SlopeForOneTwo) {
  auto est = dimension_estimate({1, 2}, {100, 1000, 10000, 100000});
  ASSERT_EQ(est.table.size(), 4u);
  EXPECT_GE(est.slope, 1.0126);
  EXPECT_LE(est.slope, 1.1126);
}

TEST(Dimension, SlopeIncreasesWithAlphabet) {
  const std::vector<std::uint64_t> Qs{100, 1000, 10000};
  auto s2 = dimension_estimate({1, 2}, Qs).slope;
  auto s3 = dimension_estimate({1, 2, 3}, Qs).slope;
  auto s4 = dimension_estimate({1, 2, 3, 4}, Qs).slope;
  EXPECT_LT(s2, s3);
  EXPECT_LT(s3, s4);
  EXPECT_LT(s4, 2.0);
}

TEST(Dimension, Errors) {
  EXPECT_THROW(dimension_estimate({1, 2}, {100}), DomainError);
  EXPECT_THROW(dimension_estimate({1, 2}, {100, 50}), DomainError);
  EXPECT_THROW(dimension_estimate({1}, {10, 100}), DomainError);
}

TEST(Zaremba, Examples) {
  auto r = zaremba_search(7, {1, 2, 3, 4, 5}, 10);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->a, 2);
  EXPECT_EQ(r->q, 7);
  EXPECT_EQ(r->digits, (std::vector<std::uint32_t>{3, 2}));
  auto r2 = zaremba_search(7, {1, 2}, 10);
  ASSERT_TRUE(r2);
  EXPECT_EQ(r2->a, 5);
  EXPECT_EQ(r2->q, 7);
  EXPECT_EQ(r2->digits, (std::vector<std::uint32_t>{1, 2, 2}));
  auto r3 = zaremba_search(2, {2}, 1);
  ASSERT_TRUE(r3);
  EXPECT_EQ(r3->a, 1);
  EXPECT_EQ(r3->q, 2);
  EXPECT_DOUBLE_EQ(r3->exponent, 1.0);
  EXPECT_FALSE(zaremba_search(7, {1}, 5));  // no admissible final digit
  EXPECT_THROW(zaremba_search(8, {1, 2}, 5), DomainError);
  EXPECT_THROW(zaremba_search(7, {1, 2}, 0), DomainError);
}

TEST(Zaremba, StrategiesAgreeWithOracle) {
  for (const auto& A : {Alphabet{1, 2}, Alphabet{1, 2, 3}, Alphabet{2, 3}, Alphabet{1, 3}}) {
    for (std::uint64_t p = 2; p < 200; ++p) {
      if (!is_prime(p)) continue;
      auto dfs = zaremba_search(p, A, 12, ZarembaStrategy::Dfs);
      auto scan = zaremba_search(p, A, 12, ZarembaStrategy::AScan);
      auto oracle = scan_oracle(p, A, 12);
      ASSERT_EQ(dfs.has_value(), oracle.has_value()) << p;
      ASSERT_EQ(scan.has_value(), oracle.has_value()) << p;
      if (!oracle) continue;
      EXPECT_EQ(dfs->a, oracle->first) << p;
      EXPECT_EQ(dfs->q, oracle->second) << p;
      EXPECT_EQ(scan->a, dfs->a);
      EXPECT_EQ(scan->q, dfs->q);
      EXPECT_EQ(scan->digits, dfs->digits);
      EXPECT_TRUE(zaremba_result_valid(*dfs, A));
    }
  }
}

TEST(Zaremba, ValidatorRejectsTampering) {
  auto r = *zaremba_search(11, {1, 2, 3}, 5);
  ASSERT_TRUE(zaremba_result_valid(r, {1, 2, 3}));
  EXPECT_FALSE(zaremba_result_valid(r, {1, 2}));
  auto bad = r;
  bad.q += 1;
  EXPECT_FALSE(zaremba_result_valid(bad, {1, 2, 3}));
  bad = r;
  bad.digits.back() += 1;
  EXPECT_FALSE(zaremba_result_valid(bad, {1, 2, 3, 4}));
}

TEST(MatrixSet, EvenParityLandsInSl2) {
  auto fracs = list_F({1, 2, 3, 4, 5}, 100);
  std::size_t even = 0;
  for (const auto& f : fracs) even += f.digits.size() % 2 == 0;
  auto A = matrix_set_mod_p({1, 2, 3, 4, 5}, 100, 101);
  EXPECT_EQ(A.size(), even);
  for (const auto& g : A) EXPECT_EQ(A.group().det(g), 1u);
  EXPECT_TRUE(A.contains(A.group().identity()));
  EXPECT_TRUE(matrix_set_injective({1, 2, 3, 4, 5}, 100, 101));
  EXPECT_TRUE(matrix_set_injective({1, 2, 3}, 210, 211, Parity::Both));
}

TEST(MatrixSet, ParityAndEdgeCases) {
  EXPECT_TRUE(matrix_set_mod_p({1, 2}, 0, 11).empty());
  EXPECT_THROW(matrix_set_mod_p({1, 2}, 10, 11, Parity::Odd), DomainError);
  MatGroup G(2, 11);
  for (const auto& g : matrix_set_mod_p_gl({1, 2, 3}, 10, 11, Parity::Odd))
    EXPECT_EQ(G.det(g), 10u);
  EXPECT_EQ(parse_parity("both"), Parity::Both);
  EXPECT_THROW(parse_parity("odd-ish"), DomainError);
}

TEST(IntegerRoot, Exact) {
  EXPECT_EQ(integer_root(100, 2), 10u);
  EXPECT_EQ(integer_root(99, 2), 9u);
  EXPECT_EQ(integer_root(210, 2), 14u);
  EXPECT_EQ(integer_root(1000, 3), 10u);
  EXPECT_EQ(integer_root(999, 3), 9u);
  EXPECT_EQ(integer_root(UINT64_MAX, 2), 4294967295u);
  for (std::uint64_t x = 0; x < 3000; ++x) {
    auto r = integer_root(x, 3);
    EXPECT_LE(r * r * r, x);
    EXPECT_GT((r + 1) * (r + 1) * (r + 1), x);
  }
}

TEST(LambdaSet, Construction) {
  const Alphabet A5{1, 2, 3, 4, 5};
  auto L = lambda_set(101, A5, 2);
  for (const auto& g : L)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) EXPECT_LE(g.at(i, j), 10u);
  auto A = matrix_set_mod_p(A5, 100, 101);
  EXPECT_TRUE(is_subset(L, A));
  auto sq = lambda_square_in_a(L, A);
  EXPECT_GT(sq.size_lambda_sq, 0u);
  EXPECT_THROW(lambda_set(101, A5, 1), DomainError);
}

TEST(LambdaEnergy, Examples) {
  const Alphabet A5{1, 2, 3, 4, 5};
  auto L = lambda_set(101, A5, 2);
  const auto& G = L.group();
  for (const auto& X : {subgroup(G, SubgroupSpec::torus()), subgroup(G, SubgroupSpec::borel())}) {
    auto r = lambda_energy_check(L, X, 5);
    EXPECT_TRUE(r.energy_equal);
    EXPECT_TRUE(r.ok());
  }
  ElemSet one(G, {G.identity()});
  auto T = subgroup(G, SubgroupSpec::torus());
  EXPECT_EQ(lambda_energy_check(one, T, 5).energy, T.size());
  EXPECT_THROW(lambda_energy_check(L, L, 5), PreconditionError);
}

TEST(SigmaBounds, Examples) {
  auto r101 = verify_sigma_bounds(matrix_set_mod_p({1, 2, 3, 4, 5}, 100, 101), 5);
  EXPECT_TRUE(r101.ok());
  EXPECT_LE(r101.max_left, r101.max_double);
  auto r211 = verify_sigma_bounds(matrix_set_mod_p({1, 2, 3}, 210, 211), 3);
  EXPECT_TRUE(r211.ok());
  auto empty = verify_sigma_bounds(ElemSet(MatGroup(2, 11)), 3);
  EXPECT_EQ(empty.sigma_a_ainv, 0u);
  EXPECT_EQ(empty.max_left, 0u);
  EXPECT_EQ(empty.max_double, 0u);
}

TEST(SigmaBounds, CosetMaximaMatchDirectScan) {
  auto A = matrix_set_mod_p({1, 2, 3}, 40, 41);
  const auto& G = A.group();
  auto B = subgroup(G, SubgroupSpec::borel());
  auto all = enumerate_group(G);
  std::uint64_t left = 0, right = 0;
  for (const auto& g : all) {
    std::uint64_t l = 0, r = 0;
    for (const auto& a : A) {
      l += B.contains(G.mul(G.inv(g), a));
      r += B.contains(G.mul(a, G.inv(g)));
    }
    left = std::max(left, l);
    right = std::max(right, r);
  }
  auto rep = verify_sigma_bounds(A, 3);
  EXPECT_EQ(rep.max_left, left);
  EXPECT_EQ(rep.max_right, right);
}

TEST(AbaSize, MatchesProductAndBounds) {
  MatGroup G(2, 31);
  auto B = subgroup(G, SubgroupSpec::borel());
  ElemSet one(G, {G.identity()});
  auto r1 = aba_size(one, B);
  EXPECT_EQ(r1.size_aba, B.size());
  EXPECT_DOUBLE_EQ(r1.ratio, 930.0 / (31.0 * 31 * 31));

  auto A = matrix_set_mod_p({1, 2, 3}, 30, 31);
  auto r = aba_size(A, B);
  EXPECT_EQ(r.size_aba, product(product(A, B), A).size());
  auto Ai = A.inverse();
  EXPECT_EQ(r.size_ainv_b_ainv, product(product(Ai, B), Ai).size());
  EXPECT_THROW(aba_size(A, B, 1000), BudgetExceeded);
}

TEST(AbaSize, RatioBelowGroupOrderBound) {
  // |ABA| <= |G| = p^3 - p.
  auto A = matrix_set_mod_p({1, 2, 3, 4, 5}, 52, 53);
  auto B = subgroup(A.group(), SubgroupSpec::borel());
  auto r = aba_size(A, B);
  EXPECT_GT(r.ratio, 0.0);
  EXPECT_LE(r.size_aba, 53u * 53 * 53 - 53);
  EXPECT_LE(r.size_ainv_b_ainv, 53u * 53 * 53 - 53);
}
