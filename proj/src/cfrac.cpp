#include "pgrowth/cfrac.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "pgrowth/matgrp.hpp"

namespace pgrowth {

namespace {

// Digit-string walk with 64-bit state. The pruning test b*q + q' > Q is
// evaluated without forming the product, so nothing overflows.
class Walker {
 public:
  Walker(const std::vector<std::uint32_t>& digits, std::uint64_t Q,
         const FractionVisitor* visit)
      : digits_(digits), Q_(Q), visit_(visit) {}

  void run_from(std::uint64_t pp, std::uint64_t pc, std::uint64_t qp, std::uint64_t qc) {
    for (std::uint32_t b : digits_) {
      if (b > (Q_ - qp) / qc) break;  // digits ascend, so every later b fails too
      const std::uint64_t nq = b * qc + qp;
      const std::uint64_t np = b * pc + pp;
      if (!path_.empty() && nq <= qc)
        throw std::logic_error("continuant denominators must increase");
      path_.push_back(b);
      if (b >= 2) {
        ++count_;
        if (visit_) (*visit_)(np, nq, path_);
      }
      run_from(pc, np, qc, nq);
      path_.pop_back();
    }
  }

  // Subtree under a fixed first digit b (b itself included).
  void run_first(std::uint32_t b) {
    if (b > Q_) return;
    path_.push_back(b);
    if (b >= 2) {
      ++count_;
      if (visit_) (*visit_)(1, b, path_);
    }
    run_from(0, 1, 1, b);
    path_.pop_back();
  }

  std::uint64_t count() const { return count_; }

 private:
  const std::vector<std::uint32_t>& digits_;
  std::uint64_t Q_;
  const FractionVisitor* visit_;
  std::vector<std::uint32_t> path_;
  std::uint64_t count_ = 0;
};

std::vector<std::uint32_t> sorted_digits(const Alphabet& alphabet) {
  if (alphabet.empty()) throw DomainError("alphabet must be nonempty");
  if (*alphabet.begin() == 0) throw DomainError("partial quotients are positive");
  return {alphabet.begin(), alphabet.end()};
}

bool digits_in_alphabet(std::uint64_t a, std::uint64_t q, const Alphabet& alphabet) {
  // a/q with 0 < a < q and gcd 1: Euclid's last quotient is already >= 2.
  std::uint64_t x = a, y = q;
  while (x != 0) {
    const std::uint64_t b = y / x;
    if (b > UINT32_MAX || !alphabet.count(static_cast<std::uint32_t>(b))) return false;
    y -= b * x;
    std::swap(x, y);
  }
  return true;
}

ZarembaResult make_result(std::uint64_t p, std::uint64_t q, std::uint64_t a,
                          std::vector<std::uint32_t> digits) {
  ZarembaResult r;
  r.p = p;
  r.q = q;
  r.a = a;
  r.digits = std::move(digits);
  r.multiple_index = q / p;
  r.exponent = std::log(static_cast<double>(q)) / std::log(static_cast<double>(p));
  return r;
}

std::optional<ZarembaResult> zaremba_dfs(std::uint64_t p, const Alphabet& alphabet,
                                         std::uint64_t limit) {
  const auto digits = sorted_digits(alphabet);
  std::uint64_t m = 1;
  while (true) {
    const std::uint64_t Q = m * p;
    std::uint64_t best_q = 0, best_a = 0;
    std::vector<std::uint32_t> best_digits;
    FractionVisitor visit = [&](std::uint64_t u, std::uint64_t v,
                                const std::vector<std::uint32_t>& d) {
      if (v % p != 0) return;
      if (best_q == 0 || v < best_q || (v == best_q && u < best_a)) {
        best_q = v;
        best_a = u;
        best_digits = d;
      }
    };
    Walker w(digits, Q, &visit);
    w.run_from(1, 0, 0, 1);
    if (best_q != 0) return make_result(p, best_q, best_a, std::move(best_digits));
    if (m == limit) return std::nullopt;
    m = std::min(limit, 2 * m);
  }
}

std::optional<ZarembaResult> zaremba_scan(std::uint64_t p, const Alphabet& alphabet,
                                          std::uint64_t limit) {
  sorted_digits(alphabet);
  for (std::uint64_t m = 1; m <= limit; ++m) {
    const std::uint64_t q = m * p;
    for (std::uint64_t a = 1; a < q; ++a) {
      if (std::gcd(a, q) != 1 || !digits_in_alphabet(a, q, alphabet)) continue;
      std::vector<std::uint32_t> d;
      for (const auto& b : expand(a, q).digits) d.push_back(static_cast<std::uint32_t>(b));
      return make_result(p, q, a, std::move(d));
    }
  }
  return std::nullopt;
}

bool parity_matches(std::size_t s, Parity parity) {
  switch (parity) {
    case Parity::Even: return s % 2 == 0;
    case Parity::Odd: return s % 2 == 1;
    case Parity::Both: return true;
  }
  return false;
}

// Continuant of `digits` reduced mod p as row-major (p' p | q' q).
std::vector<std::int64_t> continuant_mod(const std::vector<std::uint32_t>& digits,
                                         std::uint64_t p) {
  std::uint64_t m00 = 1, m01 = 0, m10 = 0, m11 = 1;
  for (std::uint32_t b : digits) {
    const std::uint64_t bb = b % p;
    std::uint64_t n01 = (m00 + bb * m01) % p, n11 = (m10 + bb * m11) % p;
    m00 = m01;
    m10 = m11;
    m01 = n01;
    m11 = n11;
  }
  return {static_cast<std::int64_t>(m00), static_cast<std::int64_t>(m01),
          static_cast<std::int64_t>(m10), static_cast<std::int64_t>(m11)};
}

std::vector<std::vector<std::int64_t>> raw_matrices(const Alphabet& alphabet,
                                                    std::uint64_t Q, std::uint32_t p,
                                                    Parity parity) {
  std::vector<std::vector<std::int64_t>> out;
  if (Q == 0) return out;
  enumerate_F(alphabet, Q,
              [&](std::uint64_t, std::uint64_t, const std::vector<std::uint32_t>& d) {
                if (parity_matches(d.size(), parity)) out.push_back(continuant_mod(d, p));
              });
  // 0/1 has s = 0 and the identity continuant.
  return out;
}

void require_sl2(const MatGroup& G, const char* what) {
  if (G.dim() != 2) throw PreconditionError(std::string(what) + " works in SL_2");
}

ElemSet standard_borel(const MatGroup& G) { return subgroup(G, SubgroupSpec::borel()); }

// One representative per left coset gB of the standard Borel of SL_2:
// the identity and (x -1 | 1 0) for x in F_p.
std::vector<GroupElem> borel_coset_reps(const MatGroup& G) {
  std::vector<GroupElem> reps{G.identity()};
  for (std::int64_t x = 0; x < G.modulus(); ++x) reps.push_back(G.make({x, -1, 1, 0}));
  return reps;
}

void require_standard_borel(const ElemSet& B) {
  const auto& G = B.group();
  require_sl2(G, "Borel coset arithmetic");
  const std::uint64_t p = G.modulus();
  if (B.size() != p * (p - 1) ||
      !std::all_of(B.begin(), B.end(), [&](const GroupElem& g) { return G.is_upper_triangular(g); }))
    throw PreconditionError("expected the standard Borel subgroup");
}

// |L B R| for coset representatives L (left) and R (right).
std::uint64_t double_product_size(const std::vector<GroupElem>& L, const ElemSet& B,
                                  const std::vector<GroupElem>& R) {
  const auto& G = B.group();
  const std::uint64_t p = G.modulus();
  std::vector<GroupElem> BR;
  BR.reserve(B.size() * R.size());
  for (const auto& s : R)
    for (const auto& b : B) BR.push_back(G.mul(b, s));
  const std::uint64_t cells = p * p * p * p;
  if (cells <= (std::uint64_t{1} << 34)) {
    // Dense bitmap over (a, b, c, d) with the 2x2 product written out.
    std::vector<std::uint64_t> seen((cells + 63) / 64, 0);
    std::vector<std::array<std::uint64_t, 4>> t(BR.size());
    for (std::size_t i = 0; i < BR.size(); ++i)
      t[i] = {BR[i].at(0, 0), BR[i].at(0, 1), BR[i].at(1, 0), BR[i].at(1, 1)};
    std::uint64_t count = 0;
    for (const auto& r : L) {
      const std::uint64_t r0 = r.at(0, 0), r1 = r.at(0, 1), r2 = r.at(1, 0), r3 = r.at(1, 1);
      for (const auto& m : t) {
        const std::uint64_t a = (r0 * m[0] + r1 * m[2]) % p, b = (r0 * m[1] + r1 * m[3]) % p;
        const std::uint64_t c = (r2 * m[0] + r3 * m[2]) % p, d = (r2 * m[1] + r3 * m[3]) % p;
        const std::uint64_t i = ((a * p + b) * p + c) * p + d;
        const std::uint64_t bit = std::uint64_t{1} << (i & 63);
        if (!(seen[i >> 6] & bit)) {
          seen[i >> 6] |= bit;
          ++count;
        }
      }
    }
    return count;
  }
  std::unordered_set<GroupElem, GroupElemHash> seen;
  for (const auto& r : L)
    for (const auto& t : BR) seen.insert(G.mul(r, t));
  return seen.size();
}

std::vector<GroupElem> coset_keys(const ElemSet& A, const CosetIndex& index, CosetSide side) {
  std::set<GroupElem> keys;
  for (const auto& a : A) keys.insert(index.key(a, side));
  return {keys.begin(), keys.end()};
}

}  // namespace

CFExpansion expand(const BigInt& a, const BigInt& q) {
  if (q < 1) throw DomainError("expand requires q >= 1");
  if (a < 0 || a > q) throw DomainError("expand requires 0 <= a <= q");
  if (boost::multiprecision::gcd(a, q) != 1) throw DomainError("expand requires gcd(a, q) = 1");
  if (a == q) throw DomainError("1/1 has no expansion with final digit >= 2");
  CFExpansion e;
  e.u = a;
  e.v = q;
  BigInt x = a, y = q;
  while (x != 0) {
    BigInt b = y / x;
    e.digits.push_back(b);
    y -= b * x;
    std::swap(x, y);
  }
  if (e.digits.size() > 1 && e.digits.back() == 1) {
    e.digits.pop_back();
    e.digits.back() += 1;
  }
  return e;
}

void Continuant::push(const BigInt& b) {
  if (b < 1) throw DomainError("partial quotients must be >= 1");
  BigInt n01 = m[0][0] + b * m[0][1];
  BigInt n11 = m[1][0] + b * m[1][1];
  m[0][0] = m[0][1];
  m[1][0] = m[1][1];
  m[0][1] = std::move(n01);
  m[1][1] = std::move(n11);
}

bool Continuant64::push(std::uint32_t b) {
  if (b < 1) throw DomainError("partial quotients must be >= 1");
  std::int64_t n01, n11, t01, t11;
  if (__builtin_mul_overflow(static_cast<std::int64_t>(b), m[0][1], &t01) ||
      __builtin_add_overflow(m[0][0], t01, &n01) ||
      __builtin_mul_overflow(static_cast<std::int64_t>(b), m[1][1], &t11) ||
      __builtin_add_overflow(m[1][0], t11, &n11))
    return false;
  m[0][0] = m[0][1];
  m[1][0] = m[1][1];
  m[0][1] = n01;
  m[1][1] = n11;
  return true;
}

Continuant continuant(const std::vector<BigInt>& digits) {
  Continuant c;
  for (const auto& b : digits) c.push(b);
  return c;
}

Continuant continuant(const std::vector<std::uint32_t>& digits) {
  return continuant(std::vector<BigInt>(digits.begin(), digits.end()));
}

Alphabet parse_alphabet(const std::string& text) {
  Alphabet out;
  std::stringstream ss(text);
  std::string part;
  auto to_digit = [&](const std::string& s) -> std::uint32_t {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(s, &used);
    } catch (const std::exception&) {
      throw DomainError("bad alphabet: " + text);
    }
    if (used != s.size() || v == 0 || v > UINT32_MAX) throw DomainError("bad alphabet: " + text);
    return static_cast<std::uint32_t>(v);
  };
  while (std::getline(ss, part, ',')) {
    auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.insert(to_digit(part));
      continue;
    }
    auto lo = to_digit(part.substr(0, dots)), hi = to_digit(part.substr(dots + 2));
    if (lo > hi) throw DomainError("bad alphabet: " + text);
    for (auto d = lo; d <= hi; ++d) out.insert(d);
  }
  if (out.empty()) throw DomainError("alphabet must be nonempty");
  return out;
}

std::string alphabet_to_string(const Alphabet& alphabet) {
  std::string s;
  for (auto d : alphabet) s += (s.empty() ? "" : ",") + std::to_string(d);
  return s;
}

void enumerate_F(const Alphabet& alphabet, std::uint64_t Q, const FractionVisitor& visit) {
  const auto digits = sorted_digits(alphabet);
  if (Q < 1) return;
  visit(0, 1, {});
  Walker w(digits, Q, &visit);
  w.run_from(1, 0, 0, 1);
}

std::vector<Fraction> list_F(const Alphabet& alphabet, std::uint64_t Q) {
  std::vector<Fraction> out;
  enumerate_F(alphabet, Q,
              [&](std::uint64_t u, std::uint64_t v, const std::vector<std::uint32_t>& d) {
                out.push_back({u, v, d});
              });
  return out;
}

std::uint64_t count_F(const Alphabet& alphabet, std::uint64_t Q, unsigned jobs) {
  const auto digits = sorted_digits(alphabet);
  if (Q < 1) return 0;
  std::vector<std::uint64_t> counts(digits.size(), 0);
  auto work = [&](std::size_t i) {
    Walker w(digits, Q, nullptr);
    w.run_first(digits[i]);
    counts[i] = w.count();
  };
  if (jobs <= 1 || digits.size() == 1) {
    for (std::size_t i = 0; i < digits.size(); ++i) work(i);
  } else {
    std::size_t next = 0;
    while (next < digits.size()) {
      std::vector<std::thread> threads;
      for (unsigned t = 0; t < jobs && next < digits.size(); ++t) threads.emplace_back(work, next++);
      for (auto& th : threads) th.join();
    }
  }
  return 1 + std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

DimensionEstimate dimension_estimate(const Alphabet& alphabet,
                                     const std::vector<std::uint64_t>& Q_list,
                                     unsigned jobs) {
  if (Q_list.size() < 2) throw DomainError("dimension_estimate needs at least two Q values");
  for (std::size_t i = 0; i < Q_list.size(); ++i)
    if (Q_list[i] < 1 || (i && Q_list[i] <= Q_list[i - 1]))
      throw DomainError("Q values must be positive and strictly increasing");
  DimensionEstimate est;
  std::vector<double> xs, ys;
  for (auto Q : Q_list) {
    auto c = count_F(alphabet, Q, jobs);
    est.table.emplace_back(Q, c);
    xs.push_back(std::log(static_cast<double>(Q)));
    ys.push_back(std::log(static_cast<double>(c)));
  }
  if (std::all_of(est.table.begin(), est.table.end(),
                  [&](const auto& row) { return row.second == est.table.front().second; }))
    throw DomainError("counts are constant over the Q range");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  est.slope = sxy / sxx;
  return est;
}

std::optional<ZarembaResult> zaremba_search(std::uint64_t p, const Alphabet& alphabet,
                                            std::uint64_t multiple_limit,
                                            ZarembaStrategy strategy) {
  if (!is_prime(p)) throw DomainError("zaremba_search needs a prime p");
  if (multiple_limit < 1) throw DomainError("multiple_limit must be >= 1");
  if (multiple_limit > UINT64_MAX / p) throw DomainError("multiple_limit * p overflows");
  return strategy == ZarembaStrategy::Dfs ? zaremba_dfs(p, alphabet, multiple_limit)
                                          : zaremba_scan(p, alphabet, multiple_limit);
}

bool zaremba_result_valid(const ZarembaResult& r, const Alphabet& alphabet) {
  if (r.p == 0 || r.q % r.p != 0) return false;
  if (boost::multiprecision::gcd(r.a, r.q) != 1) return false;
  if (BigInt(r.multiple_index) * r.p != r.q) return false;
  const auto e = expand(r.a, r.q);
  if (e.digits.size() != r.digits.size()) return false;
  for (std::size_t i = 0; i < e.digits.size(); ++i) {
    if (e.digits[i] != r.digits[i]) return false;
    if (!alphabet.count(r.digits[i])) return false;
  }
  const auto c = continuant(r.digits);
  return c.numerator() == r.a && c.denominator() == r.q;
}

Parity parse_parity(const std::string& text) {
  if (text == "even") return Parity::Even;
  if (text == "odd") return Parity::Odd;
  if (text == "both") return Parity::Both;
  throw DomainError("parity must be even, odd or both");
}

ElemSet matrix_set_mod_p(const Alphabet& alphabet, std::uint64_t Q, std::uint32_t p,
                         Parity parity) {
  if (parity != Parity::Even)
    throw DomainError("odd continuants have det -1 and do not lie in SL_2");
  MatGroup G(2, p);
  std::vector<GroupElem> elems;
  for (const auto& m : raw_matrices(alphabet, Q, p, parity)) elems.push_back(G.make(m));
  return ElemSet(G, std::move(elems));
}

std::vector<GroupElem> matrix_set_mod_p_gl(const Alphabet& alphabet, std::uint64_t Q,
                                           std::uint32_t p, Parity parity) {
  MatGroup G(2, p);
  std::vector<GroupElem> elems;
  for (const auto& m : raw_matrices(alphabet, Q, p, parity)) elems.push_back(G.make_unchecked(m));
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  return elems;
}

bool matrix_set_injective(const Alphabet& alphabet, std::uint64_t Q, std::uint32_t p,
                          Parity parity) {
  return raw_matrices(alphabet, Q, p, parity).size() ==
         matrix_set_mod_p_gl(alphabet, Q, p, parity).size();
}

std::uint64_t integer_root(std::uint64_t x, unsigned k) {
  if (k == 0) throw DomainError("integer_root needs k >= 1");
  if (k == 1 || x < 2) return x;
  auto pow_le = [&](std::uint64_t r) {  // r^k <= x without overflow
    unsigned __int128 acc = 1;
    for (unsigned i = 0; i < k; ++i) {
      acc *= r;
      if (acc > x) return false;
    }
    return true;
  };
  auto r = static_cast<std::uint64_t>(std::pow(static_cast<double>(x), 1.0 / k));
  while (r > 0 && !pow_le(r)) --r;
  while (pow_le(r + 1)) ++r;
  return r;
}

ElemSet lambda_set(std::uint32_t p, const Alphabet& alphabet, unsigned k) {
  if (k < 2) throw DomainError("lambda_set needs k >= 2");
  return matrix_set_mod_p(alphabet, integer_root(p - 1, k), p, Parity::Even);
}

LambdaSquareReport lambda_square_in_a(const ElemSet& lambda, const ElemSet& A) {
  require_same_group(lambda, A);
  const auto sq = product(lambda, lambda);
  LambdaSquareReport r;
  r.size_lambda_sq = sq.size();
  for (const auto& g : sq) r.outside_a += !A.contains(g);
  return r;
}

SigmaReport verify_sigma_bounds(const ElemSet& A, std::uint64_t M) {
  const auto& G = A.group();
  require_sl2(G, "verify_sigma_bounds");
  const auto B = standard_borel(G);
  SigmaReport r;
  r.p = G.modulus();
  r.M = M;
  r.size_a = A.size();
  if (A.empty()) {
    r.sigma_bound = r.sigma_inv_bound = r.sigma_inv_bound_m = r.coset_bound = true;
    return r;
  }
  const auto Ainv = A.inverse();
  r.sigma_a_ainv = sigma(B, A, Ainv);
  r.sigma_ainv_a = sigma(B, Ainv, A);
  r.max_left = max_coset_intersection(A, B, CosetSide::Left, true).count;
  r.max_right = max_coset_intersection(A, B, CosetSide::Right, true).count;

  // gBh = (g B g^{-1}) gh, and the conjugates of B are c B c^{-1} for c over
  // left coset representatives; |A cap cBc^{-1} y| counts right B-cosets of c^{-1}A.
  CosetIndex index(B);
  for (const auto& c : borel_coset_reps(G)) {
    const auto cinv = G.inv(c);
    std::map<GroupElem, std::uint64_t> counts;
    for (const auto& a : A) ++counts[index.key(G.mul(cinv, a), CosetSide::Right)];
    for (const auto& [k, v] : counts) r.max_double = std::max(r.max_double, v);
  }

  const BigInt p = r.p, a = r.size_a, m = M;
  r.sigma_bound = BigInt(r.sigma_a_ainv) <= p * a;
  r.sigma_inv_bound = BigInt(r.sigma_ainv_a) <= m * m * p * a;
  r.sigma_inv_bound_m = BigInt(r.sigma_ainv_a) <= m * p * a;
  r.coset_bound = BigInt(std::max(r.max_left, r.max_right)) <= m * p;
  return r;
}

LambdaEnergyReport lambda_energy_check(const ElemSet& lambda, const ElemSet& X,
                                       std::uint64_t M) {
  require_same_group(lambda, X);
  const auto& G = lambda.group();
  require_sl2(G, "lambda_energy_check");
  if (!std::all_of(X.begin(), X.end(), [&](const GroupElem& g) { return G.is_upper_triangular(g); }))
    throw PreconditionError("X must lie in the standard Borel");
  const auto B = standard_borel(G);
  LambdaEnergyReport r;
  r.size_lambda = lambda.size();
  r.size_x = X.size();
  r.M = M;
  r.size_b = B.size();
  r.energy = energy(lambda, X);
  r.energy_inv = energy(lambda.inverse(), X);
  r.size_b_lambda = product(B, lambda).size();
  r.size_lambda_b = product(lambda, B).size();
  const BigInt lx = BigInt(r.size_lambda) * r.size_x;
  const BigInt m4 = pow(BigInt(M), 4);
  r.energy_equal = BigInt(r.energy) == lx;
  r.energy_inv_bound = BigInt(r.energy_inv) <= m4 * lx;
  r.b_lambda_exact = BigInt(r.size_b_lambda) == BigInt(r.size_b) * r.size_lambda;
  r.lambda_b_bound = BigInt(r.size_lambda_b) * m4 >= BigInt(r.size_b) * r.size_lambda;
  return r;
}

AbaReport aba_size(const ElemSet& A, const ElemSet& B, std::uint64_t budget) {
  require_same_group(A, B);
  require_standard_borel(B);
  const auto& G = A.group();
  CosetIndex index(B);
  const auto Ainv = A.inverse();
  const auto L = coset_keys(A, index, CosetSide::Left);
  const auto R = coset_keys(A, index, CosetSide::Right);
  const auto Li = coset_keys(Ainv, index, CosetSide::Left);
  const auto Ri = coset_keys(Ainv, index, CosetSide::Right);
  const BigInt cost = BigInt(L.size()) * B.size() * R.size() + BigInt(Li.size()) * B.size() * Ri.size();
  if (cost > budget) throw BudgetExceeded("aba_size exceeds budget");
  AbaReport r;
  r.size_aba = A.empty() ? 0 : double_product_size(L, B, R);
  r.size_ainv_b_ainv = A.empty() ? 0 : double_product_size(Li, B, Ri);
  const double p3 = std::pow(static_cast<double>(G.modulus()), 3);
  r.ratio = static_cast<double>(r.size_aba) / p3;
  r.ratio_inv = static_cast<double>(r.size_ainv_b_ainv) / p3;
  return r;
}

}  // namespace pgrowth
