#include "pgrowth/matgrp.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace pgrowth {

WeylElem::WeylElem(std::vector<int> perm) : perm_(std::move(perm)) {
  std::vector<bool> seen(perm_.size(), false);
  for (int v : perm_) {
    if (v < 0 || v >= static_cast<int>(perm_.size()) || seen[v])
      throw DomainError("not a permutation");
    seen[v] = true;
  }
}

WeylElem WeylElem::identity(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  return WeylElem(std::move(p));
}

WeylElem WeylElem::reflection(int n, int r) {
  if (r < 1 || r >= n) throw DomainError("reflection index out of range");
  auto w = identity(n);
  std::swap(w.perm_[r - 1], w.perm_[r]);
  return w;
}

WeylElem WeylElem::longest(int n) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = n - 1 - i;
  return WeylElem(std::move(p));
}

std::vector<WeylElem> WeylElem::all(int n) {
  std::vector<WeylElem> out;
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  do {
    out.emplace_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

int WeylElem::length() const {
  int inv = 0;
  for (std::size_t i = 0; i < perm_.size(); ++i)
    for (std::size_t j = i + 1; j < perm_.size(); ++j)
      if (perm_[i] > perm_[j]) ++inv;
  return inv;
}

WeylElem WeylElem::inverse() const {
  std::vector<int> q(perm_.size());
  for (std::size_t i = 0; i < perm_.size(); ++i) q[perm_[i]] = static_cast<int>(i);
  return WeylElem(std::move(q));
}

WeylElem WeylElem::operator*(const WeylElem& other) const {
  if (degree() != other.degree()) throw DomainError("degree mismatch");
  std::vector<int> r(perm_.size());
  for (std::size_t j = 0; j < perm_.size(); ++j) r[j] = perm_[other.perm_[j]];
  return WeylElem(std::move(r));
}

std::string WeylElem::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < perm_.size(); ++i)
    os << (i ? "," : "") << perm_[i] + 1;
  os << ']';
  return os.str();
}

GroupElem weyl_rep(const MatGroup& G, const WeylElem& w) {
  const int n = G.dim();
  if (w.degree() != n) throw DomainError("Weyl element degree mismatch");
  GroupElem g;
  g.n = static_cast<std::uint8_t>(n);
  for (int j = 0; j < n; ++j) g.set(w(j), j, 1);
  if (w.length() % 2 == 1) {
    // Row r holds its 1 in column w^{-1}(r); flip the last moved row.
    auto winv = w.inverse();
    for (int r = n - 1; r >= 0; --r) {
      if (winv(r) != r) {
        g.set(r, winv(r), G.modulus() - 1);
        break;
      }
    }
  }
  return g;
}

std::vector<int> block_of(int n, const ReflectionSet& J) {
  std::vector<bool> joined(n, false);
  for (int r : J) {
    if (r < 1 || r >= n) throw DomainError("reflection index out of range");
    joined[r - 1] = true;  // rows r-1 and r (0-based) share a block
  }
  std::vector<int> block(n, 0);
  for (int i = 1; i < n; ++i) block[i] = block[i - 1] + (joined[i - 1] ? 0 : 1);
  return block;
}

std::vector<WeylElem> weyl_parabolic(int n, const ReflectionSet& J) {
  auto block = block_of(n, J);
  std::vector<WeylElem> out;
  for (auto& w : WeylElem::all(n)) {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) ok = block[w(i)] == block[i];
    if (ok) out.push_back(w);
  }
  return out;
}

std::uint64_t parabolic_order(const ReflectionSet& J, int n, std::uint64_t q) {
  using u128 = unsigned __int128;
  auto check = [](u128 v) {
    if (v > static_cast<u128>(UINT64_MAX))
      throw std::overflow_error("parabolic order exceeds 64 bits");
    return v;
  };
  u128 poincare = 0;
  for (const auto& w : weyl_parabolic(n, J)) {
    u128 t = 1;
    for (int k = 0; k < w.length(); ++k) t = check(t * q);
    poincare = check(poincare + t);
  }
  u128 r = poincare;
  for (int k = 0; k < n - 1; ++k) r = check(r * (q - 1));
  for (int k = 0; k < n * (n - 1) / 2; ++k) r = check(r * q);
  return static_cast<std::uint64_t>(r);
}

std::string SubgroupSpec::to_string() const {
  switch (kind) {
    case SubgroupKind::Borel: return "borel";
    case SubgroupKind::LowerBorel: return "lower-borel";
    case SubgroupKind::Unipotent: return "unipotent";
    case SubgroupKind::Torus: return "torus";
    case SubgroupKind::Parabolic: {
      std::ostringstream os;
      os << "parabolic{";
      for (std::size_t i = 0; i < J.size(); ++i) os << (i ? "," : "") << J[i];
      os << '}';
      return os.str();
    }
  }
  return "?";
}

namespace {

using Mask = std::array<std::array<bool, kMaxDim>, kMaxDim>;

/// Enumerates det-1 matrices whose support lies in `allowed`. Rows 0..n-2
/// range over all linearly independent choices; the last row solves the
/// linear equation det = 1 given by its cofactors.
class PatternEnumerator {
 public:
  PatternEnumerator(const MatGroup& G, const Mask& allowed, std::uint64_t budget)
      : G_(G), f_(G.field()), n_(G.dim()), allowed_(allowed), budget_(budget) {}

  std::vector<GroupElem> run() {
    rows_.assign(n_, std::vector<std::uint32_t>(n_, 0));
    echelon_.clear();
    choose_row(0);
    return std::move(out_);
  }

 private:
  // Reduces v against the current echelon basis; true if v is independent.
  bool reduce_independent(std::vector<std::uint32_t> v,
                          std::vector<std::uint32_t>* reduced) const {
    for (const auto& [pivot, row] : echelon_) {
      if (v[pivot] == 0) continue;
      FieldElem c{v[pivot]};
      for (int k = 0; k < n_; ++k)
        v[k] = f_.sub({v[k]}, f_.mul(c, {row[k]})).value;
    }
    bool nonzero = std::any_of(v.begin(), v.end(), [](auto x) { return x != 0; });
    if (reduced) *reduced = std::move(v);
    return nonzero;
  }

  void choose_row(int i) {
    if (i == n_ - 1) {
      solve_last_row();
      return;
    }
    std::vector<int> cols;
    for (int j = 0; j < n_; ++j)
      if (allowed_[i][j]) cols.push_back(j);
    const std::uint32_t p = G_.modulus();
    std::vector<std::uint32_t> digits(cols.size(), 0);
    while (true) {
      std::vector<std::uint32_t> v(n_, 0);
      for (std::size_t k = 0; k < cols.size(); ++k) v[cols[k]] = digits[k];
      std::vector<std::uint32_t> red;
      if (reduce_independent(v, &red)) {
        int pivot = 0;
        while (red[pivot] == 0) ++pivot;
        FieldElem inv = f_.inv({red[pivot]});
        for (auto& x : red) x = f_.mul({x}, inv).value;
        echelon_.emplace_back(pivot, red);
        rows_[i] = v;
        choose_row(i + 1);
        echelon_.pop_back();
      }
      std::size_t k = 0;
      while (k < digits.size() && ++digits[k] == p) digits[k++] = 0;
      if (k == digits.size()) break;
    }
  }

  std::uint32_t minor_det(int skip_col) const {
    const int m = n_ - 1;
    std::array<std::array<std::int64_t, kMaxDim>, kMaxDim> a{};
    for (int r = 0; r < m; ++r) {
      int c2 = 0;
      for (int c = 0; c < n_; ++c) {
        if (c == skip_col) continue;
        a[r][c2++] = rows_[r][c];
      }
    }
    std::int64_t d = 0;
    if (m == 1) {
      d = a[0][0];
    } else if (m == 2) {
      d = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    } else {
      d = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
          a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
          a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    }
    return f_.elem(d).value;
  }

  void solve_last_row() {
    const int last = n_ - 1;
    std::vector<FieldElem> cof(n_);
    for (int j = 0; j < n_; ++j) {
      FieldElem m{minor_det(j)};
      cof[j] = ((last + j) % 2 == 0) ? m : f_.neg(m);
    }
    std::vector<int> cols;
    int pivot = -1;
    for (int j = 0; j < n_; ++j) {
      if (!allowed_[last][j]) continue;
      if (pivot < 0 && cof[j].value != 0) pivot = j;
      else cols.push_back(j);
    }
    if (pivot < 0) return;
    FieldElem pinv = f_.inv(cof[pivot]);
    const std::uint32_t p = G_.modulus();
    std::vector<std::uint32_t> digits(cols.size(), 0);
    while (true) {
      // sum_j cof_j x_j = 1
      FieldElem rest = f_.zero();
      for (std::size_t k = 0; k < cols.size(); ++k)
        rest = f_.add(rest, f_.mul(cof[cols[k]], {digits[k]}));
      FieldElem xp = f_.mul(f_.sub(f_.one(), rest), pinv);
      GroupElem g;
      g.n = static_cast<std::uint8_t>(n_);
      for (int r = 0; r < last; ++r)
        for (int c = 0; c < n_; ++c) g.set(r, c, rows_[r][c]);
      for (std::size_t k = 0; k < cols.size(); ++k) g.set(last, cols[k], digits[k]);
      g.set(last, pivot, xp.value);
      if (out_.size() >= budget_)
        throw BudgetExceeded("enumeration exceeds budget of " +
                             std::to_string(budget_) + " elements");
      out_.push_back(g);
      std::size_t k = 0;
      while (k < digits.size() && ++digits[k] == p) digits[k++] = 0;
      if (k == digits.size()) break;
    }
  }

  const MatGroup& G_;
  const PrimeField& f_;
  int n_;
  Mask allowed_;
  std::uint64_t budget_;
  std::vector<std::vector<std::uint32_t>> rows_;
  std::vector<std::pair<int, std::vector<std::uint32_t>>> echelon_;
  std::vector<GroupElem> out_;
};

Mask block_mask(int n, const ReflectionSet& J) {
  auto block = block_of(n, J);
  Mask m{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[i][j] = block[j] >= block[i];
  return m;
}

ElemSet unipotent(const MatGroup& G) {
  const int n = G.dim();
  std::vector<std::pair<int, int>> pos;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pos.emplace_back(i, j);
  std::vector<GroupElem> out;
  std::vector<std::uint32_t> digits(pos.size(), 0);
  while (true) {
    GroupElem g = G.identity();
    for (std::size_t k = 0; k < pos.size(); ++k)
      g.set(pos[k].first, pos[k].second, digits[k]);
    out.push_back(g);
    std::size_t k = 0;
    while (k < digits.size() && ++digits[k] == G.modulus()) digits[k++] = 0;
    if (k == digits.size()) break;
  }
  return ElemSet(G, std::move(out));
}

}  // namespace

ElemSet enumerate_group(const MatGroup& G, std::uint64_t budget) {
  std::uint64_t order = 0;
  try {
    order = G.order();
  } catch (const std::overflow_error&) {
    order = UINT64_MAX;
  }
  if (order > budget)
    throw BudgetExceeded("|SL_" + std::to_string(G.dim()) + "(F_" +
                         std::to_string(G.modulus()) + ")| exceeds budget of " +
                         std::to_string(budget) + " elements");
  Mask all{};
  for (auto& row : all) row.fill(true);
  return ElemSet(G, PatternEnumerator(G, all, budget).run());
}

ElemSet subgroup(const MatGroup& G, const SubgroupSpec& spec,
                 std::uint64_t budget) {
  const int n = G.dim();
  switch (spec.kind) {
    case SubgroupKind::Unipotent:
      return unipotent(G);
    case SubgroupKind::Torus: {
      Mask m{};
      for (int i = 0; i < n; ++i) m[i][i] = true;
      return ElemSet(G, PatternEnumerator(G, m, budget).run());
    }
    case SubgroupKind::Borel:
      return ElemSet(G, PatternEnumerator(G, block_mask(n, {}), budget).run());
    case SubgroupKind::LowerBorel: {
      Mask m{};
      for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) m[i][j] = true;
      return ElemSet(G, PatternEnumerator(G, m, budget).run());
    }
    case SubgroupKind::Parabolic: {
      auto expected = parabolic_order(spec.J, n, G.modulus());
      if (expected > budget)
        throw BudgetExceeded("parabolic subgroup exceeds budget");
      return ElemSet(G, PatternEnumerator(G, block_mask(n, spec.J), budget).run());
    }
  }
  throw DomainError("unknown subgroup kind");
}

GroupElem root_element(const MatGroup& G, int i, int j, std::uint32_t t) {
  GroupElem g = G.identity();
  g.set(i, j, t % G.modulus());
  return g;
}

BruhatForm bruhat_decompose(const MatGroup& G, const GroupElem& g) {
  const int n = G.dim();
  const auto& f = G.field();
  std::array<std::array<FieldElem, kMaxDim>, kMaxDim> M{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M[i][j] = {g.at(i, j)};

  // Column by column: the pivot is the lowest unused row with a nonzero
  // entry; clear everything above it using that row (left action of U).
  std::vector<int> w(n, -1);
  std::vector<bool> used(n, false);
  for (int j = 0; j < n; ++j) {
    int r = -1;
    for (int i = n - 1; i >= 0; --i)
      if (!used[i] && M[i][j].value != 0) {
        r = i;
        break;
      }
    if (r < 0) throw DomainError("matrix is singular");
    w[j] = r;
    used[r] = true;
    FieldElem pinv = f.inv(M[r][j]);
    for (int i = 0; i < r; ++i) {
      if (M[i][j].value == 0) continue;
      FieldElem c = f.mul(M[i][j], pinv);
      for (int k = 0; k < n; ++k) M[i][k] = f.sub(M[i][k], f.mul(c, M[r][k]));
    }
  }
  WeylElem we(w);

  // Now M = t * rep(w) * u with t diagonal; read u off the columns.
  GroupElem u = G.identity();
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < j; ++k)
      if (w[k] > w[j]) {
        FieldElem v = f.mul(M[w[k]][j], f.inv(M[w[k]][k]));
        u.set(k, j, v.value);
      }
  GroupElem b = G.mul(g, G.inv(u), G.inv(weyl_rep(G, we)));
  return {b, we, u};
}

bool in_u_double_prime(const MatGroup& G, const WeylElem& w,
                       const GroupElem& u) {
  const int n = G.dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto v = u.at(i, j);
      if (i == j) {
        if (v != 1) return false;
      } else if (i > j || w(i) < w(j)) {
        if (v != 0) return false;
      }
    }
  return true;
}

ElemSet u_double_prime(const MatGroup& G, const WeylElem& w) {
  const int n = G.dim();
  std::vector<std::pair<int, int>> pos;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (w(i) > w(j)) pos.emplace_back(i, j);
  std::vector<GroupElem> out;
  std::vector<std::uint32_t> digits(pos.size(), 0);
  while (true) {
    GroupElem g = G.identity();
    for (std::size_t k = 0; k < pos.size(); ++k)
      g.set(pos[k].first, pos[k].second, digits[k]);
    out.push_back(g);
    std::size_t k = 0;
    while (k < digits.size() && ++digits[k] == G.modulus()) digits[k++] = 0;
    if (k == digits.size()) break;
  }
  return ElemSet(G, std::move(out));
}

std::map<WeylElem, std::uint64_t> bruhat_cell_census(const MatGroup& G,
                                                     std::uint64_t budget) {
  std::map<WeylElem, std::uint64_t> census;
  for (const auto& w : WeylElem::all(G.dim())) census[w] = 0;
  for (const auto& g : enumerate_group(G, budget))
    ++census[bruhat_decompose(G, g).w];
  return census;
}

bool check_inclusion_wrBw(const MatGroup& G, int r, const WeylElem& w) {
  const auto sr = WeylElem::reflection(G.dim(), r);
  const auto srw = sr * w;
  const auto left = weyl_rep(G, sr);
  const auto right = weyl_rep(G, w);
  for (const auto& b : subgroup(G, SubgroupSpec::borel())) {
    auto cell = bruhat_decompose(G, G.mul(left, b, right)).w;
    if (cell != w && cell != srw) return false;
  }
  return true;
}

ElemSet conjugate(const GroupElem& g, const ElemSet& S) {
  const auto& G = S.group();
  const auto ginv = G.inv(g);
  std::vector<GroupElem> out;
  out.reserve(S.size());
  for (const auto& s : S) out.push_back(G.mul(g, s, ginv));
  return ElemSet(G, std::move(out));
}

}  // namespace pgrowth
