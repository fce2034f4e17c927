#include "pgrowth/group.hpp"

#include <algorithm>
#include <iterator>
#include <sstream>

namespace pgrowth {

namespace {

using Dense = std::array<std::array<std::uint32_t, kMaxDim>, kMaxDim>;

Dense to_dense(const GroupElem& a) {
  Dense m{};
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) m[i][j] = a.at(i, j);
  return m;
}

std::uint32_t dense_det(Dense m, int n, const PrimeField& f) {
  FieldElem d = f.one();
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int r = c; r < n; ++r)
      if (m[r][c] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) return 0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      d = f.neg(d);
    }
    d = f.mul(d, {m[c][c]});
    FieldElem pinv = f.inv({m[c][c]});
    for (int r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      FieldElem factor = f.mul({m[r][c]}, pinv);
      for (int k = c; k < n; ++k)
        m[r][k] = f.sub({m[r][k]}, f.mul(factor, {m[c][k]})).value;
    }
  }
  return d.value;
}

}  // namespace

std::size_t GroupElemHash::operator()(const GroupElem& g) const noexcept {
  // splitmix64 over the packed entries.
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ g.n;
  const int len = g.n * g.n;
  for (int i = 0; i < len; i += 4) {
    std::uint64_t w = 0;
    for (int k = 0; k < 4 && i + k < len; ++k)
      w |= static_cast<std::uint64_t>(g.e[i + k]) << (16 * k);
    h ^= w;
    h += 0x9e3779b97f4a7c15ULL;
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
    h ^= h >> 31;
  }
  return static_cast<std::size_t>(h);
}

MatGroup::MatGroup(int n, std::uint32_t p) : n_(n), field_(p) {
  if (n < 2 || n > kMaxDim)
    throw DomainError("dimension must be between 2 and 4");
  if (p >= (1u << 16)) throw DomainError("modulus must be below 65536");
}

GroupElem MatGroup::identity() const { return scalar(1); }

GroupElem MatGroup::scalar(std::int64_t c) const {
  GroupElem g;
  g.n = static_cast<std::uint8_t>(n_);
  auto v = field_.elem(c).value;
  for (int i = 0; i < n_; ++i) g.set(i, i, v);
  return g;
}

GroupElem MatGroup::make_unchecked(std::span<const std::int64_t> rowmajor) const {
  if (rowmajor.size() != static_cast<std::size_t>(n_ * n_))
    throw DomainError("expected " + std::to_string(n_ * n_) + " entries");
  GroupElem g;
  g.n = static_cast<std::uint8_t>(n_);
  for (int i = 0; i < n_ * n_; ++i)
    g.e[i] = static_cast<std::uint16_t>(field_.elem(rowmajor[i]).value);
  return g;
}

GroupElem MatGroup::make(std::span<const std::int64_t> rowmajor) const {
  GroupElem g = make_unchecked(rowmajor);
  if (det(g) != 1) throw DomainError("determinant is not 1");
  return g;
}

GroupElem MatGroup::mul(const GroupElem& a, const GroupElem& b) const {
  GroupElem c;
  c.n = static_cast<std::uint8_t>(n_);
  const std::uint64_t p = modulus();
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      std::uint64_t s = 0;
      for (int k = 0; k < n_; ++k)
        s += static_cast<std::uint64_t>(a.e[i * n_ + k]) * b.e[k * n_ + j];
      c.e[i * n_ + j] = static_cast<std::uint16_t>(s % p);
    }
  return c;
}

GroupElem MatGroup::inv(const GroupElem& a) const {
  if (n_ == 2) {
    // det = 1: inverse is the adjugate.
    GroupElem r;
    r.n = 2;
    r.e[0] = a.e[3];
    r.e[1] = static_cast<std::uint16_t>(field_.neg({a.e[1]}).value);
    r.e[2] = static_cast<std::uint16_t>(field_.neg({a.e[2]}).value);
    r.e[3] = a.e[0];
    return r;
  }
  Dense m = to_dense(a);
  Dense inv{};
  for (int i = 0; i < n_; ++i) inv[i][i] = 1;
  for (int c = 0; c < n_; ++c) {
    int piv = c;
    while (piv < n_ && m[piv][c] == 0) ++piv;
    if (piv == n_) throw DomainError("singular matrix");
    std::swap(m[piv], m[c]);
    std::swap(inv[piv], inv[c]);
    FieldElem pinv = field_.inv({m[c][c]});
    for (int k = 0; k < n_; ++k) {
      m[c][k] = field_.mul({m[c][k]}, pinv).value;
      inv[c][k] = field_.mul({inv[c][k]}, pinv).value;
    }
    for (int r = 0; r < n_; ++r) {
      if (r == c || m[r][c] == 0) continue;
      FieldElem f{m[r][c]};
      for (int k = 0; k < n_; ++k) {
        m[r][k] = field_.sub({m[r][k]}, field_.mul(f, {m[c][k]})).value;
        inv[r][k] = field_.sub({inv[r][k]}, field_.mul(f, {inv[c][k]})).value;
      }
    }
  }
  GroupElem r;
  r.n = static_cast<std::uint8_t>(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) r.set(i, j, inv[i][j]);
  return r;
}

std::uint32_t MatGroup::det(const GroupElem& a) const {
  return dense_det(to_dense(a), n_, field_);
}

bool MatGroup::is_upper_triangular(const GroupElem& a) const {
  for (int i = 1; i < n_; ++i)
    for (int j = 0; j < i; ++j)
      if (a.at(i, j) != 0) return false;
  return true;
}

std::uint64_t MatGroup::order() const {
  // q^{n(n-1)/2} * prod_{k=2..n} (q^k - 1)
  const unsigned __int128 q = modulus();
  unsigned __int128 r = 1;
  auto check = [&] {
    if (r > static_cast<unsigned __int128>(UINT64_MAX))
      throw std::overflow_error("group order exceeds 64 bits");
  };
  for (int i = 0; i < n_ * (n_ - 1) / 2; ++i) {
    r *= q;
    check();
  }
  for (int k = 2; k <= n_; ++k) {
    unsigned __int128 qk = 1;
    for (int i = 0; i < k; ++i) qk *= q;
    r *= (qk - 1);
    check();
  }
  return static_cast<std::uint64_t>(r);
}

std::string MatGroup::to_string(const GroupElem& a) const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < n_; ++i) {
    if (i) os << " | ";
    for (int j = 0; j < n_; ++j) os << (j ? " " : "") << a.at(i, j);
  }
  os << ')';
  return os.str();
}

ElemSet::ElemSet(const MatGroup& group, std::vector<GroupElem> elems)
    : group_(group), elems_(std::move(elems)) {
  std::sort(elems_.begin(), elems_.end());
  elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
}

bool ElemSet::contains(const GroupElem& g) const {
  return std::binary_search(elems_.begin(), elems_.end(), g);
}

ElemSet ElemSet::inverse() const {
  std::vector<GroupElem> out;
  out.reserve(elems_.size());
  for (const auto& g : elems_) out.push_back(group_.inv(g));
  return ElemSet(group_, std::move(out));
}

void require_same_group(const ElemSet& a, const ElemSet& b) {
  if (!(a.group() == b.group()))
    throw PreconditionError("sets belong to different groups");
}

ElemSet set_union(const ElemSet& a, const ElemSet& b) {
  require_same_group(a, b);
  std::vector<GroupElem> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return ElemSet(a.group(), std::move(out));
}

ElemSet set_intersection(const ElemSet& a, const ElemSet& b) {
  require_same_group(a, b);
  std::vector<GroupElem> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return ElemSet(a.group(), std::move(out));
}

ElemSet set_difference(const ElemSet& a, const ElemSet& b) {
  require_same_group(a, b);
  std::vector<GroupElem> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return ElemSet(a.group(), std::move(out));
}

bool is_subset(const ElemSet& a, const ElemSet& b) {
  require_same_group(a, b);
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace pgrowth
