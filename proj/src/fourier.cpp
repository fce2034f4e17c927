#include "pgrowth/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include "pgrowth/matgrp.hpp"

namespace pgrowth {

namespace {

using cd = std::complex<double>;

// exp(2 pi i k / m) for k in [0, m).
std::vector<cd> roots_of_unity(std::uint32_t m) {
  std::vector<cd> t(m);
  for (std::uint32_t k = 0; k < m; ++k)
    t[k] = std::polar(1.0, 2.0 * std::numbers::pi * k / m);
  return t;
}

void require_table(const AffGroup& G, const FunctionTable& f) {
  if (f.size() != G.order())
    throw PreconditionError("function table size does not match |Aff(F_p)|");
}

}  // namespace

AffGroup::AffGroup(std::uint32_t p) : field_(p), chars_(p) {}

std::uint64_t AffGroup::order() const {
  const std::uint64_t p = modulus();
  return p * (p - 1);
}

AffElem AffGroup::make(std::int64_t a, std::int64_t b) const {
  auto fa = field_.elem(a);
  if (fa.value == 0) throw DomainError("affine map needs a != 0");
  return {fa, field_.elem(b)};
}

AffElem AffGroup::mul(const AffElem& g, const AffElem& h) const {
  return {field_.mul(g.a, h.a), field_.add(field_.mul(g.a, h.b), g.b)};
}

AffElem AffGroup::inv(const AffElem& g) const {
  auto ai = field_.inv(g.a);
  return {ai, field_.neg(field_.mul(ai, g.b))};
}

std::size_t AffGroup::index(const AffElem& g) const {
  return static_cast<std::size_t>(g.a.value - 1) * modulus() + g.b.value;
}

AffElem AffGroup::elem(std::size_t i) const {
  const std::uint32_t p = modulus();
  return {FieldElem{static_cast<std::uint32_t>(i / p + 1)},
          FieldElem{static_cast<std::uint32_t>(i % p)}};
}

std::vector<AffElem> AffGroup::all() const {
  std::vector<AffElem> out;
  out.reserve(order());
  for (std::size_t i = 0; i < order(); ++i) out.push_back(elem(i));
  return out;
}

FunctionTable indicator(const AffGroup& G, const AffSet& A) {
  FunctionTable f(G.order());
  for (const auto& g : A) f[G.index(g)] = 1.0;
  return f;
}

FunctionTable delta(const AffGroup& G, const AffElem& g) {
  FunctionTable f(G.order());
  f[G.index(g)] = 1.0;
  return f;
}

AffSet aff_torus(const AffGroup& G) {
  AffSet s;
  for (std::uint32_t a = 1; a < G.modulus(); ++a) s.push_back({{a}, {0}});
  return s;
}

AffSet aff_unipotent(const AffGroup& G) {
  AffSet s;
  for (std::uint32_t b = 0; b < G.modulus(); ++b) s.push_back({{1}, {b}});
  return s;
}

AffSet aff_generated(const AffGroup& G, const std::vector<AffElem>& gens) {
  std::vector<char> in(G.order(), 0);
  std::vector<AffElem> frontier{G.identity()};
  in[G.index(G.identity())] = 1;
  while (!frontier.empty()) {
    auto x = frontier.back();
    frontier.pop_back();
    for (const auto& s : gens) {
      auto y = G.mul(x, s);
      if (!in[G.index(y)]) {
        in[G.index(y)] = 1;
        frontier.push_back(y);
      }
    }
  }
  AffSet out;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (in[i]) out.push_back(G.elem(i));
  return out;
}

AffSet aff_random_subset(const AffGroup& G, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(G.order());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  k = std::min(k, idx.size());
  for (std::size_t i = 0; i < k; ++i)
    std::swap(idx[i], idx[i + uniform_below(rng, idx.size() - i)]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  AffSet out;
  for (auto i : idx) out.push_back(G.elem(i));
  return out;
}

std::string RepLabel::to_string() const {
  return kind == Kind::OneDim ? "OneDim(" + std::to_string(j) + ")" : "BigRep";
}

std::vector<RepLabel> rep_labels(std::uint32_t p) {
  std::vector<RepLabel> out;
  for (std::uint32_t j = 0; j + 1 < p; ++j) out.push_back(RepLabel::one_dim(j));
  out.push_back(RepLabel::big());
  return out;
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::operator*(const CMatrix& o) const {
  CMatrix r(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = 0; k < n_; ++k) {
      const cd a = (*this)(i, k);
      if (a == cd{}) continue;
      for (std::size_t j = 0; j < n_; ++j) r(i, j) += a * o(k, j);
    }
  return r;
}

double CMatrix::hs_norm() const {
  double s = 0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

double CMatrix::max_abs_diff(const CMatrix& o) const {
  double m = 0;
  for (std::size_t i = 0; i < data_.size(); ++i)
    m = std::max(m, std::abs(data_[i] - o.data_[i]));
  return m;
}

CMatrix rep_eval(const AffGroup& G, RepLabel label, const AffElem& g) {
  const std::uint32_t p = G.modulus();
  if (label.kind == RepLabel::Kind::OneDim) {
    CMatrix m(1);
    m(0, 0) = G.chars().mult_character(label.j, g.a);
    return m;
  }
  const auto& f = G.field();
  CMatrix m(p - 1);
  for (std::uint32_t x = 1; x < p; ++x) {
    auto y = f.mul(g.a, {x});
    m(x - 1, y.value - 1) = G.chars().add_character(f.mul(g.b, {x}));
  }
  return m;
}

const CMatrix& FourierData::at(RepLabel label) const {
  return label.kind == RepLabel::Kind::OneDim ? mats.at(label.j) : mats.back();
}

FourierData fourier(const AffGroup& G, const FunctionTable& f) {
  require_table(G, f);
  const std::uint32_t p = G.modulus();
  const auto& fld = G.field();
  const auto phase = roots_of_unity(p);
  const auto chi = roots_of_unity(p - 1);
  FourierData F;
  F.p = p;
  F.mats.assign(p - 1, CMatrix(1));
  F.mats.push_back(CMatrix(p - 1));
  auto& big = F.mats.back();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == cd{}) continue;
    const auto g = G.elem(i);
    const std::uint32_t k = G.chars().dlog(g.a);
    for (std::uint32_t j = 0; j + 1 < p; ++j)
      F.mats[j](0, 0) += f[i] * chi[(std::uint64_t{j} * k) % (p - 1)];
    for (std::uint32_t x = 1; x < p; ++x) {
      auto y = fld.mul(g.a, {x});
      big(x - 1, y.value - 1) += f[i] * phase[fld.mul(g.b, {x}).value];
    }
  }
  return F;
}

FunctionTable inverse(const AffGroup& G, const FourierData& F) {
  const std::uint32_t p = G.modulus();
  if (F.p != p || F.mats.size() != p)
    throw PreconditionError("Fourier data does not match the group");
  const auto& fld = G.field();
  const auto phase = roots_of_unity(p);
  const auto chi = roots_of_unity(p - 1);
  const auto& big = F.mats.back();
  const double order = static_cast<double>(G.order());
  FunctionTable f(G.order());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto h = G.inv(G.elem(i));
    const std::uint32_t k = G.chars().dlog(h.a);
    cd s = 0;
    for (std::uint32_t j = 0; j + 1 < p; ++j)
      s += F.mats[j](0, 0) * chi[(std::uint64_t{j} * k) % (p - 1)];
    // tr(F pi(h)) = sum_y F[a_h y, y] e(b_h y / p)
    cd t = 0;
    for (std::uint32_t y = 1; y < p; ++y)
      t += big(fld.mul(h.a, {y}).value - 1, y - 1) * phase[fld.mul(h.b, {y}).value];
    f[i] = (s + static_cast<double>(p - 1) * t) / order;
  }
  return f;
}

ParsevalResult parseval_check(const AffGroup& G, const FunctionTable& f, double tol) {
  const auto F = fourier(G, f);
  const std::uint32_t p = G.modulus();
  ParsevalResult r;
  for (const auto& z : f) r.lhs += std::norm(z);
  for (const auto& label : rep_labels(p)) {
    const double hs = F.at(label).hs_norm();
    r.rhs += label.dim(p) * hs * hs;
  }
  r.rhs /= static_cast<double>(G.order());
  r.pass = std::abs(r.lhs - r.rhs) <= tol * std::max({r.lhs, r.rhs, 1e-300});
  return r;
}

FunctionTable convolve(const AffGroup& G, const FunctionTable& f,
                       const FunctionTable& g) {
  require_table(G, f);
  require_table(G, g);
  FunctionTable out(G.order());
  for (std::size_t iy = 0; iy < f.size(); ++iy) {
    if (f[iy] == cd{}) continue;
    const auto y = G.elem(iy);
    // x = y z, so (f * g)(y z) picks up f(y) g(z).
    for (std::size_t iz = 0; iz < g.size(); ++iz) {
      if (g[iz] == cd{}) continue;
      out[G.index(G.mul(y, G.elem(iz)))] += f[iy] * g[iz];
    }
  }
  return out;
}

bool convolution_check(const AffGroup& G, const FunctionTable& f,
                       const FunctionTable& g, double tol) {
  const auto lhs = fourier(G, convolve(G, f, g));
  const auto Ff = fourier(G, f);
  const auto Fg = fourier(G, g);
  for (std::size_t i = 0; i < lhs.mats.size(); ++i) {
    const auto prod = Ff.mats[i] * Fg.mats[i];
    const double scale = std::max(1.0, prod.hs_norm());
    if (lhs.mats[i].max_abs_diff(prod) > tol * scale) return false;
  }
  return true;
}

double wiener_norm(const AffGroup& G, const FunctionTable& f) {
  const auto F = fourier(G, f);
  const std::uint32_t p = G.modulus();
  double s = 0;
  for (const auto& label : rep_labels(p)) s += label.dim(p) * F.at(label).hs_norm();
  return s / static_cast<double>(G.order());
}

double op_norm(const FourierData& F, RepLabel label, double tol, int max_iter) {
  const auto& M = F.at(label);
  const std::size_t n = M.size();
  if (M.hs_norm() == 0.0) return 0.0;
  if (n == 1) return std::abs(M(0, 0));

  auto apply = [&](const std::vector<cd>& v, bool adjoint) {
    std::vector<cd> w(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        w[i] += (adjoint ? std::conj(M(j, i)) : M(i, j)) * v[j];
    return w;
  };
  auto normalize = [](std::vector<cd>& v) {
    double s = 0;
    for (const auto& z : v) s += std::norm(z);
    s = std::sqrt(s);
    for (auto& z : v) z /= s;
    return s;
  };

  Rng rng(0x5eed);
  std::vector<cd> v(n);
  for (auto& z : v)
    z = {static_cast<double>(uniform_below(rng, 1 << 20)) + 1.0,
         static_cast<double>(uniform_below(rng, 1 << 20))};
  normalize(v);

  double prev = -1;
  for (int it = 0; it < max_iter; ++it) {
    auto w = apply(apply(v, false), true);
    // Rayleigh quotient v* (M* M) v with |v| = 1.
    double lambda = 0;
    for (std::size_t i = 0; i < n; ++i) lambda += (std::conj(v[i]) * w[i]).real();
    if (lambda <= 0) return 0.0;
    if (prev >= 0 && std::abs(lambda - prev) <= tol * lambda) return std::sqrt(lambda);
    prev = lambda;
    normalize(w);
    v = std::move(w);
  }
  throw NumericError("op_norm: power iteration did not converge");
}

bool character_condition(const AffGroup& G, const AffSet& Gamma) {
  const std::uint64_t m = G.modulus() - 1;
  std::uint64_t g = m;
  for (const auto& x : Gamma) g = std::gcd(g, std::uint64_t{G.chars().dlog(x.a)});
  return g == 1;
}

CosetHitReport coset_hit_check(const AffGroup& G, const AffSet& A, const AffSet& Gamma,
                         const AffElem& z, int n) {
  if (n < 1) throw DomainError("coset_hit_check requires n >= 1");
  if (!character_condition(G, Gamma))
    throw PreconditionError("Gamma fails the character condition");
  const std::uint64_t p = G.modulus();
  CosetHitReport r;
  const BigInt lhs = pow(BigInt(A.size()), n) * BigInt(Gamma.size()) * Gamma.size();
  const BigInt rhs = pow(BigInt(p), n + 2) * (p - 1) * (p - 1);
  r.condition = lhs > rhs;

  std::vector<char> cur(G.order(), 0);
  for (const auto& a : A) cur[G.index(a)] = 1;
  for (int k = 1; k < n; ++k) {
    std::vector<char> next(G.order(), 0);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      if (!cur[i]) continue;
      const auto x = G.elem(i);
      for (const auto& a : A) next[G.index(G.mul(x, a))] = 1;
    }
    cur = std::move(next);
  }
  for (const auto& g : Gamma) {
    r.nonempty_z_gamma = r.nonempty_z_gamma || cur[G.index(G.mul(z, g))];
    r.nonempty_gamma_z = r.nonempty_gamma_z || cur[G.index(G.mul(g, z))];
  }
  return r;
}

AffElem borel_embed(const MatGroup& G, const GroupElem& g) {
  if (G.dim() != 2 || !G.is_upper_triangular(g) || G.det(g) != 1)
    throw PreconditionError("borel_embed needs an element of the Borel of SL_2");
  const auto& f = G.field();
  FieldElem lambda{g.at(0, 0)}, u{g.at(0, 1)};
  return {f.mul(lambda, lambda), f.mul(lambda, u)};
}

std::uint64_t borel_class_count(std::uint32_t p) {
  if (p == 2) throw DomainError("borel_class_count needs an odd prime");
  MatGroup G(2, p);
  const auto B = subgroup(G, SubgroupSpec::borel());
  std::set<GroupElem> seen;
  std::uint64_t classes = 0;
  for (const auto& x : B) {
    if (seen.count(x)) continue;
    ++classes;
    for (const auto& g : B) seen.insert(G.conj(g, x));
  }
  return classes;
}

bool borel_dimension_identity(std::uint32_t p) {
  const std::uint64_t q = p, h = (q - 1) / 2;
  return (q - 1) + 4 * h * h == q * (q - 1);
}

}  // namespace pgrowth
