#include "pgrowth/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <type_traits>

#include "pgrowth/cfrac.hpp"
#include "pgrowth/fourier.hpp"
#include "pgrowth/matgrp.hpp"
#include "pgrowth/setops.hpp"

#ifndef PGROWTH_BUILD_ID
#define PGROWTH_BUILD_ID "unknown"
#endif

namespace pgrowth::cli {

namespace {

// ---------------------------------------------------------------------------
// Strict JSON <-> params binding
// ---------------------------------------------------------------------------

template <class T> struct is_vector : std::false_type {};
template <class T> struct is_vector<std::vector<T>> : std::true_type {};

template <class T>
std::string type_name() {
  if constexpr (std::is_same_v<T, bool>) return "boolean";
  else if constexpr (std::is_same_v<T, std::string>) return "string";
  else if constexpr (std::is_unsigned_v<T>) return "non-negative integer";
  else if constexpr (std::is_integral_v<T>) return "integer";
  else if constexpr (is_vector<T>::value) return "array of " + type_name<typename T::value_type>();
  else return "value";
}

template <class T>
bool read_value(const Json& j, T& out) {
  if constexpr (std::is_same_v<T, bool>) {
    if (!j.is_boolean()) return false;
    out = j.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!j.is_string()) return false;
    out = j.get<std::string>();
  } else if constexpr (std::is_unsigned_v<T>) {
    // Literals built in C++ arrive as signed integers; accept them when >= 0.
    if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<std::int64_t>() < 0)) return false;
    const auto v = j.get<std::uint64_t>();
    if (v > std::numeric_limits<T>::max()) return false;
    out = static_cast<T>(v);
  } else if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer()) return false;
    const auto v = j.get<std::int64_t>();
    if (v < std::numeric_limits<T>::min() || v > std::numeric_limits<T>::max()) return false;
    out = static_cast<T>(v);
  } else if constexpr (is_vector<T>::value) {
    if (!j.is_array()) return false;
    T tmp;
    for (const auto& e : j) {
      typename T::value_type x{};
      if (!read_value(e, x)) return false;
      tmp.push_back(std::move(x));
    }
    out = std::move(tmp);
  } else {
    static_assert(sizeof(T) == 0, "unsupported field type");
  }
  return true;
}

struct Loader {
  const Json& obj;
  const std::string& where;
  std::set<std::string> known;

  template <class T>
  void operator()(const char* key, T& field) {
    known.insert(key);
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!read_value(*it, field))
      throw UsageError(where + "." + key + ": expected " + type_name<T>());
  }
};

struct Dumper {
  Json& obj;
  template <class T>
  void operator()(const char* key, const T& field) { obj[key] = field; }
};

template <class P>
P load_params(const Json& j, const std::string& where) {
  if (!j.is_object()) throw UsageError(where + ": expected object");
  P params;
  Loader loader{j, where, {}};
  params.fields(loader);
  for (const auto& [key, value] : j.items())
    if (!loader.known.count(key)) throw UsageError("unknown field " + where + "." + key);
  return params;
}

template <class P>
Json dump_params(P params) {
  Json j = Json::object();
  Dumper d{j};
  params.fields(d);
  return j;
}

// ---------------------------------------------------------------------------
// Determinism helpers
// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent stream per trial, so results do not depend on which
/// worker ran a trial or in what order.
Rng trial_rng(std::uint64_t seed, std::uint64_t trial) {
  return Rng(splitmix64(splitmix64(seed) ^ trial));
}

/// Runs body(i) for i in [0, n) on up to `jobs` threads. Callers write
/// into slot i only, so output order never depends on scheduling.
template <class F>
void parallel_for(std::size_t n, unsigned jobs, F&& body) {
  jobs = std::max(1u, jobs);
  if (jobs == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs && t < n; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Small conversions
// ---------------------------------------------------------------------------

Json big_to_json(const BigInt& x) {
  if (x >= 0 && x <= std::numeric_limits<std::uint64_t>::max())
    return static_cast<std::uint64_t>(x);
  if (x < 0 && x >= std::numeric_limits<std::int64_t>::min())
    return static_cast<std::int64_t>(x);
  return x.str();
}

BigInt parse_big(const std::string& text, const char* what) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
    throw UsageError(std::string(what) + " must be a non-negative decimal integer");
  return BigInt(text);
}

Json elem_json(const MatGroup& G, const GroupElem& g) {
  Json rows = Json::array();
  for (int i = 0; i < G.dim(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < G.dim(); ++j) row.push_back(g.at(i, j));
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::uint32_t> parse_digit_list(const std::string& text) {
  std::vector<std::uint32_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos || tok.size() > 9)
      throw UsageError("digits must be a comma separated list of positive integers");
    const auto v = static_cast<std::uint32_t>(std::stoul(tok));
    if (v == 0) throw UsageError("partial quotients must be >= 1");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("digits must be nonempty");
  return out;
}

MatGroup make_group(int n, std::uint32_t p) {
  if (n < 2 || n > kMaxDim) throw UsageError("n must be between 2 and " + std::to_string(kMaxDim));
  if (p >= (1u << 16)) throw UsageError("p must be below 65536");
  return MatGroup(n, p);  // DomainError("modulus must be prime") for composite p
}

void note_failure(Report& r, const std::string& witness) {
  if (r.passed) r.witness = witness;
  r.passed = false;
}

std::string hex_digest(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) h = (h ^ c) * 0x100000001b3ULL;
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

// ---------------------------------------------------------------------------
// growth helpers
// ---------------------------------------------------------------------------

ElemSet random_coset(const ElemSet& P, const MatGroup& G, Rng& rng, bool right) {
  const auto g = random_element(G, rng);
  ElemSet single(G, {g});
  return right ? product(P, single) : product(single, P);
}

Json growth_item(std::uint64_t trial, const std::string& kind, const GrowthReport& g) {
  return Json{{"trial", trial},
              {"kind", kind},
              {"size_a", g.size_a},
              {"size_ap", g.size_ap},
              {"size_pa", g.size_pa},
              {"size_a_cap_p", g.size_a_cap_p},
              {"delta", g.delta},
              {"first_alternative", g.first_alternative},
              {"second_alternative", g.second_alternative},
              {"max_bound", g.max_bound},
              {"ap_energy_bound", g.ap_energy_bound},
              {"pa_delta_bound", g.pa_delta_bound},
              {"ok", g.ok()}};
}

SubgroupSpec growth_subgroup(const GrowthParams& params) {
  if (params.subgroup == "borel") {
    if (!params.J.empty()) throw UsageError("J is only meaningful for subgroup=parabolic");
    return SubgroupSpec::borel();
  }
  if (params.subgroup == "parabolic") {
    for (int r : params.J)
      if (r < 1 || r >= params.n)
        throw UsageError("J entries must lie in 1.." + std::to_string(params.n - 1));
    auto J = params.J;
    std::sort(J.begin(), J.end());
    if (std::adjacent_find(J.begin(), J.end()) != J.end()) throw UsageError("J has repeated entries");
    if (static_cast<int>(J.size()) == params.n - 1)
      throw UsageError("J must be a proper subset: P = G has no growth statement");
    return SubgroupSpec::parabolic(J);
  }
  throw UsageError("subgroup must be borel or parabolic");
}

// ---------------------------------------------------------------------------
// fourier helpers
// ---------------------------------------------------------------------------

FunctionTable random_function(const AffGroup& G, Rng& rng) {
  FunctionTable f(G.order());
  for (auto& z : f) {
    const double re = static_cast<double>(uniform_below(rng, 2001)) / 1000.0 - 1.0;
    const double im = static_cast<double>(uniform_below(rng, 2001)) / 1000.0 - 1.0;
    z = {re, im};
  }
  return f;
}

AffElem random_aff(const AffGroup& G, Rng& rng) { return G.elem(uniform_below(rng, G.order())); }

double frobenius_diff(const CMatrix& a, const CMatrix& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i) s += std::norm(a.data()[i] - b.data()[i]);
  return std::sqrt(s);
}

double max_abs(const FunctionTable& f) {
  double m = 0;
  for (const auto& z : f) m = std::max(m, std::abs(z));
  return m;
}

struct FourierItem {
  std::uint64_t size = 0;
  double value = 0, bound = 0;
  bool pass = false;
  bool fired = false;  // coset-hit only
};

FourierItem fourier_trial(const AffGroup& G, const std::string& check, Rng& rng) {
  const std::uint32_t p = G.modulus();
  const double tol = 1e-9;
  FourierItem it;
  if (check == "parseval") {
    auto f = random_function(G, rng);
    auto r = parseval_check(G, f, tol);
    it.size = G.order();
    it.value = std::abs(r.lhs - r.rhs) / std::max(r.lhs, std::numeric_limits<double>::min());
    it.bound = tol;
    it.pass = r.pass && it.value <= tol;
  } else if (check == "inverse") {
    auto f = random_function(G, rng);
    auto back = inverse(G, fourier(G, f));
    double err = 0;
    for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(back[i] - f[i]));
    it.size = G.order();
    it.value = err / std::max(max_abs(f), std::numeric_limits<double>::min());
    it.bound = tol;
    it.pass = it.value <= tol;
  } else if (check == "conv") {
    auto f = random_function(G, rng);
    auto g = random_function(G, rng);
    auto Fc = fourier(G, convolve(G, f, g));
    auto Ff = fourier(G, f), Fg = fourier(G, g);
    double worst = 0;
    for (std::size_t k = 0; k < Fc.mats.size(); ++k) {
      auto prod = Ff.mats[k] * Fg.mats[k];
      const double scale = std::max(prod.hs_norm(), 1.0);
      worst = std::max(worst, frobenius_diff(Fc.mats[k], prod) / scale);
    }
    it.size = G.order();
    it.value = worst;
    it.bound = tol;
    it.pass = worst <= tol && convolution_check(G, f, g, tol);
  } else if (check == "rep") {
    auto g = random_aff(G, rng), h = random_aff(G, rng);
    const auto j = static_cast<std::uint32_t>(uniform_below(rng, p - 1));
    double worst = 0;
    for (auto label : {RepLabel::one_dim(j), RepLabel::big()}) {
      auto lhs = rep_eval(G, label, G.mul(g, h));
      auto rhs = rep_eval(G, label, g) * rep_eval(G, label, h);
      worst = std::max(worst, lhs.max_abs_diff(rhs));
    }
    it.size = 2;
    it.value = worst;
    it.bound = tol;
    it.pass = worst <= tol;
  } else if (check == "wiener") {
    std::vector<AffElem> gens{random_aff(G, rng)};
    if (uniform_below(rng, 2)) gens.push_back(random_aff(G, rng));
    auto S = aff_generated(G, gens);
    it.size = S.size();
    it.value = wiener_norm(G, indicator(G, S));
    it.bound = 1 + tol;
    it.pass = it.value <= it.bound;
  } else if (check == "opnorm") {
    const auto k = 1 + uniform_below(rng, G.order() - 1);
    auto A = aff_random_subset(G, k, rng);
    it.size = A.size();
    it.value = op_norm(fourier(G, indicator(G, A)), RepLabel::big());
    it.bound = std::sqrt(static_cast<double>(A.size()) * p);
    it.pass = it.value < it.bound;
  } else if (check == "coset-hit") {
    AffSet Gamma;
    if (uniform_below(rng, 4) == 0) {
      Gamma = G.all();
    } else {
      // Point stabilizer: a conjugate of the torus.
      auto c = random_aff(G, rng);
      for (const auto& x : aff_torus(G)) Gamma.push_back(G.mul(G.mul(c, x), G.inv(c)));
      std::sort(Gamma.begin(), Gamma.end());
    }
    const int n = 1 + static_cast<int>(uniform_below(rng, 3));
    auto A = aff_random_subset(G, 1 + uniform_below(rng, G.order()), rng);
    auto z = random_aff(G, rng);
    auto r = coset_hit_check(G, A, Gamma, z, n);
    // Condition |A|^n |Gamma|^2 > p^{n+2} (p-1)^2 as a ratio.
    const double lg = n * std::log(static_cast<double>(A.size())) +
                      2 * std::log(static_cast<double>(Gamma.size())) -
                      (n + 2) * std::log(static_cast<double>(p)) - 2 * std::log(p - 1.0);
    it.size = A.size();
    it.value = std::exp(lg);
    it.bound = 1;
    it.fired = r.condition;
    it.pass = r.implication_ok();
  } else {
    throw std::logic_error("unhandled fourier check " + check);
  }
  return it;
}

// ---------------------------------------------------------------------------
// cf-expand helpers
// ---------------------------------------------------------------------------

Json digits_json(const std::vector<BigInt>& digits) {
  Json out = Json::array();
  for (const auto& d : digits) out.push_back(big_to_json(d));
  return out;
}

Json digits_json(const std::vector<std::uint32_t>& digits) { return Json(digits); }

bool euclid_in_alphabet(std::uint64_t u, std::uint64_t v, const Alphabet& alphabet) {
  // u/v with 0 < u < v, gcd 1.
  while (u != 0) {
    const std::uint64_t b = v / u, r = v % u;
    if (b > UINT32_MAX || !alphabet.count(static_cast<std::uint32_t>(b))) return false;
    v = u;
    u = r;
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// group-stats
// ---------------------------------------------------------------------------

Report run_group_stats(const GroupStatsParams& params) {
  Report r;
  r.command = "group-stats";
  r.params = dump_params(params);
  auto G = make_group(params.n, params.p);
  const int n = params.n;
  const std::uint64_t q = params.p;

  ReflectionSet full(n - 1);
  std::iota(full.begin(), full.end(), 1);
  const auto formula = parabolic_order(full, n, q);
  const auto all = enumerate_group(G);
  const auto B = subgroup(G, SubgroupSpec::borel());
  const auto U = subgroup(G, SubgroupSpec::unipotent());
  const auto T = subgroup(G, SubgroupSpec::torus());
  const auto census = bruhat_cell_census(G);

  Json cells = Json::array();
  for (const auto& [w, count] : census) {
    std::uint64_t expected = B.size();
    for (int k = 0; k < w.length(); ++k) expected *= q;
    cells.push_back(count);
    r.items.push_back(Json{{"w", w.to_string()},
                           {"length", w.length()},
                           {"size", count},
                           {"expected", expected},
                           {"ok", count == expected}});
    if (count != expected)
      note_failure(r, "cell " + w.to_string() + " has " + std::to_string(count) + " elements, expected " +
                          std::to_string(expected));
  }
  if (all.size() != formula)
    note_failure(r, "enumerated " + std::to_string(all.size()) + " elements, formula gives " +
                        std::to_string(formula));

  r.summary = Json{{"n", n},
                   {"p", q},
                   {"order", all.size()},
                   {"order_formula", formula},
                   {"borel", B.size()},
                   {"borel_formula", parabolic_order({}, n, q)},
                   {"unipotent", U.size()},
                   {"torus", T.size()},
                   {"weyl", census.size()},
                   {"cells", cells}};
  return r;
}

// ---------------------------------------------------------------------------
// bruhat
// ---------------------------------------------------------------------------

Report run_bruhat(const BruhatParams& params) {
  Report r;
  r.command = "bruhat";
  r.params = dump_params(params);
  auto G = make_group(params.n, params.p);
  const int n = params.n;
  const std::uint64_t q = params.p;

  auto round_trip = [&](const GroupElem& g, const BruhatForm& f) {
    return G.is_upper_triangular(f.b) && G.det(f.b) == 1 && in_u_double_prime(G, f.w, f.u) &&
           G.mul(f.b, weyl_rep(G, f.w), f.u) == g;
  };

  if (!params.element.empty()) {
    if (params.element.size() != static_cast<std::size_t>(n * n))
      throw UsageError("element needs exactly n*n = " + std::to_string(n * n) + " entries");
    const auto g = G.make(std::span<const std::int64_t>(params.element));
    const auto f = bruhat_decompose(G, g);
    const bool ok = round_trip(g, f);
    r.items.push_back(Json{{"g", elem_json(G, g)},
                           {"b", elem_json(G, f.b)},
                           {"w", f.w.to_string()},
                           {"length", f.w.length()},
                           {"u", elem_json(G, f.u)},
                           {"ok", ok}});
    if (!ok) note_failure(r, "g = " + G.to_string(g) + " does not round-trip");
    r.summary = Json{{"n", n}, {"p", q}, {"elements", 1}, {"roundtrip_failures", ok ? 0 : 1}};
    return r;
  }

  const auto all = enumerate_group(G);
  const auto B = subgroup(G, SubgroupSpec::borel());
  std::map<WeylElem, std::uint64_t> counts, failures;
  for (const auto& w : WeylElem::all(n)) counts[w] = 0, failures[w] = 0;
  std::uint64_t total_failures = 0;
  for (const auto& g : all) {
    const auto f = bruhat_decompose(G, g);
    ++counts[f.w];
    if (!round_trip(g, f)) {
      ++failures[f.w];
      if (total_failures++ == 0) note_failure(r, "g = " + G.to_string(g) + " does not round-trip");
    }
  }

  // The map (b, w, u) -> b w u from the disjoint union of B x U''_w onto G
  // is surjective (every g decomposed); equal cardinalities make it a
  // bijection, so each decomposition is unique.
  std::uint64_t triples = 0, inclusion_failures = 0;
  for (const auto& [w, count] : counts) {
    std::uint64_t expected = B.size();
    for (int k = 0; k < w.length(); ++k) expected *= q;
    triples += expected;
    bool inclusion = true;
    for (int s = 1; s < n; ++s) {
      if (!check_inclusion_wrBw(G, s, w)) {
        inclusion = false;
        ++inclusion_failures;
        note_failure(r, "s_" + std::to_string(s) + " B " + w.to_string() + " B escapes B w B u B s w B");
      }
    }
    if (count != expected)
      note_failure(r, "cell " + w.to_string() + " has " + std::to_string(count) + " elements, expected " +
                          std::to_string(expected));
    r.items.push_back(Json{{"w", w.to_string()},
                           {"length", w.length()},
                           {"count", count},
                           {"expected", expected},
                           {"roundtrip_failures", failures[w]},
                           {"inclusion", inclusion}});
  }
  const bool unique = triples == all.size();
  if (!unique) note_failure(r, "sum of |B| q^l(w) is " + std::to_string(triples) + ", |G| is " +
                                   std::to_string(all.size()));
  r.summary = Json{{"n", n},
                   {"p", q},
                   {"elements", all.size()},
                   {"roundtrip_failures", total_failures},
                   {"triples", triples},
                   {"unique", unique},
                   {"inclusion_checks", (n - 1) * counts.size()},
                   {"inclusion_failures", inclusion_failures}};
  return r;
}

// ---------------------------------------------------------------------------
// growth-verify
// ---------------------------------------------------------------------------

Report run_growth(const GrowthParams& params, unsigned jobs) {
  Report r;
  r.command = "growth-verify";
  r.params = dump_params(params);
  auto G = make_group(params.n, params.p);
  const std::uint64_t q = params.p;
  const auto spec = growth_subgroup(params);
  const auto all = enumerate_group(G);
  const auto P = subgroup(G, spec);
  const std::string& set = params.set;

  if (set == "tightness") {
    if (spec.kind != SubgroupKind::Borel) throw UsageError("the tightness fixture uses subgroup=borel");
    // A = B u B w_1 B, itself a parabolic subgroup.
    ElemSet w(G, {weyl_rep(G, WeylElem::reflection(params.n, 1))});
    const auto A = set_union(P, product_through_subgroup(P, P, product(w, P)));
    const auto AP = product(A, P, jobs), PA = product(P, A, jobs);
    const auto g = verify_growth(A, P);
    const std::uint64_t expected = P.size() * (1 + q);
    const bool ok = A.size() == expected && AP == A && PA == A && g.ok();
    auto item = growth_item(0, "tightness", g);
    r.items.push_back(item);
    if (!ok) note_failure(r, "tightness fixture: |A| = " + std::to_string(A.size()) + ", expected " +
                                 std::to_string(expected));
    r.summary = Json{{"n", params.n},
                     {"p", q},
                     {"size_p", P.size()},
                     {"size_a", A.size()},
                     {"expected_size", expected},
                     {"ap_equals_a", AP == A},
                     {"pa_equals_a", PA == A},
                     {"growth_ok", g.ok()}};
    return r;
  }

  if (set == "qr") {
    if (params.n != 2) throw UsageError("the quadratic residue example lives in SL_2");
    if (params.p % 4 != 3) throw UsageError("the quadratic residue example needs p = 3 (mod 4)");
    if (params.n_max < 1) throw UsageError("n_max must be >= 1");
    const auto A = qr_fixture(G);
    const auto lower = subgroup(G, SubgroupSpec::lower_borel());
    const auto rep = power_intersect(A, lower, params.n_max);
    for (std::size_t i = 0; i < rep.power_sizes.size(); ++i) {
      const int k = static_cast<int>(i) + 1;
      r.items.push_back(Json{{"power", k},
                             {"size", rep.power_sizes[i]},
                             {"meets_lower_borel", rep.first_n.has_value() && k >= *rep.first_n}});
    }
    const bool a_clear = !intersects(A, lower);
    const bool a2_clear = !intersects(power(A, 2), lower);
    const bool ok = a_clear && a2_clear && (!rep.first_n || *rep.first_n >= 3);
    if (!ok) note_failure(r, "A^n meets the lower Borel at n = " +
                                 (rep.first_n ? std::to_string(*rep.first_n) : std::string("none")));
    r.summary = Json{{"n", 2},
                     {"p", q},
                     {"size_a", A.size()},
                     {"a_meets_lower", !a_clear},
                     {"a2_meets_lower", !a2_clear},
                     {"first_n", rep.first_n ? Json(*rep.first_n) : Json(nullptr)},
                     {"stabilized", rep.stabilized}};
    return r;
  }

  if (set == "rpgp") {
    const auto rep = check_r_pgp_all(P, all);
    r.items.push_back(Json{{"subgroup", spec.to_string()},
                           {"size_p", rep.size_p},
                           {"max_r", rep.max_r},
                           {"bound", 2 * rep.size_p / q},
                           {"double_cosets", rep.double_cosets},
                           {"sharp", rep.sharp},
                           {"ok", rep.bound_holds}});
    if (!rep.bound_holds)
      note_failure(r, "max r_{PgP} = " + std::to_string(rep.max_r) + " exceeds 2|P|/q");
    r.summary = Json{{"n", params.n},
                     {"p", q},
                     {"subgroup", spec.to_string()},
                     {"size_p", rep.size_p},
                     {"max_r", rep.max_r},
                     {"p_over_q", rep.size_p / q},
                     {"sharp", rep.sharp},
                     {"double_cosets", rep.double_cosets}};
    return r;
  }

  static const std::set<std::string> kinds{"random", "coset-subset", "coset-union", "mixed"};
  if (!kinds.count(set))
    throw UsageError("set must be random, coset-subset, coset-union, mixed, tightness, qr or rpgp");
  if (params.size > all.size())
    throw UsageError("size exceeds |G| = " + std::to_string(all.size()));

  std::vector<Json> items(params.trials);
  std::vector<char> oks(params.trials);
  parallel_for(params.trials, jobs, [&](std::size_t t) {
    auto rng = trial_rng(params.seed, t);
    const bool right = uniform_below(rng, 2) == 1;
    ElemSet A(G);
    if (set == "random") {
      const std::uint64_t cap = std::min<std::uint64_t>(all.size(), 3 * P.size());
      const auto k = params.size ? params.size : 1 + uniform_below(rng, cap);
      A = random_subset(all, k, rng);
    } else if (set == "coset-subset") {
      const auto C = random_coset(P, G, rng, right);
      const auto k = params.size ? std::min<std::uint64_t>(params.size, C.size())
                                 : 1 + uniform_below(rng, C.size());
      A = random_subset(C, k, rng);
    } else if (set == "coset-union") {
      const auto m = 1 + uniform_below(rng, 4);
      for (std::uint64_t i = 0; i < m; ++i) A = set_union(A, random_coset(P, G, rng, right));
    } else {  // mixed: a dense piece of one coset plus scattered points
      const auto C = random_coset(P, G, rng, right);
      A = random_subset(C, 1 + uniform_below(rng, C.size()), rng);
      A = set_union(A, random_subset(all, 1 + uniform_below(rng, P.size()), rng));
    }
    const auto g = verify_growth(A, P);
    items[t] = growth_item(t, set, g);
    oks[t] = g.ok();
  });

  std::uint64_t failures = 0, first_alt = 0, second_alt = 0;
  for (std::size_t t = 0; t < items.size(); ++t) {
    first_alt += items[t]["first_alternative"].get<bool>();
    second_alt += items[t]["second_alternative"].get<bool>();
    if (!oks[t]) {
      ++failures;
      note_failure(r, "trial " + std::to_string(t) + " (seed " + std::to_string(params.seed) +
                          "): " + items[t].dump());
    }
  }
  r.items = std::move(items);
  r.summary = Json{{"n", params.n},
                   {"p", q},
                   {"subgroup", spec.to_string()},
                   {"size_p", P.size()},
                   {"set", set},
                   {"trials", params.trials},
                   {"failures", failures},
                   {"first_alternative", first_alt},
                   {"second_alternative", second_alt}};
  return r;
}

// ---------------------------------------------------------------------------
// fourier-check
// ---------------------------------------------------------------------------

Report run_fourier(const FourierParams& params, unsigned jobs) {
  Report r;
  r.command = "fourier-check";
  r.params = dump_params(params);
  if (params.p % 2 == 0) throw UsageError("p must be an odd prime");
  if (!is_prime(params.p)) throw DomainError("modulus must be prime");
  if (params.p > 4000) throw UsageError("p above 4000 makes the (p-1)-dimensional transforms impractical");
  const AffGroup G(params.p);

  if (params.check == "borel-classes") {
    const auto count = borel_class_count(params.p);
    const bool identity = borel_dimension_identity(params.p);
    const std::uint64_t pm = params.p - 1;
    r.items.push_back(Json{{"trial", 0}, {"size", count}, {"value", count}, {"bound", params.p + 3},
                           {"pass", count == params.p + 3}});
    r.items.push_back(Json{{"trial", 1}, {"size", params.p * pm}, {"value", pm + pm * pm},
                           {"bound", params.p * pm}, {"pass", identity}});
    if (count != params.p + 3) note_failure(r, "Borel has " + std::to_string(count) + " classes, expected p+3");
    if (!identity) note_failure(r, "(p-1) + 4((p-1)/2)^2 != p(p-1)");
    r.summary = Json{{"p", params.p}, {"classes", count}, {"dimension_identity", identity}};
    return r;
  }

  static const std::set<std::string> names{"parseval", "inverse", "conv", "rep", "wiener", "opnorm", "coset-hit"};
  if (!names.count(params.check))
    throw UsageError("check must be parseval, inverse, conv, rep, wiener, opnorm, coset-hit or borel-classes");
  std::vector<FourierItem> slots(params.trials);
  parallel_for(params.trials, jobs, [&](std::size_t t) {
    auto rng = trial_rng(params.seed, t);
    slots[t] = fourier_trial(G, params.check, rng);
  });

  std::uint64_t passes = 0, fired = 0;
  double worst = 0;
  for (std::size_t t = 0; t < slots.size(); ++t) {
    const auto& it = slots[t];
    r.items.push_back(Json{{"trial", t}, {"size", it.size}, {"value", it.value}, {"bound", it.bound},
                           {"pass", it.pass}});
    passes += it.pass;
    fired += it.fired;
    worst = std::max(worst, params.check == "opnorm" ? it.value / it.bound : it.value);
    if (!it.pass)
      note_failure(r, params.check + " trial " + std::to_string(t) + ": value " + std::to_string(it.value) +
                          " vs bound " + std::to_string(it.bound));
  }
  r.summary = Json{{"p", params.p},
                   {"check", params.check},
                   {"trials", params.trials},
                   {"passes", passes},
                   {"failures", params.trials - passes},
                   {params.check == "opnorm" ? "max_ratio" : "max_value", worst}};
  if (params.check == "coset-hit") r.summary["condition_fired"] = fired;
  return r;
}

// ---------------------------------------------------------------------------
// zaremba
// ---------------------------------------------------------------------------

Report run_zaremba(const ZarembaParams& params, unsigned jobs) {
  Report r;
  r.command = "zaremba";
  r.params = dump_params(params);
  const auto alphabet = parse_alphabet(params.alphabet);
  ZarembaStrategy strategy;
  if (params.strategy == "dfs") strategy = ZarembaStrategy::Dfs;
  else if (params.strategy == "scan") strategy = ZarembaStrategy::AScan;
  else throw UsageError("strategy must be dfs or scan");
  const std::uint64_t hi = params.p_max ? params.p_max : params.p_min;
  if (hi > 100'000'000) throw UsageError("p_max above 1e8 is out of scope");

  std::vector<std::uint64_t> primes;
  for (std::uint64_t p = std::max<std::uint64_t>(2, params.p_min); p <= hi; ++p)
    if (is_prime(p)) primes.push_back(p);

  std::vector<std::optional<ZarembaResult>> results(primes.size());
  std::vector<char> valid(primes.size(), 1);
  parallel_for(primes.size(), jobs, [&](std::size_t i) {
    const auto p = primes[i];
    results[i] = zaremba_search(p, alphabet, params.multiple_limit ? params.multiple_limit : p, strategy);
    if (results[i]) valid[i] = zaremba_result_valid(*results[i], alphabet);
  });

  std::uint64_t misses = 0, invalid = 0, at_p = 0;
  double max_exp = 0, sum_exp = 0;
  std::optional<std::uint64_t> argmax;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    const auto& res = results[i];
    if (!res) {
      ++misses;
      note_failure(r, "no admissible a/q with q <= " +
                          std::to_string(params.multiple_limit ? params.multiple_limit : primes[i]) +
                          " p for p = " + std::to_string(primes[i]));
      r.items.push_back(Json{{"p", primes[i]}, {"found", false}, {"q", nullptr}, {"a", nullptr},
                             {"digits", nullptr}, {"multiple_index", nullptr}, {"exponent", nullptr}});
      continue;
    }
    if (!valid[i]) {
      ++invalid;
      note_failure(r, "result for p = " + std::to_string(primes[i]) + " fails re-expansion");
    }
    at_p += res->multiple_index == 1;
    sum_exp += res->exponent;
    if (!argmax || res->exponent > max_exp) max_exp = res->exponent, argmax = primes[i];
    r.items.push_back(Json{{"p", res->p},
                           {"found", true},
                           {"q", big_to_json(res->q)},
                           {"a", big_to_json(res->a)},
                           {"digits", digits_json(res->digits)},
                           {"multiple_index", res->multiple_index},
                           {"exponent", res->exponent}});
  }
  const auto found = primes.size() - misses;
  r.summary = Json{{"alphabet", alphabet_to_string(alphabet)},
                   {"p_min", params.p_min},
                   {"p_max", hi},
                   {"primes", primes.size()},
                   {"found", found},
                   {"misses", misses},
                   {"invalid", invalid},
                   {"q_equals_p", at_p},
                   {"max_exponent", found ? Json(max_exp) : Json(nullptr)},
                   {"max_exponent_p", argmax ? Json(*argmax) : Json(nullptr)},
                   {"mean_exponent", found ? Json(sum_exp / found) : Json(nullptr)}};
  return r;
}

// ---------------------------------------------------------------------------
// dimension
// ---------------------------------------------------------------------------

Report run_dimension(const DimensionParams& params, unsigned jobs) {
  Report r;
  r.command = "dimension";
  r.params = dump_params(params);
  const auto alphabet = parse_alphabet(params.alphabet);
  if (params.Q.size() < 2) throw UsageError("need >= 2 points");
  for (std::size_t i = 0; i < params.Q.size(); ++i) {
    if (params.Q[i] == 0 || (i && params.Q[i] <= params.Q[i - 1]))
      throw UsageError("Q values must be positive and strictly increasing");
  }
  if (params.Q.back() > 10'000'000'000ULL) throw UsageError("Q above 1e10 is out of scope");
  const auto est = dimension_estimate(alphabet, params.Q, jobs);
  for (const auto& [Q, count] : est.table) r.items.push_back(Json{{"Q", Q}, {"count", count}});

  r.summary = Json{{"alphabet", alphabet_to_string(alphabet)}, {"points", est.table.size()},
                   {"slope", est.slope}};
  if (alphabet == Alphabet{1, 2}) {
    // Hausdorff dimension of the {1,2} Cantor set.
    const double w2 = 0.5312805062772051416244686;
    const double lo = 2 * w2 - 0.05, hi = 2 * w2 + 0.05;
    r.summary["target"] = 2 * w2;
    r.summary["band"] = Json::array({lo, hi});
    if (est.slope < lo || est.slope > hi)
      note_failure(r, "slope " + std::to_string(est.slope) + " outside [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
  } else {
    r.summary["target"] = nullptr;
    r.summary["band"] = nullptr;
  }
  return r;
}

// ---------------------------------------------------------------------------
// cf-expand
// ---------------------------------------------------------------------------

Report run_cf_expand(const CfExpandParams& params) {
  Report r;
  r.command = "cf-expand";
  r.params = dump_params(params);

  if (params.check == "expand") {
    std::vector<BigInt> digits;
    BigInt a, q;
    if (!params.a.empty() || !params.q.empty()) {
      if (!params.digits.empty()) throw UsageError("give either a and q or digits, not both");
      a = parse_big(params.a, "a");
      q = parse_big(params.q, "q");
      digits = expand(a, q).digits;
    } else if (!params.digits.empty()) {
      for (auto d : parse_digit_list(params.digits)) digits.push_back(d);
    } else {
      throw UsageError("cf-expand needs a and q, or digits");
    }
    const auto c = continuant(digits);
    if (!params.digits.empty()) a = c.numerator(), q = c.denominator();
    const BigInt sign = digits.size() % 2 ? -1 : 1;
    const bool det_ok = c.det() == sign;
    const bool value_ok = c.numerator() == a && c.denominator() == q;
    const bool canonical = digits.empty() || digits.back() >= 2;
    r.items.push_back(Json{{"a", big_to_json(a)},
                           {"q", big_to_json(q)},
                           {"digits", digits_json(digits)},
                           {"length", digits.size()},
                           {"continuant", Json::array({Json::array({big_to_json(c.m[0][0]), big_to_json(c.m[0][1])}),
                                                       Json::array({big_to_json(c.m[1][0]), big_to_json(c.m[1][1])})})},
                           {"det", big_to_json(c.det())},
                           {"canonical", canonical},
                           {"ok", det_ok && value_ok}});
    if (!det_ok) note_failure(r, "det = " + c.det().str() + ", expected " + sign.str());
    if (!value_ok) note_failure(r, "continuant value differs from a/q");
    r.summary = Json{{"check", "expand"}, {"length", digits.size()}, {"canonical", canonical}};
    return r;
  }

  if (params.check != "identities") throw UsageError("check must be expand or identities");
  if (params.q_max > 20000) throw UsageError("q_max above 20000 is out of scope");
  if (params.length_max > 16 || params.digit_max < 1 || params.digit_max > 50)
    throw UsageError("length_max must be <= 16 and digit_max in 1..50");
  if (params.Q < 1 || params.Q > 5000) throw UsageError("Q must lie in 1..5000");

  auto add = [&](const std::string& check, std::uint64_t cases, std::uint64_t failures,
                 const std::string& witness) {
    r.items.push_back(Json{{"check", check}, {"cases", cases}, {"failures", failures}, {"ok", failures == 0}});
    if (failures) note_failure(r, check + ": " + witness);
  };

  {  // continuant(expand(a, q)) = (a, q)
    std::uint64_t cases = 0, failures = 0;
    std::string witness;
    for (std::uint64_t q = 2; q <= params.q_max; ++q)
      for (std::uint64_t a = 1; a < q; ++a) {
        if (std::gcd(a, q) != 1) continue;
        ++cases;
        const auto c = continuant(expand(a, q).digits);
        if (c.numerator() != a || c.denominator() != q) {
          if (!failures++) witness = std::to_string(a) + "/" + std::to_string(q);
        }
      }
    add("round_trip", cases, failures, witness);
  }

  {  // det = (-1)^s for every string of length <= length_max.
    std::uint64_t cases = 0, failures = 0, overflow = 0;
    std::string witness;
    std::vector<std::uint32_t> path;
    std::function<void(const Continuant64&)> walk = [&](const Continuant64& c) {
      ++cases;
      const __int128 sign = path.size() % 2 ? -1 : 1;
      if (c.det() != sign && !failures++) {
        witness.clear();
        for (auto d : path) witness += std::to_string(d) + ",";
      }
      if (path.size() == params.length_max) return;
      for (std::uint32_t b = 1; b <= params.digit_max; ++b) {
        Continuant64 next = c;
        if (!next.push(b)) {
          ++overflow;
          continue;
        }
        path.push_back(b);
        walk(next);
        path.pop_back();
      }
    };
    walk(Continuant64{});
    add("determinant", cases, failures + overflow, overflow ? "entries overflow 64 bits" : witness);
  }

  Alphabet wide;
  for (std::uint32_t d = 1; d <= params.digit_max; ++d) wide.insert(d);
  for (const Alphabet& alphabet : {Alphabet{1, 2}, wide}) {
    std::set<std::pair<std::uint64_t, std::uint64_t>> dfs, oracle{{0, 1}};
    std::uint64_t duplicates = 0;
    enumerate_F(alphabet, params.Q, [&](std::uint64_t u, std::uint64_t v, const std::vector<std::uint32_t>&) {
      duplicates += !dfs.insert({u, v}).second;
    });
    for (std::uint64_t v = 2; v <= params.Q; ++v)
      for (std::uint64_t u = 1; u < v; ++u)
        if (std::gcd(u, v) == 1 && euclid_in_alphabet(u, v, alphabet)) oracle.insert({u, v});
    std::uint64_t failures = duplicates;
    for (const auto& f : oracle) failures += !dfs.count(f);
    for (const auto& f : dfs) failures += !oracle.count(f);
    add("enumerate_F " + alphabet_to_string(alphabet), oracle.size(), failures,
        "DFS and Euclid disagree at Q = " + std::to_string(params.Q));
  }

  r.summary = Json{{"check", "identities"},
                   {"q_max", params.q_max},
                   {"length_max", params.length_max},
                   {"digit_max", params.digit_max},
                   {"Q", params.Q}};
  return r;
}

// ---------------------------------------------------------------------------
// modular-set
// ---------------------------------------------------------------------------

Report run_modular_set(const ModularSetParams& params, unsigned jobs) {
  (void)jobs;
  Report r;
  r.command = "modular-set";
  r.params = dump_params(params);
  auto G = make_group(2, params.p);
  const auto alphabet = parse_alphabet(params.alphabet);
  const auto parity = parse_parity(params.parity);
  const std::uint64_t p = params.p;
  const std::uint64_t Q = params.Q ? params.Q : p - 1;
  const std::uint64_t M = *alphabet.rbegin();

  auto add = [&](const std::string& check, Json lhs, Json rhs, bool holds, bool asserted) {
    r.items.push_back(Json{{"check", check}, {"lhs", lhs}, {"rhs", rhs}, {"holds", holds}, {"asserted", asserted}});
    if (asserted && !holds) note_failure(r, check + ": " + lhs.dump() + " vs " + rhs.dump());
  };

  if (parity != Parity::Even) {
    const auto even = matrix_set_mod_p_gl(alphabet, Q, params.p, Parity::Even);
    const auto chosen = matrix_set_mod_p_gl(alphabet, Q, params.p, parity);
    add("size", chosen.size(), nullptr, true, false);
    add("size_even", even.size(), nullptr, true, false);
    r.summary = Json{{"p", p}, {"alphabet", alphabet_to_string(alphabet)}, {"Q", Q}, {"parity", params.parity},
                     {"size_a", chosen.size()}, {"size_even", even.size()}};
    return r;
  }

  const auto A = matrix_set_mod_p(alphabet, Q, params.p, parity);
  const bool injective = matrix_set_injective(alphabet, Q, params.p, parity);
  add("injective", A.size(), nullptr, injective, Q < p);

  const auto s = verify_sigma_bounds(A, M);
  const std::uint64_t pa = p * A.size();
  add("sigma_B(A,A^-1) <= p|A|", s.sigma_a_ainv, pa, s.sigma_bound, true);
  add("sigma_B(A^-1,A) <= M^2 p|A|", s.sigma_ainv_a, M * M * pa, s.sigma_inv_bound, true);
  add("sigma_B(A^-1,A) <= M p|A|", s.sigma_ainv_a, M * pa, s.sigma_inv_bound_m, false);
  add("max |A cap gB| <= M p", s.max_left, M * p, s.max_left <= M * p, true);
  add("max |A cap Bg| <= M p", s.max_right, M * p, s.max_right <= M * p, true);
  add("max |A cap gBh|", s.max_double, nullptr, true, false);

  const auto L = lambda_set(params.p, alphabet, params.k);
  const std::uint64_t M4 = M * M * M * M;
  const auto T = subgroup(G, SubgroupSpec::torus());
  const auto B = subgroup(G, SubgroupSpec::borel());
  for (const auto* X : {&T, &B}) {
    const std::string name = X == &T ? "torus" : "borel";
    const auto e = lambda_energy_check(L, *X, M);
    const std::uint64_t lx = L.size() * X->size();
    add("E(L,X) = |L||X|, X=" + name, e.energy, lx, e.energy_equal, true);
    add("E(L^-1,X) <= M^4 |L||X|, X=" + name, e.energy_inv, M4 * lx, e.energy_inv_bound, true);
    if (name == "borel") {
      add("|BL| = |B||L|", e.size_b_lambda, B.size() * L.size(), e.b_lambda_exact, true);
      add("|LB| M^4 >= |B||L|", e.size_lambda_b * M4, B.size() * L.size(), e.lambda_b_bound, true);
    }
  }
  const auto sq = lambda_square_in_a(L, A);
  add("|L^2 \\ A| = 0", sq.outside_a, 0, sq.contained(), false);

  r.summary = Json{{"p", p},
                   {"alphabet", alphabet_to_string(alphabet)},
                   {"M", M},
                   {"Q", Q},
                   {"k", params.k},
                   {"size_a", A.size()},
                   {"size_lambda", L.size()},
                   {"size_lambda_sq", sq.size_lambda_sq}};
  if (params.aba) {
    const auto aba = aba_size(A, B);
    add("|ABA| / p^3", aba.ratio, nullptr, true, false);
    add("|A^-1 B A^-1| / p^3", aba.ratio_inv, nullptr, true, false);
    r.summary["aba_ratio"] = aba.ratio;
    r.summary["aba_ratio_inv"] = aba.ratio_inv;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"group-stats", "bruhat", "growth-verify", "fourier-check",
                                              "zaremba", "dimension", "cf-expand", "modular-set"};
  return names;
}

namespace {

template <class F>
auto dispatch(const std::string& command, F&& f) {
  if (command == "group-stats") return f(GroupStatsParams{});
  if (command == "bruhat") return f(BruhatParams{});
  if (command == "growth-verify") return f(GrowthParams{});
  if (command == "fourier-check") return f(FourierParams{});
  if (command == "zaremba") return f(ZarembaParams{});
  if (command == "dimension") return f(DimensionParams{});
  if (command == "cf-expand") return f(CfExpandParams{});
  if (command == "modular-set") return f(ModularSetParams{});
  throw UsageError("unknown command '" + command + "'");
}

Report run_typed(const GroupStatsParams& p, unsigned) { return run_group_stats(p); }
Report run_typed(const BruhatParams& p, unsigned) { return run_bruhat(p); }
Report run_typed(const GrowthParams& p, unsigned jobs) { return run_growth(p, jobs); }
Report run_typed(const FourierParams& p, unsigned jobs) { return run_fourier(p, jobs); }
Report run_typed(const ZarembaParams& p, unsigned jobs) { return run_zaremba(p, jobs); }
Report run_typed(const DimensionParams& p, unsigned jobs) { return run_dimension(p, jobs); }
Report run_typed(const CfExpandParams& p, unsigned) { return run_cf_expand(p); }
Report run_typed(const ModularSetParams& p, unsigned jobs) { return run_modular_set(p, jobs); }

template <class P>
constexpr bool has_seed = requires(P p) { p.seed; };

}  // namespace

Report run_command(const std::string& command, const Json& params, unsigned jobs, const std::string& where) {
  return dispatch(command, [&](auto tag) {
    using P = decltype(tag);
    return run_typed(load_params<P>(params, where), jobs);
  });
}

Json normalize_params(const std::string& command, const Json& params, const std::string& where) {
  return dispatch(command, [&](auto tag) {
    using P = decltype(tag);
    return dump_params(load_params<P>(params, where));
  });
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

namespace {

bool command_takes_seed(const std::string& command) {
  return dispatch(command, [](auto tag) { return has_seed<decltype(tag)>; });
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw UsageError("config: top level must be an object");
  ExperimentConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    if (key == "version") {
      if (!value.is_number_integer()) throw UsageError("version: expected integer");
      cfg.version = value.get<int>();
    } else if (key == "seed") {
      if (!read_value(value, cfg.seed)) throw UsageError("seed: expected non-negative integer");
    } else if (key == "description") {
      if (!value.is_string()) throw UsageError("description: expected string");
      cfg.description = value.get<std::string>();
    } else if (key == "runs") {
      if (!value.is_array()) throw UsageError("runs: expected array");
    } else {
      throw UsageError("unknown field " + key);
    }
  }
  if (!doc.contains("version")) throw UsageError("version: required field missing");
  if (cfg.version != 1) throw UsageError("version: unsupported value " + std::to_string(cfg.version));
  if (!doc.contains("runs")) throw UsageError("runs: required field missing");

  const auto& runs = doc["runs"];
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string where = "runs[" + std::to_string(i) + "]";
    const auto& run = runs[i];
    if (!run.is_object()) throw UsageError(where + ": expected object");
    RunSpec spec;
    for (const auto& [key, value] : run.items()) {
      if (key == "command") {
        if (!value.is_string()) throw UsageError(where + ".command: expected string");
        spec.command = value.get<std::string>();
      } else if (key == "label") {
        if (!value.is_string()) throw UsageError(where + ".label: expected string");
        spec.label = value.get<std::string>();
      } else if (key == "params") {
        if (!value.is_object()) throw UsageError(where + ".params: expected object");
        spec.params = value;
      } else {
        throw UsageError("unknown field " + where + "." + key);
      }
    }
    if (spec.command.empty()) throw UsageError(where + ".command: required field missing");
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), spec.command) == names.end())
      throw UsageError(where + ".command: unknown command '" + spec.command + "'");
    normalize_params(spec.command, spec.params, where + ".params");
    cfg.runs.push_back(std::move(spec));
  }
  return cfg;
}

Json run_experiment(const ExperimentConfig& config, unsigned jobs) {
  const auto start = std::chrono::steady_clock::now();
  Json runs = Json::array();
  Json timings = Json::array();
  std::uint64_t passed = 0, items = 0;
  for (std::size_t i = 0; i < config.runs.size(); ++i) {
    const auto& spec = config.runs[i];
    const std::string where = "runs[" + std::to_string(i) + "].params";
    Json params = spec.params;
    if (command_takes_seed(spec.command) && !params.contains("seed"))
      params["seed"] = splitmix64(config.seed + i);
    const auto t0 = std::chrono::steady_clock::now();
    auto report = run_command(spec.command, params, jobs, where);
    const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    timings.push_back(Json{{"label", spec.label}, {"elapsed_ms", std::llround(ms)}});
    Json run = report_to_json(report);
    if (!spec.label.empty()) {
      Json labelled = Json{{"label", spec.label}};
      labelled.update(run);
      run = std::move(labelled);
    }
    passed += report.passed;
    items += report.items.size();
    runs.push_back(std::move(run));
  }
  Json payload{{"version", config.version},
               {"seed", config.seed},
               {"description", config.description},
               {"runs", std::move(runs)},
               {"tallies", Json{{"runs", config.runs.size()},
                                {"passed", passed},
                                {"failed", config.runs.size() - passed},
                                {"items", items}}}};
  const auto total = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  Json meta{{"timestamp", timestamp_utc()},
            {"build", build_id()},
            {"jobs", jobs},
            {"elapsed_ms", std::llround(total)},
            {"runs", std::move(timings)},
            {"payload_digest", hex_digest(payload.dump())}};
  return Json{{"meta", std::move(meta)}, {"payload", std::move(payload)}};
}

ExperimentConfig config_from_record(const Json& record) {
  if (!record.is_object() || !record.contains("payload")) throw UsageError("record: missing payload");
  const auto& payload = record["payload"];
  Json doc{{"version", payload.value("version", 0)},
           {"seed", payload.value("seed", Json(1))},
           {"description", payload.value("description", std::string())},
           {"runs", Json::array()}};
  if (!payload.contains("runs") || !payload["runs"].is_array()) throw UsageError("record: missing runs");
  for (const auto& run : payload["runs"]) {
    Json spec{{"command", run.value("command", std::string())}, {"params", run.value("params", Json::object())}};
    if (run.contains("label")) spec["label"] = run["label"];
    doc["runs"].push_back(std::move(spec));
  }
  return parse_config(doc.dump());
}

bool record_passed(const Json& record) {
  const auto& t = record.at("payload").at("tallies");
  return t.at("failed").get<std::uint64_t>() == 0;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

Json report_to_json(const Report& report) {
  Json j{{"command", report.command},
         {"params", report.params},
         {"passed", report.passed},
         {"summary", report.summary},
         {"items", report.items}};
  if (!report.witness.empty()) j["witness"] = report.witness;
  return j;
}

namespace {

std::string cell(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "-";
  if (v.is_number_float()) {
    std::ostringstream os;
    os << std::setprecision(10) << v.get<double>();
    return os.str();
  }
  return v.dump();
}

std::string csv_cell(const Json& v) {
  std::string s = v.is_null() ? "" : cell(v);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> columns(const std::vector<Json>& items) {
  std::vector<std::string> cols;
  for (const auto& it : items)
    for (const auto& [k, v] : it.items())
      if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
  return cols;
}

}  // namespace

void emit(const Report& report, Format format, std::ostream& out) {
  if (format == Format::Json) {
    for (const auto& it : report.items) out << it.dump() << '\n';
    Json tail{{"command", report.command}, {"params", report.params}, {"passed", report.passed},
              {"summary", report.summary}};
    if (!report.witness.empty()) tail["witness"] = report.witness;
    out << tail.dump() << '\n';
    return;
  }
  const auto cols = columns(report.items);
  if (format == Format::Csv) {
    if (report.items.empty()) return;
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << csv_cell(cols[c]);
    out << '\n';
    for (const auto& it : report.items) {
      for (std::size_t c = 0; c < cols.size(); ++c)
        out << (c ? "," : "") << csv_cell(it.contains(cols[c]) ? it[cols[c]] : Json(nullptr));
      out << '\n';
    }
    return;
  }
  // An empty item list prints nothing, so an empty range stays empty.
  if (report.items.empty()) return;
  std::vector<std::size_t> width(cols.size());
  std::vector<std::vector<std::string>> rows;
  for (std::size_t c = 0; c < cols.size(); ++c) width[c] = cols[c].size();
  for (const auto& it : report.items) {
    std::vector<std::string> row;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      row.push_back(it.contains(cols[c]) ? cell(it[cols[c]]) : "-");
      width[c] = std::max(width[c], row.back().size());
    }
    rows.push_back(std::move(row));
  }
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c)
      out << (c ? "  " : "") << std::setw(static_cast<int>(width[c])) << row[c];
    out << '\n';
  };
  line(cols);
  for (const auto& row : rows) line(row);
  out << '\n';
  for (const auto& [k, v] : report.summary.items()) out << k << ": " << cell(v) << '\n';
  out << (report.passed ? "PASS" : "FAIL") << '\n';
}

int exit_code(const Report& report) { return report.passed ? 0 : 1; }

std::string build_id() { return PGROWTH_BUILD_ID; }

}  // namespace pgrowth::cli
