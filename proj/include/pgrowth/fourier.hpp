#ifndef PGROWTH_FOURIER_HPP
#define PGROWTH_FOURIER_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgrowth/ff.hpp"
#include "pgrowth/group.hpp"
#include "pgrowth/setops.hpp"

namespace pgrowth {

/// Raised when an iterative numerical method fails to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The affine map x -> ax + b of F_p, a != 0.
struct AffElem {
  FieldElem a{1};
  FieldElem b{0};
  friend constexpr auto operator<=>(const AffElem&, const AffElem&) = default;
};

/// Aff(F_p) with composition (a,b)(a',b') = (aa', ab' + b). Elements are
/// indexed by (a - 1) p + b in [0, p(p-1)).
class AffGroup {
 public:
  explicit AffGroup(std::uint32_t p);

  std::uint32_t modulus() const { return field_.modulus(); }
  std::uint64_t order() const;
  const PrimeField& field() const { return field_; }
  const CharTable& chars() const { return chars_; }

  AffElem identity() const { return {}; }
  /// Throws DomainError if a = 0 (mod p).
  AffElem make(std::int64_t a, std::int64_t b) const;
  AffElem mul(const AffElem& g, const AffElem& h) const;
  AffElem inv(const AffElem& g) const;

  std::size_t index(const AffElem& g) const;
  AffElem elem(std::size_t i) const;
  std::vector<AffElem> all() const;

 private:
  PrimeField field_;
  CharTable chars_;
};

using AffSet = std::vector<AffElem>;  // sorted, no duplicates

/// Function G -> C as a table indexed by AffGroup::index.
using FunctionTable = std::vector<std::complex<double>>;

FunctionTable indicator(const AffGroup& G, const AffSet& A);
FunctionTable delta(const AffGroup& G, const AffElem& g);

AffSet aff_torus(const AffGroup& G);      // {(a, 0)}
AffSet aff_unipotent(const AffGroup& G);  // {(1, b)}
/// Smallest subgroup containing the generators.
AffSet aff_generated(const AffGroup& G, const std::vector<AffElem>& gens);
AffSet aff_random_subset(const AffGroup& G, std::size_t k, Rng& rng);

/// Irreducible representations of Aff(F_p): p-1 characters chi_j(a) and
/// one (p-1)-dimensional representation.
struct RepLabel {
  enum class Kind { OneDim, BigRep };
  Kind kind = Kind::OneDim;
  std::uint32_t j = 0;

  static RepLabel one_dim(std::uint32_t j) { return {Kind::OneDim, j}; }
  static RepLabel big() { return {Kind::BigRep, 0}; }
  std::uint32_t dim(std::uint32_t p) const { return kind == Kind::OneDim ? 1 : p - 1; }
  std::string to_string() const;
  friend constexpr auto operator<=>(const RepLabel&, const RepLabel&) = default;
};

/// OneDim(0), ..., OneDim(p-2), BigRep.
std::vector<RepLabel> rep_labels(std::uint32_t p);

/// Dense square complex matrix, row-major.
class CMatrix {
 public:
  CMatrix() = default;
  explicit CMatrix(std::size_t n) : n_(n), data_(n * n) {}
  static CMatrix identity(std::size_t n);

  std::size_t size() const { return n_; }
  std::complex<double>& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const std::complex<double>& operator()(std::size_t i, std::size_t j) const {
    return data_[i * n_ + j];
  }
  const std::vector<std::complex<double>>& data() const { return data_; }

  CMatrix operator*(const CMatrix& o) const;
  /// Hilbert-Schmidt (Frobenius) norm.
  double hs_norm() const;
  /// max_{ij} |a_ij - b_ij|.
  double max_abs_diff(const CMatrix& o) const;

 private:
  std::size_t n_ = 0;
  std::vector<std::complex<double>> data_;
};

/// rho(g). BigRep is indexed by x, y in F_p^* (row x - 1) with entry
/// e(bx/p) when y = ax and 0 otherwise.
CMatrix rep_eval(const AffGroup& G, RepLabel label, const AffElem& g);

/// Fourier coefficients f^(rho) = sum_g f(g) rho(g), one matrix per label
/// in rep_labels order.
struct FourierData {
  std::uint32_t p = 0;
  std::vector<CMatrix> mats;
  const CMatrix& at(RepLabel label) const;
};

FourierData fourier(const AffGroup& G, const FunctionTable& f);

/// f(g) = (1/|G|) sum_rho d_rho tr(f^(rho) rho(g^{-1})).
FunctionTable inverse(const AffGroup& G, const FourierData& F);

struct ParsevalResult {
  double lhs = 0;  // sum_g |f(g)|^2
  double rhs = 0;  // (1/|G|) sum_rho d_rho ||f^(rho)||^2
  bool pass = false;
};

ParsevalResult parseval_check(const AffGroup& G, const FunctionTable& f,
                              double tol = 1e-9);

/// (f * g)(x) = sum_y f(y) g(y^{-1} x).
FunctionTable convolve(const AffGroup& G, const FunctionTable& f,
                       const FunctionTable& g);

/// fourier(f * g) = fourier(f) fourier(g) entrywise, relative to the
/// Frobenius norm of each product.
bool convolution_check(const AffGroup& G, const FunctionTable& f,
                       const FunctionTable& g, double tol = 1e-9);

/// (1/|G|) sum_rho d_rho ||f^(rho)||_HS.
double wiener_norm(const AffGroup& G, const FunctionTable& f);

/// Largest singular value of F.at(label) by power iteration on M*M.
/// Throws NumericError if the iteration cap is reached.
double op_norm(const FourierData& F, RepLabel label, double tol = 1e-12,
               int max_iter = 200000);

/// True iff every nontrivial character chi of F_p^* has chi(a) != 1 for
/// some (a, b) in Gamma, i.e. the a-parts of Gamma generate F_p^*.
bool character_condition(const AffGroup& G, const AffSet& Gamma);

struct CosetHitReport {
  bool condition = false;  // |A|^n |Gamma|^2 > p^{n+2} (p-1)^2
  bool nonempty_z_gamma = false;
  bool nonempty_gamma_z = false;
  bool implication_ok() const {
    return !condition || (nonempty_z_gamma && nonempty_gamma_z);
  }
};

/// Throws PreconditionError if Gamma fails character_condition.
CosetHitReport coset_hit_check(const AffGroup& G, const AffSet& A,
                         const AffSet& Gamma, const AffElem& z, int n);

/// (lambda u | 0 lambda^{-1}) -> (lambda^2, lambda u). Throws
/// PreconditionError unless G is SL_2 and g is upper triangular.
AffElem borel_embed(const MatGroup& G, const GroupElem& g);

/// Number of conjugacy classes of the Borel subgroup of SL_2(F_p), by
/// orbit enumeration. Throws DomainError for p = 2.
std::uint64_t borel_class_count(std::uint32_t p);

/// (p-1) * 1 + 4 ((p-1)/2)^2 == p(p-1).
bool borel_dimension_identity(std::uint32_t p);

}  // namespace pgrowth

#endif  // PGROWTH_FOURIER_HPP
