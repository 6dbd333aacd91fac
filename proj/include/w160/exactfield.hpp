#pragma once

// Exact arithmetic in the number field Q(i, a), a^4 + a^2 - 1 = 0, i^2 = -1.
//
// Every coordinate of the 40 special points of the Wiman curve, and every
// product of two coordinates, lives in this field.  Elements are stored as
// eight rationals over the basis a^k i^e (k = 0..3, e = 0..1).

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace w160 {

using Rational = mpq_class;

class FieldElem {
 public:
  static constexpr int kDim = 8;

  FieldElem() = default;
  FieldElem(long n) : coeffs_{} { coeffs_[0] = n; }  // NOLINT: implicit small-integer literals
  explicit FieldElem(const Rational& r) : coeffs_{} { coeffs_[0] = r; }

  static FieldElem from_coeffs(const std::array<Rational, kDim>& c);

  /// The real root a = 1/sqrt(phi) of t^4 + t^2 - 1 lying in (0, 1).
  static FieldElem a();
  static FieldElem i();
  /// phi = 1/a^2 = a^2 + 1.
  static FieldElem phi();

  /// Coefficient of a^k i^e.
  const Rational& coeff(int k, int e) const { return coeffs_[k + 4 * e]; }
  const std::array<Rational, kDim>& coeffs() const { return coeffs_; }

  bool is_zero() const;
  bool is_rational() const;

  FieldElem operator-() const;
  FieldElem& operator+=(const FieldElem& o);
  FieldElem& operator-=(const FieldElem& o);
  FieldElem& operator*=(const FieldElem& o);

  friend FieldElem operator+(FieldElem x, const FieldElem& y) { return x += y; }
  friend FieldElem operator-(FieldElem x, const FieldElem& y) { return x -= y; }
  friend FieldElem operator*(FieldElem x, const FieldElem& y) { return x *= y; }
  friend bool operator==(const FieldElem& x, const FieldElem& y) { return x.coeffs_ == y.coeffs_; }

  /// Field automorphism i -> -i.
  FieldElem conj_i() const;
  /// Field automorphism a -> -a.
  FieldElem negate_a() const;

  /// Throws std::domain_error on zero.
  FieldElem inverse() const;

  std::string to_string() const;

 private:
  std::array<Rational, kDim> coeffs_{};
};

FieldElem field_inv(const FieldElem& x);

/// A complex double together with a rigorous bound on |exact - value|.
struct EmbeddedValue {
  std::complex<double> value;
  double bound = 0.0;
};

/// The double nearest to a; |a - kAFloat| < 2^-53 a.
inline constexpr double kAFloat = 0x1.92826ef258d1bp-1;

/// Complex embedding sending a to the positive real root and i to +sqrt(-1).
/// The bound follows each floating operation with relative error 2^-53.
EmbeddedValue embed_float(const FieldElem& x);

class ExactMatrix {
 public:
  ExactMatrix() = default;
  ExactMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  FieldElem& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const FieldElem& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<FieldElem> data_;
};

using ExactVector = std::vector<FieldElem>;

/// Basis of the right kernel over Q(i, a).  Empty iff full column rank.
std::vector<ExactVector> exact_kernel(const ExactMatrix& m);

std::size_t exact_rank(const ExactMatrix& m);

/// A prime p together with roots of t^4 + t^2 - 1 and t^2 + 1 mod p; this
/// defines a ring homomorphism from the p-integral part of Q(i, a) to F_p.
struct ModularEmbedding {
  std::uint64_t p = 0;
  std::uint64_t root_a = 0;
  std::uint64_t root_i = 0;
};

class UnusablePrime : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Roots of both defining polynomials mod p, or nullopt if p is unusable.
std::optional<ModularEmbedding> modular_embedding(std::uint64_t p);

/// The smallest usable prime >= start (start < 2^62).
ModularEmbedding first_usable_prime(std::uint64_t start);

/// Rank of the reduction mod p.  Never exceeds the exact rank.
/// Throws UnusablePrime if some denominator is divisible by p.
std::size_t rank_mod_p(const ExactMatrix& m, const ModularEmbedding& emb);

}  // namespace w160
