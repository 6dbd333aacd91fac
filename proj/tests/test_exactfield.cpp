#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "w160/exactfield.hpp"

using namespace w160;

namespace {

// 30-digit value of the real root of t^4 + t^2 - 1 in (0, 1), from an
// independent mpmath evaluation.
constexpr long double kAHigh = 0.786151377757423286069558585843L;

FieldElem random_elem(std::mt19937_64& rng, int range = 7) {
  std::uniform_int_distribution<int> num(-range, range), den(1, range);
  std::array<Rational, 8> c;
  for (auto& q : c) q = Rational(num(rng), den(rng));
  return FieldElem::from_coeffs(c);
}

}  // namespace

TEST(ExactField, DefiningRelations) {
  const FieldElem a = FieldElem::a(), i = FieldElem::i();
  EXPECT_TRUE((a * a * a * a + a * a - FieldElem(1)).is_zero());
  EXPECT_EQ(i * i, FieldElem(-1));
  EXPECT_EQ(FieldElem::phi() * a * a, FieldElem(1));
}

TEST(ExactField, InverseOfAIsPhi) {
  const FieldElem ia = field_inv(FieldElem::a());
  EXPECT_EQ(ia * ia, FieldElem::a() * FieldElem::a() + FieldElem(1));
}

TEST(ExactField, InverseOfZeroThrows) { EXPECT_THROW(field_inv(FieldElem(0)), std::domain_error); }

TEST(ExactField, FieldAxiomsOnRandomElements) {
  std::mt19937_64 rng(12345);
  for (int n = 0; n < 1000; ++n) {
    const FieldElem x = random_elem(rng), y = random_elem(rng), z = random_elem(rng);
    ASSERT_EQ((x * y) * z, x * (y * z));
    ASSERT_EQ(x * (y + z), x * y + x * z);
    ASSERT_EQ(x * y, y * x);
    if (!x.is_zero()) ASSERT_EQ(x * x.inverse(), FieldElem(1));
  }
}

TEST(ExactField, AutomorphismsAreMultiplicative) {
  std::mt19937_64 rng(7);
  for (int n = 0; n < 200; ++n) {
    const FieldElem x = random_elem(rng), y = random_elem(rng);
    ASSERT_EQ((x * y).conj_i(), x.conj_i() * y.conj_i());
    ASSERT_EQ((x * y).negate_a(), x.negate_a() * y.negate_a());
  }
}

TEST(ExactField, EmbedOneIsExact) {
  const auto e = embed_float(FieldElem(1));
  EXPECT_EQ(e.value, std::complex<double>(1.0, 0.0));
  EXPECT_EQ(e.bound, 0.0);
}

TEST(ExactField, EmbedA) {
  const auto e = embed_float(FieldElem::a());
  EXPECT_LE(e.bound, 2 * 0x1p-53);
  EXPECT_LE(std::abs(static_cast<long double>(e.value.real()) - kAHigh), e.bound);
  EXPECT_EQ(e.value.imag(), 0.0);
  EXPECT_NEAR(e.value.real(), 0.786151377757423, 1e-15);
}

TEST(ExactField, EmbedIA) {
  const auto e = embed_float(FieldElem::i() * FieldElem::a());
  EXPECT_EQ(e.value.real(), 0.0);
  EXPECT_LE(std::abs(static_cast<long double>(e.value.imag()) - kAHigh), e.bound);
  EXPECT_LE(e.bound, 2 * 0x1p-53);
}

TEST(ExactField, EmbedEnclosesHighPrecisionValue) {
  std::mt19937_64 rng(99);
  for (int n = 0; n < 500; ++n) {
    const FieldElem x = random_elem(rng, 50);
    long double re = 0, im = 0, pw = 1;
    for (int k = 0; k < 4; ++k) {
      re += static_cast<long double>(x.coeff(k, 0).get_d()) * pw;
      im += static_cast<long double>(x.coeff(k, 1).get_d()) * pw;
      pw *= kAHigh;
    }
    const auto e = embed_float(x);
    // long double reference carries its own ~1e-18 relative rounding
    const long double slack = 1e-17L * (std::abs(re) + std::abs(im) + 1);
    ASSERT_LE(std::hypot(static_cast<long double>(e.value.real()) - re, static_cast<long double>(e.value.imag()) - im),
              e.bound + slack);
  }
}

TEST(ExactField, EmbedIsApproximateHomomorphism) {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 500; ++n) {
    const FieldElem x = random_elem(rng), y = random_elem(rng);
    const auto ex = embed_float(x), ey = embed_float(y), exy = embed_float(x * y);
    const double combined = exy.bound + std::abs(ex.value) * ey.bound + std::abs(ey.value) * ex.bound +
                            ex.bound * ey.bound + 4 * 0x1p-53 * std::abs(ex.value * ey.value);
    ASSERT_LE(std::abs(exy.value - ex.value * ey.value), combined);
  }
}

TEST(ExactField, KernelOfIdentityIsEmpty) {
  ExactMatrix m(3, 3);
  for (int k = 0; k < 3; ++k) m(k, k) = 1;
  EXPECT_TRUE(exact_kernel(m).empty());
  EXPECT_EQ(exact_rank(m), 3u);
}

TEST(ExactField, KernelOfEqualRows) {
  ExactMatrix m(2, 2);
  m(0, 0) = 1;
  m(0, 1) = FieldElem::a();
  m(1, 0) = 1;
  m(1, 1) = FieldElem::a();
  const auto ker = exact_kernel(m);
  ASSERT_EQ(ker.size(), 1u);
  EXPECT_EQ(ker[0][0], -FieldElem::a());
  EXPECT_EQ(ker[0][1], FieldElem(1));
}

TEST(ExactField, RankNullityAndModularScreen) {
  std::mt19937_64 rng(11);
  const auto emb = first_usable_prime(1ULL << 40);
  for (int n = 0; n < 40; ++n) {
    const int rows = 2 + n % 5, cols = 2 + (n / 5) % 5, rank = 1 + n % 3;
    // product of random rows x cols factors of inner dimension `rank`
    ExactMatrix l(rows, rank), r(rank, cols), m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int k = 0; k < rank; ++k) l(i, k) = random_elem(rng, 3);
    for (int k = 0; k < rank; ++k)
      for (int j = 0; j < cols; ++j) r(k, j) = random_elem(rng, 3);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        for (int k = 0; k < rank; ++k) m(i, j) += l(i, k) * r(k, j);
    const auto ker = exact_kernel(m);
    const std::size_t rk = exact_rank(m);
    ASSERT_EQ(ker.size() + rk, static_cast<std::size_t>(cols));
    ASSERT_LE(rk, static_cast<std::size_t>(std::min({rows, cols, rank})));
    for (const auto& v : ker) {
      for (int i = 0; i < rows; ++i) {
        FieldElem s;
        for (int j = 0; j < cols; ++j) s += m(i, j) * v[j];
        ASSERT_TRUE(s.is_zero());
      }
    }
    ASSERT_LE(rank_mod_p(m, emb), rk);
  }
}

TEST(ExactField, ModularRankTrivialCases) {
  const auto emb = first_usable_prime(1000);
  ExactMatrix id(3, 3), zero(3, 4);
  for (int k = 0; k < 3; ++k) id(k, k) = 1;
  EXPECT_EQ(rank_mod_p(id, emb), 3u);
  EXPECT_EQ(rank_mod_p(zero, emb), 0u);
}

TEST(ExactField, ModularEmbeddingRoots) {
  const auto emb = first_usable_prime((1ULL << 61) + 1);
  const unsigned __int128 p = emb.p;
  const auto sq = [&](unsigned __int128 x) { return x * x % p; };
  const unsigned __int128 a2 = sq(emb.root_a);
  EXPECT_EQ((sq(a2) + a2 + p - 1) % p, 0u);
  EXPECT_EQ((sq(emb.root_i) + 1) % p, 0u);
  EXPECT_FALSE(modular_embedding(3).has_value());
  EXPECT_FALSE(modular_embedding(15).has_value());
}

TEST(ExactField, ModularDenominatorClash) {
  const auto emb = first_usable_prime(100);
  ExactMatrix m(1, 1);
  m(0, 0) = FieldElem(Rational(1, static_cast<long>(emb.p)));
  EXPECT_THROW(rank_mod_p(m, emb), UnusablePrime);
}
