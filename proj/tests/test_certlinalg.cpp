#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "w160/certlinalg.hpp"
#include "w160/simd_kernels.hpp"
#include "reference_svd.hpp"

using namespace w160;
using namespace w160::reference;

TEST(CertLinalg, ZeroMatrix) {
  for (auto [m, n] : {std::pair{3, 5}, std::pair{5, 3}, std::pair{4, 4}}) {
    const auto s = svd_verified(CMat::Zero(m, n));
    EXPECT_EQ(s.residual_recon, 0.0);
    for (int k = 0; k < s.D.size(); ++k) EXPECT_EQ(s.D(k), 0.0);
  }
}

TEST(CertLinalg, IdentityAndDiagonal) {
  const auto s = svd_verified(CMat::Identity(5, 5));
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(s.D(k), 1.0, 1e-15);
  CMat d = CMat::Zero(4, 3);
  d(0, 0) = 1.0;
  d(1, 1) = 3.0;
  d(2, 2) = 2.0;
  const auto t = svd_verified(d);
  EXPECT_NEAR(t.D(0), 3.0, 1e-15);
  EXPECT_NEAR(t.D(1), 2.0, 1e-15);
  EXPECT_NEAR(t.D(2), 1.0, 1e-15);
}

TEST(CertLinalg, ClassifyGap) {
  CertifiedSVD s;
  s.cols = 2;
  s.D = Eigen::Vector2d(1.0, 1e-16);
  const Bands b{1e-14, 1e-2, 1e3};
  const auto g = classify_gap(s, b);
  EXPECT_EQ(g.k_low, 1);
  EXPECT_EQ(g.k_high, 1);
  EXPECT_EQ(g.kernel_dim, 1);
  s.D = Eigen::Vector2d(1.0, 1e-8);
  EXPECT_THROW(classify_gap(s, b), GapViolation);
  s.D = Eigen::Vector2d(1e4, 0.0);
  EXPECT_THROW(classify_gap(s, b), GapViolation);
  s.D = Eigen::Vector2d(1.0, 0.0);
  s.spectral_perturbation = 0.01;
  EXPECT_THROW(classify_gap(s, b), GapViolation);
}

TEST(CertLinalg, StructuralKernelForWideMatrices) {
  std::mt19937_64 rng(5);
  const auto s = svd_verified(random_matrix(rng, 3, 7));
  const auto g = classify_gap(s, {1e-14, 1e-2, 1e3});
  EXPECT_EQ(g.k_high, 3);
  EXPECT_EQ(g.kernel_dim, 4);
  EXPECT_EQ(kernel_basis(s, g).cols(), 4);
}

// 1000 random matrices within the 48 x 48 limit; enclosures checked against
// the binary128 reference on every 20th.
TEST(CertLinalg, RandomMatricesCertifyAndEnclose) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 48);
  int checked = 0;
  for (int t = 0; t < 1000; ++t) {
    const int m = dim(rng), n = dim(rng);
    const int rank = t % 3 == 0 ? std::uniform_int_distribution<int>(0, std::min(m, n))(rng) : -1;
    const CMat a = rank == 0 ? CMat::Zero(m, n) : random_matrix(rng, m, n, rank);
    CertifiedSVD s;
    ASSERT_NO_THROW(s = svd_verified(a)) << m << "x" << n;
    ASSERT_LE(s.residual_unitary, 1e-14);
    ASSERT_LE(s.residual_recon, 3e-14);
    const double norm2 = s.D.size() ? s.D(0) : 0.0;
    if (t % 20 == 0) {
      const auto ref = reference_singular_values(a);
      for (int k = 0; k < s.D.size(); ++k) {
        const f128 diff = fabsq(ref[k] - static_cast<f128>(s.D(k)));
        ASSERT_LE(static_cast<double>(diff), s.spectral_perturbation) << "t=" << t << " k=" << k;
      }
      if (!ref.empty()) {
        ASSERT_GE(static_cast<double>(ref[0]), norm2 - s.spectral_perturbation);
        ASSERT_LE(static_cast<double>(ref[0]), norm2 + s.spectral_perturbation);
      }
      ++checked;
    }
  }
  EXPECT_EQ(checked, 50);
}

TEST(CertLinalg, SimdKernelsAgreeWithScalar) {
  if (!simd::avx2_available()) GTEST_SKIP() << "no AVX2 on this CPU";
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> dim(1, 48);
  for (int t = 0; t < 300; ++t) {
    const int m = dim(rng), n = dim(rng), p = std::min(m, n);
    const CMat a = random_matrix(rng, m, n);
    Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const CMat u = svd.matrixU(), v = svd.matrixV();
    const Eigen::VectorXd d = svd.singularValues();
    const auto rs = simd::scalar::recon(u.data(), m, d.data(), v.data(), n, a.data(), m, m, n, p);
    const auto rv = simd::avx2::recon(u.data(), m, d.data(), v.data(), n, a.data(), m, m, n, p);
    ASSERT_LE(std::abs(rs.max_abs - rv.max_abs), rs.allowance + rv.allowance);
    ASSERT_NEAR(rs.allowance, rv.allowance, 1e-3 * rs.allowance + 1e-300);
    const auto gs = simd::scalar::gram(u.data(), m, m, m);
    const auto gv = simd::avx2::gram(u.data(), m, m, m);
    ASSERT_LE(std::abs(gs.max_abs - gv.max_abs), gs.allowance + gv.allowance);
    // a deliberately perturbed factor is seen identically by both
    CMat u2 = u;
    u2(0, 0) += 1e-9;
    const auto es = simd::scalar::gram(u2.data(), m, m, m);
    const auto ev = simd::avx2::gram(u2.data(), m, m, m);
    ASSERT_NEAR(es.max_abs, ev.max_abs, 1e-14);
    ASSERT_GT(es.max_abs, 1e-10);
  }
}

TEST(CertLinalg, PerturbedSvdIsRejected) {
  std::mt19937_64 rng(8);
  const CMat a = random_matrix(rng, 6, 6);
  EXPECT_NO_THROW(svd_verified(a));
  // a nonzero residual check through the public kernels
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  CMat u = svd.matrixU();
  u(2, 3) += 1e-12;
  const auto g = simd::gram_residual(u.data(), 6, 6, 6);
  EXPECT_GT(g.max_abs, kMaxUnitaryResidual);
}

TEST(CertLinalg, MonomialVector) {
  auto e = [](int k) {
    std::array<cd, 5> p{};
    p[k] = 1.0;
    return p;
  };
  Quadric15 v0 = monomial_vector(e(0)), v4 = monomial_vector(e(4));
  EXPECT_EQ(v0(0), cd(1.0));
  EXPECT_EQ(v0.tail(14).norm(), 0.0);
  EXPECT_EQ(v4(14), cd(1.0));
  EXPECT_EQ(v4.head(14).norm(), 0.0);
  const auto p0 = model().point(0).approx;
  // (ia)^2 = -a^2 = -0.6180339887498949
  EXPECT_NEAR(monomial_vector(p0)(0).real(), -0.6180339887498949, 1e-15);
  EXPECT_EQ(monomial_index(0, 1), 1);
  EXPECT_EQ(monomial_index(1, 1), 5);
  EXPECT_EQ(monomial_index(4, 4), 14);
  EXPECT_EQ(monomial_index(3, 1), monomial_index(1, 3));
}

TEST(CertLinalg, IrrepBasisUnitaryAndRoundTrip) {
  const CMat& b = irrep_basis();
  EXPECT_LE((b.adjoint() * b - CMat::Identity(15, 15)).cwiseAbs().maxCoeff(), 1e-14);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int t = 0; t < 1000; ++t) {
    Quadric15 q;
    for (int k = 0; k < 15; ++k) q(k) = cd(g(rng), g(rng));
    const Quadric15 back = from_irrep(to_irrep(q));
    ASSERT_LE((back - q).cwiseAbs().maxCoeff(), 1e-14);
    // norm split across the projection
    const CMat m = project_out_i2(q.transpose());
    const double rest = (i2_basis().transpose() * q).squaredNorm();
    ASSERT_NEAR(q.squaredNorm(), m.squaredNorm() + rest, 1e-12 * q.squaredNorm());
  }
}

TEST(CertLinalg, IrrepSupports) {
  const auto qa = diag_quadric({1, 1, 1, 1, 1});
  const auto qb = diag_quadric(quadric_B_float());
  const auto support = [](const CVec& c) {
    std::vector<int> s;
    for (int k = 0; k < 15; ++k)
      if (std::abs(c(k)) > 1e-14) s.push_back(k);
    return s;
  };
  EXPECT_EQ(support(to_irrep(qa)), std::vector<int>({10}));
  EXPECT_EQ(support(to_irrep(qb)), std::vector<int>({11}));
  EXPECT_EQ(support(to_irrep(diag_quadric(quadric_C_float()))), std::vector<int>({12}));
  Quadric15 x01 = Quadric15::Zero();
  x01(monomial_index(0, 1)) = 1.0;
  EXPECT_EQ(support(to_irrep(x01)), std::vector<int>({0}));
}

TEST(CertLinalg, I2BlockVanishesOnPointsAndMatchesQuadrics) {
  for (const auto& p : model().points()) {
    const CVec row = monomial_vector(p.approx).transpose() * i2_basis();
    EXPECT_LE(row.cwiseAbs().maxCoeff(), 1e-14);
  }
  CMat q(15, 3);
  q.col(0) = diag_quadric({1, 1, 1, 1, 1}).normalized();
  q.col(1) = diag_quadric(quadric_B_float()).normalized();
  q.col(2) = diag_quadric(quadric_C_float()).normalized();
  const CMat& r = i2_basis();
  EXPECT_LE((q - r * (r.adjoint() * q)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((r - q * (q.adjoint() * r)).cwiseAbs().maxCoeff(), 1e-14);
  // stacking I2 rows gives a zero projected matrix
  CMat rows = q.transpose();
  EXPECT_LE(project_out_i2(rows).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CertLinalg, IrrepBlocksAreGroupInvariant) {
  const CMat& b = irrep_basis();
  for (int g = 0; g < 80; ++g) {
    const auto ge = GroupElement::from_id(g);
    for (int col = 0; col < 15; ++col) {
      const Quadric15 img = act_on_quadric(ge, b.col(col));
      const CVec c = b.adjoint() * img;
      for (const auto& blk : kIrrepBlocks) {
        const bool inside = col >= blk.begin && col < blk.begin + blk.size;
        if (inside) continue;
        ASSERT_LE(c.segment(blk.begin, blk.size).cwiseAbs().maxCoeff(), 1e-14) << "g=" << g << " col=" << col;
      }
    }
  }
}
