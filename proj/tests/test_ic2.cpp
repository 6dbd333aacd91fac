#include <gtest/gtest.h>

#include <random>
#include <set>
#include <thread>

#include "w160/ic2_reconstruction.hpp"

using namespace w160;

namespace {

const PartitionResult& partition() {
  static const PartitionResult p = [] {
    SweepOptions opt;
    opt.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return build_partition(sweep(opt));
  }();
  return p;
}

const Ic2Certificate& certificate() {
  static const Ic2Certificate c = intersect_and_certify(partition());
  return c;
}

std::vector<int> pair_points(int t1, int t2) {
  std::set<int> s;
  for (int t : {t1, t2})
    for (int J : model().theta(t).points) s.insert(J);
  return {s.begin(), s.end()};
}

}  // namespace

TEST(Ic2, HyperplanesTouchAtTheirPoints) {
  const auto& hs = theta_hyperplanes();
  ASSERT_EQ(hs.size(), static_cast<std::size_t>(kNumThetas));
  for (const auto& h : hs) {
    double n2 = 0.0, big = 0.0;
    for (int k = 0; k < 5; ++k) {
      n2 += std::norm(h.l[k]);
      big = std::max(big, std::abs(h.l[k]));
    }
    int arg = 0;
    while (std::abs(h.l[arg]) < big * (1.0 - 1e-12)) ++arg;
    EXPECT_NEAR(n2, 1.0, 1e-14);
    EXPECT_EQ(h.l[arg].imag(), 0.0);
    EXPECT_GT(h.l[arg].real(), 0.0);
    EXPECT_LE(h.point_residual, kHyperplaneTolerance);
    EXPECT_LE(h.contact_residual, kHyperplaneTolerance);
    EXPECT_LT(h.kernel_error, 1e-10);
  }
}

TEST(Ic2, HyperplanesAreEquivariant) {
  const auto& hs = theta_hyperplanes();
  for (int gid = 0; gid < kGroupOrder; gid += 7) {
    const GroupElement g = GroupElement::from_id(gid);
    for (int t = 0; t < kNumThetas; t += 3) {
      // l_{g t}(g x) is proportional to l_t(x)
      const auto moved = act_on_coords(g.inverse(), hs[model().act_on_theta(g, t)].l);
      Eigen::Matrix<cd, 5, 2> m;
      for (int k = 0; k < 5; ++k) m(k, 0) = hs[t].l[k], m(k, 1) = moved[k];
      Eigen::JacobiSVD<Eigen::Matrix<cd, 5, 2>> svd(m);
      EXPECT_LT(svd.singularValues()(1), 1e-12) << "g=" << gid << " t=" << t;
    }
  }
}

TEST(Ic2, PairQuadricsHaveRankTwoAndVanishDoubly) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> pick(0, kNumThetas - 1);
  for (int trial = 0; trial < 200; ++trial) {
    int t1 = pick(rng), t2 = pick(rng);
    if (t1 == t2) continue;
    const Quadric15 q = pair_quadric(t1, t2);
    EXPECT_NEAR(q.norm(), 1.0, 1e-14);
    Eigen::JacobiSVD<Eigen::Matrix<cd, 5, 5>> svd(symmetric_matrix(q));
    EXPECT_GT(svd.singularValues()(1), 1e-3);
    EXPECT_LT(svd.singularValues()(2), 1e-14);
    for (int t : {t1, t2})
      for (int J : model().theta(t).points) {
        const auto& p = model().point(J);
        EXPECT_LT(std::abs(eval_quadric(q, p.approx)), 1e-13);
        EXPECT_LT(std::abs(gradient_at(q, p.approx)[p.zero_coord]), 1e-13);
      }
  }
}

TEST(Ic2, StageOneSeesHyperplaneProducts) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> pick(0, kNumThetas - 1);
  for (int trial = 0; trial < 100; ++trial) {
    const int t1 = pick(rng), t2 = pick(rng);
    if (t1 == t2) continue;
    std::vector<std::array<cd, 5>> pts;
    for (int J : pair_points(t1, t2)) pts.push_back(model().point(J).approx);
    const Stage1Result s1 = stage1_vanishing_points(pts, model().point_eps());
    EXPECT_FALSE(s1.verdict.has_value());
    EXPECT_GE(s1.kernel.size(), 1u);
  }
}

TEST(Ic2, UnrelatedPairsSpanEverything) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pick(0, kNumThetas - 1);
  std::vector<ThetaPair> pairs;
  while (pairs.size() < 24) {
    int a = pick(rng), b = pick(rng);
    if (a == b) continue;
    pairs.emplace_back(std::min(a, b), std::max(a, b));
  }
  const auto rep = steiner_span(0, pairs);
  ASSERT_TRUE(rep.usable);
  EXPECT_EQ(rep.span_dim, 15);
  EXPECT_EQ(rep.complement.cols(), 0);
}

TEST(Ic2, ClassSpans) {
  const auto& cert = certificate();
  const auto& part = partition();
  ASSERT_EQ(cert.reports.size(), part.classes.size());
  EXPECT_EQ(cert.dim13_classes, 240);
  EXPECT_EQ(cert.good_orbits.size(), 6u);
  for (int o : cert.good_orbits) {
    EXPECT_EQ(part.orbits[o].classes.size(), 40u);
    EXPECT_EQ(part.orbits[o].pairs_per_class, 24);
  }
  for (const auto& r : cert.reports) {
    ASSERT_TRUE(r.usable);
    EXPECT_LE(r.max_low, 1e-14);
    EXPECT_GE(r.min_high, 1e-2);
    EXPECT_LE(r.span_residual, 1e-12);
    if (r.span_dim != 13) continue;
    // I2 lies in the span
    EXPECT_LE(r.block_magnitude[2], 1e-13);
    EXPECT_LE(r.block_magnitude[3], 1e-13);
    for (int b : {0, 1, 4}) {
      EXPECT_GE(r.block_magnitude[b], 0.3);
      EXPECT_LE(r.block_magnitude[b], 1.0 + 1e-12);
    }
  }
  EXPECT_LE(cert.equivariance_residual, 1e-12);
}

TEST(Ic2, IntersectionIsI2) {
  const auto& cert = certificate();
  EXPECT_TRUE(cert.certified);
  EXPECT_EQ(cert.stacked_rows, 480);
  EXPECT_EQ(cert.stacked_rank, 12);
  EXPECT_EQ(cert.intersection_dim, 3);
  EXPECT_LE(cert.mutual_residual, kMutualTolerance);
  EXPECT_LE(cert.point_residual, kMutualTolerance);
  EXPECT_LE(cert.stack_max_low, 1e-14);
  EXPECT_GE(cert.stack_min_high, 1e-2);
}

TEST(Ic2, ReconstructionOnContinuedPoints) {
  const auto rep = reconstruct_check(certificate().intersection, 100, 11);
  EXPECT_EQ(rep.samples, 100);
  EXPECT_LE(rep.special_residual, 1e-12);
  EXPECT_LE(rep.sample_on_curve, 1e-12);
  EXPECT_LE(rep.sample_residual, 1e-8);
  EXPECT_GE(rep.offcurve_residual, 1e-2);
}

TEST(Ic2, WrongQuadricFailsReconstruction) {
  CMat x = certificate().intersection;
  x.col(2) = diag_quadric({1.0, 2.0, 3.0, 4.0, 5.0}).normalized();
  const auto rep = reconstruct_check(x, 20, 2);
  EXPECT_GT(rep.special_residual, 1e-2);
  EXPECT_GT(rep.sample_residual, 1e-2);
}

TEST(Ic2, TooFewClassesAreRejected) {
  PartitionResult small = partition();
  const auto& cert = certificate();
  // keep one class of span dimension 13 and drop the rest of its kind
  std::vector<SteinerClass> kept;
  bool have13 = false;
  for (std::size_t c = 0; c < small.classes.size(); ++c) {
    if (cert.reports[c].span_dim == 13) {
      if (have13) continue;
      have13 = true;
    }
    kept.push_back(small.classes[c]);
  }
  small.classes = kept;
  small.orbits.clear();
  try {
    intersect_and_certify(small);
    FAIL() << "expected a failure";
  } catch (const CertificationError& e) {
    EXPECT_EQ(e.code(), kFailIc2);
  }
}
