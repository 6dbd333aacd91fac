#include <gtest/gtest.h>

#include <set>

#include "w160/symplectic_f2.hpp"

using namespace w160::f2;

TEST(SymplecticF2, WeilPairing) {
  EXPECT_EQ(weil_pairing(alpha(0), alpha_prime(0)), 1);
  EXPECT_EQ(weil_pairing(alpha(0), alpha(1)), 0);
  EXPECT_EQ(weil_pairing(alpha(2), alpha_prime(3)), 0);
  for (unsigned u = 0; u < 1024; ++u) {
    EXPECT_EQ(weil_pairing(static_cast<TwoTorsion>(u), static_cast<TwoTorsion>(u)), 0);
    for (unsigned v = 0; v < 1024; v += 37)
      EXPECT_EQ(weil_pairing(static_cast<TwoTorsion>(u), static_cast<TwoTorsion>(v)),
                weil_pairing(static_cast<TwoTorsion>(v), static_cast<TwoTorsion>(u)));
  }
}

TEST(SymplecticF2, VijIsotropicDimFour) {
  for (const auto& [i, j] : families()) {
    const auto v = v_ij(i, j);
    EXPECT_EQ(v.size(), 16u);
    for (auto x : v)
      for (auto y : v) EXPECT_EQ(weil_pairing(x, y), 0);
  }
  EXPECT_THROW(v_ij(2, 2), std::invalid_argument);
}

TEST(SymplecticF2, EtaExamples) {
  EXPECT_EQ(eta_ij(0, 1), alpha_prime(3));
  EXPECT_EQ(eta_ij(0, 2), alpha_prime(4) ^ alpha_prime(1) ^ alpha_prime(3));
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(eta_ij(i, i + 1), alpha_prime(i + 3));
    EXPECT_EQ(eta_ij(i, i + 2), alpha_prime(i + 4) ^ alpha_prime(i + 1) ^ alpha_prime(i + 3));
  }
}

TEST(SymplecticF2, OddCosets) {
  int odd = 0;
  for (unsigned c = 0; c < 1024; ++c) odd += q0(static_cast<TwoTorsion>(c));
  EXPECT_EQ(odd, 496);
  std::set<TwoTorsion> all;
  for (const auto& [i, j] : families()) {
    const auto o = odd_coset(i, j);
    EXPECT_EQ(o.size(), 16u);
    all.insert(o.begin(), o.end());
  }
  EXPECT_EQ(all.size(), 160u);
}

TEST(SymplecticF2, SameFamilyDifferences) {
  for (const auto& f : families()) {
    const auto m = predict_difference_multiset(f, f);
    const auto v = v_ij(f.first, f.second);
    EXPECT_EQ(m.size(), 15u);
    int total = 0;
    for (const auto& [mu, n] : m) {
      EXPECT_EQ(n, 8);
      EXPECT_TRUE(std::binary_search(v.begin(), v.end(), mu));
      total += n;
    }
    EXPECT_EQ(total, 120);
  }
}

TEST(SymplecticF2, DistinctFamilyDifferences) {
  const auto fams = families();
  std::map<TwoTorsion, int> incidence;
  for (std::size_t a = 0; a < fams.size(); ++a) {
    for (std::size_t b = a + 1; b < fams.size(); ++b) {
      const auto m = predict_difference_multiset(fams[a], fams[b]);
      // each of 32 differences appears 8 times among the 256 cross pairs
      EXPECT_EQ(m.size(), 32u);
      for (const auto& [mu, n] : m) {
        EXPECT_EQ(n, 8);
        ++incidence[mu];
      }
    }
  }
  // differences that are not in any V_ij come from exactly three family pairs
  std::set<TwoTorsion> in_v;
  for (const auto& [i, j] : fams)
    for (auto x : v_ij(i, j)) in_v.insert(x);
  int checked = 0;
  for (const auto& [mu, n] : incidence) {
    if (in_v.count(mu)) continue;
    EXPECT_EQ(n, 3) << mu;
    ++checked;
  }
  EXPECT_EQ(checked, 480);
}

TEST(SymplecticF2, DifferenceUnionIsPerpOfSumAlpha) {
  std::set<TwoTorsion> expected;
  for (unsigned c = 1; c < 1024; ++c)
    if (c != kSumAlpha && weil_pairing(static_cast<TwoTorsion>(c), kSumAlpha) == 0)
      expected.insert(static_cast<TwoTorsion>(c));
  std::set<TwoTorsion> got;
  int total = 0;
  for (const auto& s : predict_systems()) {
    got.insert(s.mu);
    total += s.pairs;
  }
  EXPECT_EQ(got, expected);
  EXPECT_EQ(got.size(), 510u);
  EXPECT_EQ(total, 12720);
}

TEST(SymplecticF2, SignActionIsUniqueAndSymplectic) {
  const auto sig = derive_sign_action();
  for (const auto& s : sig) {
    for (unsigned u = 0; u < 1024; u += 7)
      for (unsigned v = 0; v < 1024; v += 13)
        EXPECT_EQ(weil_pairing(s.linear(static_cast<TwoTorsion>(u)), s.linear(static_cast<TwoTorsion>(v))),
                  weil_pairing(static_cast<TwoTorsion>(u), static_cast<TwoTorsion>(v)));
  }
  EXPECT_EQ(sign_flip_candidates(0).size(), 8u);
}

TEST(SymplecticF2, PartitionTable) {
  const std::vector<PartitionRow> expected = {{48, 15, 3, 5}, {32, 15, 3, 5}, {24, 480, 12, 40}};
  EXPECT_EQ(predict_partition_table(), expected);
}

TEST(SymplecticF2, SystemShapes) {
  std::set<TwoTorsion> big;
  int within = 0, cross = 0;
  for (const auto& s : predict_systems()) {
    if (s.pairs == 48) big.insert(s.mu);
    within += s.within_family;
    cross += s.pairs - s.within_family;
    if (s.pairs == 24) {
      EXPECT_EQ(s.within_family, 0);
      EXPECT_EQ(s.family_pairs, 3);
    }
  }
  EXPECT_EQ(within, 1200);
  EXPECT_EQ(cross, 11520);
  std::set<TwoTorsion> shapes;
  for (int k = 0; k < 5; ++k) {
    shapes.insert(alpha(k));
    shapes.insert(alpha(k) ^ alpha(k + 2));
    shapes.insert(kSumAlpha ^ alpha(k) ^ alpha(k + 1));
  }
  EXPECT_EQ(big, shapes);
}
