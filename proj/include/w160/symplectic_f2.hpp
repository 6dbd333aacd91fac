#pragma once

// The 10-dimensional F2 symplectic model of the 2-torsion of the Jacobian,
// used as an independent combinatorial prediction of the Steiner classes.
//
// Bit k holds alpha_k and bit 5 + k holds alpha'_k (k = 0..4).  The only
// nontrivial pairings are <alpha_k, alpha'_k> = 1.

#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace w160::f2 {

using TwoTorsion = std::uint16_t;
using Family = std::pair<int, int>;  // unordered index pair i < j

inline constexpr TwoTorsion alpha(int k) { return static_cast<TwoTorsion>(1u << (((k % 5) + 5) % 5)); }
inline constexpr TwoTorsion alpha_prime(int k) { return static_cast<TwoTorsion>(1u << (5 + ((k % 5) + 5) % 5)); }
inline constexpr TwoTorsion kSumAlpha = 31;

int weil_pairing(TwoTorsion u, TwoTorsion v);

/// The quadratic form q0(c) = sum c_k c'_k whose odd points are the odd thetas.
int q0(TwoTorsion c);

/// The ten unordered index pairs in lexicographic order.
std::vector<Family> families();

std::array<TwoTorsion, 4> v_ij_basis(int i, int j);
/// All 16 elements of V_ij.
std::vector<TwoTorsion> v_ij(int i, int j);
/// The nonzero element of V_ij^perp lying in span(alpha'_k).
TwoTorsion eta_ij(int i, int j);

/// The unique coset of V_ij on which q0 is identically 1, sorted.
std::vector<TwoTorsion> odd_coset(int i, int j);

/// Differences x + y over unordered pairs {x, y}: within one family when
/// f1 == f2, otherwise over O_f1 x O_f2.
std::map<TwoTorsion, int> predict_difference_multiset(Family f1, Family f2);

/// Coordinate rotation alpha_k -> alpha_{k+1}, alpha'_k -> alpha'_{k+1}.
TwoTorsion rotate(TwoTorsion c, int r = 1);

/// Affine symplectic map c -> c + B(c') + tau, B symmetric acting on the
/// alpha' part and landing in the alpha part.
struct AffineFlip {
  std::array<std::uint8_t, 5> rows{};  // row r of B as a 5-bit mask
  TwoTorsion tau = 0;

  TwoTorsion apply(TwoTorsion c) const;
  TwoTorsion linear(TwoTorsion c) const { return static_cast<TwoTorsion>(apply(c) ^ apply(0)); }
};

/// Candidate maps for the sign flip of coordinate k: preserve q0, fix O_ij
/// pointwise when k is in {i, j} and translate it by a nonzero element of
/// V_ij otherwise.
std::vector<AffineFlip> sign_flip_candidates(int k);

/// The flips sigma_0..sigma_4, unique after requiring rotation covariance,
/// commutation and trivial product.  Throws std::runtime_error otherwise.
std::array<AffineFlip, 5> derive_sign_action();

struct SystemPrediction {
  TwoTorsion mu = 0;
  int pairs = 0;           // unordered pairs of odd thetas differing by mu
  int within_family = 0;   // of which both lie in one O_ij
  int family_pairs = 0;    // distinct unordered {O_ij, O_kl}, i.e. ij != kl, met by the cross pairs
  int orbit_size = 0;      // under rotations and the linear parts of the flips
};

/// One entry per nonzero difference, sorted by mu.
std::vector<SystemPrediction> predict_systems();

struct PartitionRow {
  int pairs = 0;
  int systems = 0;
  int orbits = 0;
  int orbit_size = 0;

  friend bool operator==(const PartitionRow&, const PartitionRow&) = default;
};

/// Rows sorted by decreasing pair count.
std::vector<PartitionRow> predict_partition_table();

}  // namespace w160::f2
