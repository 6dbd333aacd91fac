#pragma once

// Orbit sweep over all 4-subsets of the 160 thetas, the relation R on theta
// pairs induced by the uncertified set A, and its check against the
// 510-class Steiner partition.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "w160/symplectic_f2.hpp"
#include "w160/tangency.hpp"

namespace w160 {

using Quad = std::array<int, 4>;
using ThetaPair = std::pair<int, int>;  // first < second

inline constexpr std::int64_t kNumQuads = 26294360;  // C(160, 4)
inline constexpr int kNumPairs = 12720;              // C(160, 2)

/// Colexicographic rank of an ascending 4-set, in [0, C(160,4)).
std::int64_t quad_rank(const Quad& q);
Quad quad_unrank(std::int64_t r);
int pair_rank(ThetaPair p);
ThetaPair pair_unrank(int r);

/// g applied to every element, re-sorted.
Quad act_on_quad(const GroupElement& g, const Quad& q);

struct OrbitRep {
  Quad quad{};
  int orbit_size = 0;
};

/// Lexicographically minimal element of every G0-orbit on 4-sets, in
/// lexicographic order.
std::vector<OrbitRep> orbit_representatives();

struct SweepOptions {
  int threads = 1;
  Mult4Policy policy = Mult4Policy::TestAsTriple;
  TangencyBands bands;
  /// Certify only the first max_reps representatives (0 = all); for tests.
  std::size_t max_reps = 0;
  /// Called with (done, total) from the orchestrating thread.
  std::function<void(std::size_t, std::size_t)> progress;
};

/// Band margins and verdict counts over a sweep.
struct SweepStats {
  std::size_t representatives = 0;
  std::array<std::size_t, 4> certified_at{};  // index = stage, [0] unused
  std::size_t candidates = 0;
  std::array<std::size_t, 4> candidate_reason{};  // indexed by CandidateReason
  std::array<StageStats, 4> worst{};              // [s]: max low, min high, max inflation of stage s
};

struct SweepResult {
  std::vector<OrbitRep> reps;
  std::vector<StageVerdict> verdicts;  // parallel to reps
  SweepStats stats;
};

/// Deterministic for any thread count.
SweepResult sweep(const SweepOptions& opt);

struct SteinerClass {
  std::vector<ThetaPair> pairs;  // ascending
  int orbit = 0;                 // index into PartitionResult::orbits
  int within_family = 0;
  std::vector<std::pair<f2::Family, f2::Family>> family_pairs;  // distinct cross-family pairs
  std::vector<int> family_pair_counts;                          // parallel to family_pairs
};

struct ClassOrbit {
  std::vector<int> classes;  // ascending class ids
  int pairs_per_class = 0;
};

struct PartitionResult {
  std::vector<SteinerClass> classes;  // ordered by smallest pair
  std::vector<ClassOrbit> orbits;
  std::vector<f2::PartitionRow> table;  // rows by decreasing pair count
  std::size_t a_quads = 0;              // |A|
  std::size_t related_quads = 0;        // quads joining two pairs of one class
  SweepStats stats;
  std::vector<int> class_of_pair;  // pair_rank -> class id
};

/// Builds R from A = orbits of every uncertified representative and checks
/// completeness, absence of cross-class relations, 510 classes and the
/// census.  Throws CertificationError(kFailPartition or kFailCensus).
PartitionResult build_partition(const SweepResult& sweep);

struct CrosscheckReport {
  bool ok = true;
  std::vector<std::string> mismatches;
  int within_family_total = 0;
  int cross_family_total = 0;
};

/// Compares the numerical classes with the F2 predictions.
CrosscheckReport crosscheck_f2(const PartitionResult& result);

struct InvarianceReport {
  std::size_t samples = 0;
  std::size_t mismatches = 0;
};

/// Certifies g.rep for random (g, rep) and compares membership in A.
InvarianceReport sample_verdict_invariance(const SweepResult& sweep, std::size_t samples, std::uint64_t seed,
                                           const SweepOptions& opt);

}  // namespace w160
