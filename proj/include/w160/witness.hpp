#pragma once

// Spanning-tree witnesses for Steiner classes.  Every listed quadruple has
// 16 distinct points and an exactly rank-deficient monomial matrix, so the
// two pairs it joins differ by the same 2-torsion class.  Verification runs
// in Q(i, a) only.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "w160/steiner_partition.hpp"

namespace w160 {

struct Witness {
  int class_id = -1;
  std::vector<Quad> quads;             // ascending theta indices
  std::vector<ThetaPair> class_pairs;  // empty: the class is inferred from the quads
};

/// The 23-quadruple witness for one 24-pair class, as published.
const Witness& reference_witness();

/// True when the 16 points of the four thetas are pairwise distinct.
bool distinct_points(const Quad& q);

/// Exact monomial rows of the distinct points of the four thetas (16 x 15
/// when the points are distinct).
ExactMatrix witness_matrix(const Quad& q);

struct QuadrupleCheck {
  Quad quad{};
  bool distinct = false;
  bool i2_in_kernel = false;    // Q_A, Q_+, Q_- annihilate every row exactly
  std::size_t rank_mod_p = 0;   // screen only
  std::size_t exact_rank = 0;   // of the 16 x 15 monomial matrix
  bool ok = false;              // distinct, I2 in kernel, exact rank <= 11
};

/// Exact check of one quadruple; rank_mod_p uses emb.
QuadrupleCheck check_quadruple_exact(const Quad& q, const ModularEmbedding& emb);

struct WitnessEdge {
  Quad quad{};
  ThetaPair a, b;
};

struct WitnessCertificate {
  bool valid = false;
  std::vector<QuadrupleCheck> checks;
  std::vector<WitnessEdge> edges;
  std::vector<ThetaPair> vertices;  // pairs reached by the edges, ascending
  bool tree = false;                // connected, |edges| = |vertices| - 1
  bool spans_class = false;         // vertices == class_pairs (true when inferred)
  std::uint64_t prime = 0;
  std::vector<std::string> problems;
};

/// Float-free.  The quadruple checks run on `threads` workers.
WitnessCertificate verify_witness_exact(const Witness& w, int threads = 1);

/// Greedy BFS over the class's pairs from the smallest one, neighbours in
/// lexicographic order, joining two pairs when their 16 points are distinct.
/// nullopt when the compatibility graph is disconnected.
std::optional<Witness> find_witness(int class_id, const std::vector<ThetaPair>& pairs);

struct WitnessCoverage {
  int classes = 0;
  int connected = 0;
  std::vector<int> disconnected;  // class ids
};

WitnessCoverage witness_coverage(const PartitionResult& partition);

}  // namespace w160
