#pragma once

// Theta hyperplanes, pair quadrics l_t1 l_t2, the spans of the Steiner
// classes and the certified intersection of those spans, which is I2(W).

#include <array>
#include <cstdint>
#include <vector>

#include "w160/steiner_partition.hpp"

namespace w160 {

struct ThetaHyperplane {
  int theta = 0;
  std::array<cd, 5> l{};         // unit norm, largest |l_k| real positive
  double point_residual = 0.0;    // max |l(p)| over the 4 points
  double contact_residual = 0.0;  // max |l(e_j)| over the 4 points, j = zero_coord
  double kernel_error = 0.0;      // sin of the angle to the exact hyperplane
};

inline constexpr double kHyperplaneTolerance = 1e-13;

/// Kernel of the 4 x 5 point matrix.  Throws CertificationError(kFailIc2)
/// when the kernel is not certified 1-dimensional or a residual exceeds
/// 1e-13.
ThetaHyperplane theta_hyperplane(const ThetaChar& t);
/// All 160, cached.
const std::vector<ThetaHyperplane>& theta_hyperplanes();

/// Symmetrized product l1 l2 in the monomial basis, unit-normalized.
Quadric15 pair_quadric(const std::array<cd, 5>& l1, const std::array<cd, 5>& l2);
Quadric15 pair_quadric(int t1, int t2);

/// 5 x 5 symmetric coefficient matrix of q (off-diagonal halves).
Eigen::Matrix<cd, 5, 5> symmetric_matrix(const Quadric15& q);

struct SpanBands {
  Bands span{1e-14, 1e-2, 10.0};
  Bands stack{1e-14, 1e-2, 1e3};
};

struct SteinerSpanReport {
  int class_id = 0;
  int quadric_count = 0;
  bool usable = false;         // false after a gap violation
  int span_dim = 0;
  CMat complement;             // 15 x (15 - span_dim), monomial basis, orthonormal
  double complement_error = 0.0;  // sin of the angle to the true complement
  std::array<double, 5> block_magnitude{};
  double max_low = 0.0;
  double min_high = 0.0;
  double inflation = 0.0;
  double span_residual = 0.0;  // max |w^H q| over complement w and class quadrics q
};

SteinerSpanReport steiner_span(int class_id, const std::vector<ThetaPair>& pairs, const SpanBands& bands = {});

struct Ic2Certificate {
  std::vector<SteinerSpanReport> reports;  // one per class
  int dim13_classes = 0;
  std::vector<int> good_orbits;            // orbits whose classes have span dim 13
  int stacked_rows = 0;
  int stacked_rank = 0;
  int intersection_dim = 0;
  CMat intersection;                       // 15 x 3, orthonormal columns
  double mutual_residual = 0.0;            // against span(Q_A, Q_B, Q_C)
  double point_residual = 0.0;             // intersection quadrics at the 40 points
  double equivariance_residual = 0.0;      // complements mapped by G0 inside each orbit
  double stack_min_high = 0.0;
  double stack_max_low = 0.0;
  double stack_inflation = 0.0;
  bool certified = false;
};

inline constexpr double kMutualTolerance = 1e-12;

/// Throws CertificationError(kFailIc2) when the complements do not reach
/// dimension 12 or the intersection is not span(Q_A, Q_B, Q_C).
Ic2Certificate intersect_and_certify(const PartitionResult& partition, const SpanBands& bands = {});

struct ReconstructReport {
  double special_residual = 0.0;   // 40 points
  int samples = 0;
  double sample_residual = 0.0;    // continued curve points
  double sample_on_curve = 0.0;    // Q_A, Q_+, Q_- at the samples
  double offcurve_residual = 0.0;  // smallest over trials of the largest |q|
};

/// Evaluates the intersection quadrics (columns, unit-normalized) on points
/// of W obtained by Newton continuation from the 40 special points.
ReconstructReport reconstruct_check(const CMat& intersection, int samples = 100, std::uint64_t seed = 1);

/// Span(Q_A, Q_B, Q_C) as 15 x 3 monomial columns, orthonormalized.
CMat i2_reference();

}  // namespace w160
