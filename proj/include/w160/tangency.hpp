#pragma once

// Three-stage numerical certificate that the sum of four theta
// characteristics is not 2K: set vanishing, tangency at double points,
// second-order contact at triple points.

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "w160/certlinalg.hpp"
#include "w160/wiman_model.hpp"

namespace w160 {

struct MultiplicityProfile {
  std::vector<std::pair<int, int>> entries;  // (point index, multiplicity), ascending index
  int n = 0;                                 // distinct points
  int n2 = 0;                                // points with multiplicity >= 2
  int triples = 0;                           // points with multiplicity exactly 3
  bool quadruple_plus = false;               // some multiplicity >= 4

  std::vector<int> distinct_points() const;
  int total() const;
};

MultiplicityProfile multiplicity_profile(const std::array<int, 4>& quad);

enum class CandidateReason { KernelFound, KernelDimGt1, MultGe4, GapViolation };
const char* to_string(CandidateReason r);

struct StageVerdict {
  bool certified = false;
  int stage = 0;  // 1..3 when certified, else the last stage run
  CandidateReason reason = CandidateReason::KernelFound;

  static StageVerdict Certified(int stage) { return {true, stage, CandidateReason::KernelFound}; }
  static StageVerdict Candidate(int stage, CandidateReason r) { return {false, stage, r}; }
};

/// Margins seen by one stage: the largest value put in the low band, the
/// smallest put in the high band (inf if none), and the inflation used.
struct StageStats {
  bool ran = false;
  double max_low = 0.0;
  double min_high = 0.0;
  double inflation = 0.0;
};

struct TangencyBands {
  // high band opens at 5e-3: one G0 orbit of 12-point quads has a true
  // smallest singular value 8.1e-3
  Bands stage1{1e-14, 5e-3, 1e3};
  Bands stage2{1e-13, 1e-2, 10.0};
  Bands stage3{1e-14, 1e-2, 10.0};
};

/// How a point of multiplicity >= 4 is handled.  Candidate: the quadruple is
/// not tested at all.  TestAsTriple: such a point only contributes the
/// double- and triple-point conditions, which are necessary for any
/// multiplicity >= 3.
enum class Mult4Policy { Candidate, TestAsTriple };

struct PerturbationBudget {
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
};

PerturbationBudget perturbation_budget(double eps, double delta, double gamma, double norm_p, double norm_q);

/// Coordinate k: 2 q_kk p_k + sum_{k' != k} q_kk' p_k'.
std::array<cd, 5> gradient_at(const Quadric15& q, const std::array<cd, 5>& p);

/// (p, e_j) with j the zero coordinate of p.
std::pair<std::array<cd, 5>, std::array<cd, 5>> tangent_pair(const CurvePoint& p);

struct Stage1Result {
  std::optional<StageVerdict> verdict;  // set when the pipeline stops here
  std::vector<Quadric15> kernel;        // unit quadrics spanning the computed kernel
  double delta = 0.0;                   // coefficient error of each kernel quadric
  StageStats stats;
};

Stage1Result stage1_vanishing(const MultiplicityProfile& profile, const TangencyBands& bands = {});
/// Same on arbitrary points with coordinate error eps.
Stage1Result stage1_vanishing_points(const std::vector<std::array<cd, 5>>& pts, double eps,
                                     const TangencyBands& bands = {});

struct Stage2Result {
  std::optional<StageVerdict> verdict;
  Quadric15 f = Quadric15::Zero();
  double delta = 0.0;  // coefficient error of f
  StageStats stats;
};

/// `points` are the multiple points to test (multiplicity >= 2).
Stage2Result stage2_double(const std::vector<int>& points, const Stage1Result& s1, const TangencyBands& bands = {});

struct LagrangeCoeffs {
  cd l0, l1, l2;
  double residual = 0.0;  // |lambda_1 (left) - lambda_1 (right)|
};

LagrangeCoeffs lagrange_coeffs(const std::array<cd, 5>& grad_f, const CurvePoint& p);

struct Stage3Result {
  bool evaluated = false;  // false: Lagrange residual above 1e-10
  bool high = false;       // certified non-vanishing
  double value = 0.0;      // |2 (f_jj - l0 - phi l1 - l2)|
  double inflation = 0.0;
  double gamma = 0.0;
};

inline constexpr double kMaxLagrangeResidual = 1e-10;

/// Throws GapViolation when the value falls between the bands.
Stage3Result stage3_triple(const Quadric15& f, double delta, const CurvePoint& p, const TangencyBands& bands = {});

struct QuadrupleTrace {
  StageVerdict verdict;
  StageStats s1, s2, s3;
  int k1 = 0;
};

/// The full pipeline; GapViolation anywhere yields Candidate(gap-violation).
QuadrupleTrace certify_quadruple(const std::array<int, 4>& quad, Mult4Policy policy = Mult4Policy::TestAsTriple,
                                 const TangencyBands& bands = {});

}  // namespace w160
