#pragma once

// Certified dense complex linear algebra: SVD with verified residuals, gap
// classification, the degree-2 monomial basis and its irreducible blocks.

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "w160/wiman_model.hpp"

namespace w160 {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Quadric15 = Eigen::Matrix<cd, 15, 1>;

inline constexpr double kUnitRoundoff = 0x1p-53;

class CertificationError : public std::runtime_error {
 public:
  CertificationError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

class GapViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exit/failure codes shared by the library and the CLI.
enum FailureCode : int {
  kFailModel = 10,
  kFailSvd = 11,
  kFailPartition = 12,
  kFailCensus = 13,
  kFailOracle = 14,
  kFailIc2 = 15,
  kFailWitness = 16,
  kFailSelftest = 17,
  kFailInput = 18,
};

inline constexpr double kMaxUnitaryResidual = 1e-14;
inline constexpr double kMaxReconResidual = 3e-14;

struct CertifiedSVD {
  CMat U;             // m x m, or m x p when thin
  Eigen::VectorXd D;  // p = min(m, n) values, nonincreasing
  CMat V;             // n x n, or n x p when thin
  int rows = 0;
  int cols = 0;
  bool thin = false;
  double residual_recon = 0.0;    // max |U D V^H - A| as computed
  double residual_unitary = 0.0;  // max of max |U^H U - I|, max |V^H V - I| as computed
  double recon_bound = 0.0;       // residual_recon plus its rounding allowance
  double unitary_bound_u = 0.0;
  double unitary_bound_v = 0.0;
  /// |sigma_k(A) - D_k| <= spectral_perturbation for every k.
  double spectral_perturbation = 0.0;
};

enum class SvdMode { Auto, Full, Thin };

/// Auto: full factors when max(m, n) <= 48, otherwise thin.
/// Throws CertificationError(kFailSvd) when a verified residual exceeds the
/// 1e-14 / 3e-14 thresholds.
CertifiedSVD svd_verified(const CMat& A, SvdMode mode = SvdMode::Auto);

struct Bands {
  double low_max = 0.0;
  double high_min = 0.0;
  double high_max = 0.0;
};

struct GapClass {
  int k_low = 0;
  int k_high = 0;
  int kernel_dim = 0;        // cols - k_high, including structural zeros
  double inflation = 0.0;
  double max_low = 0.0;      // largest computed value classified low (0 if none)
  double min_high = 0.0;     // smallest computed value classified high (inf if none)
};

/// Classifies every singular value after inflating both bands by
/// spectral_perturbation + extra.  Throws GapViolation if a value falls in
/// the gap or the gap does not survive the inflation.
GapClass classify_gap(const CertifiedSVD& svd, const Bands& bands, double extra = 0.0);

/// Same rule for a single nonnegative scalar with its own error bound.
bool classify_scalar(double value, const Bands& bands, double inflation);  // true = high band

/// Columns k_high..cols-1 of V.  Requires full V or rows >= cols.
CMat kernel_basis(const CertifiedSVD& svd, const GapClass& gap);

/// sin of the largest principal angle between the computed kernel and the
/// kernel of any matrix within delta_a (spectral norm) of A.
double kernel_angle_bound(const CertifiedSVD& svd, const GapClass& gap, double delta_a);

// ---------------------------------------------------------------------------
// Degree-2 monomials x_i x_k (i <= k) in lexicographic order.

int monomial_index(int i, int k);
std::pair<int, int> monomial_pair(int idx);

Quadric15 monomial_vector(const std::array<cd, 5>& p);

/// q(p) = sum_m q_m * monomial_m(p) (no conjugation).
cd eval_quadric(const Quadric15& q, const std::array<cd, 5>& p);

Quadric15 diag_quadric(const std::array<cd, 5>& c);

/// (g q)(g x) = q(x) for the signed coordinate permutation g.
Quadric15 act_on_quadric(const GroupElement& g, const Quadric15& q);

struct IrrepBlock {
  int begin;
  int size;
};

/// R1 = x_j x_{j+1} (5), R2 = x_j x_{j+2} (5), R3 = sum x_j^2 (1),
/// R4 = sum zeta^{+-j} x_j^2 (2), R5 = sum zeta^{+-2j} x_j^2 (2).
inline constexpr std::array<IrrepBlock, 5> kIrrepBlocks = {{{0, 5}, {5, 5}, {10, 1}, {11, 2}, {13, 2}}};

/// 15 x 15 unitary; column b is the b-th irrep basis quadric.
const CMat& irrep_basis();
/// Columns of blocks R1, R2, R5 (15 x 12).
const CMat& complement_basis();
/// Columns of blocks R3, R4 (15 x 3); span(Q_A, Q_B, Q_C).
const CMat& i2_basis();
/// Bound on |computed - exact| for every entry of irrep_basis().
double irrep_basis_error();

/// c = B^H q and back.
CVec to_irrep(const Quadric15& q);
Quadric15 from_irrep(const CVec& c);

/// M15 (n x 15 monomial rows) times complement_basis(): n x 12.  A kernel
/// vector c of the result is the quadric complement_basis() * c.
CMat project_out_i2(const CMat& m15);

/// Spectral norm of the block-b rows of B^H C.
double block_magnitude(const CMat& c, int block);

}  // namespace w160
