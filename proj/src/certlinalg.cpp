#include "w160/certlinalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "w160/simd_kernels.hpp"

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace w160 {

namespace {

using LMat = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;

void factorize(const CMat& A, bool thin, bool extended, CertifiedSVD& out) {
  const int m = static_cast<int>(A.rows()), n = static_cast<int>(A.cols()), p = std::min(m, n);
  if (extended) {
    const unsigned opts = thin ? (Eigen::ComputeThinU | Eigen::ComputeThinV) : (Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::JacobiSVD<LMat> svd(A.cast<std::complex<long double>>(), opts);
    out.U = svd.matrixU().cast<cd>();
    out.V = svd.matrixV().cast<cd>();
    out.D = svd.singularValues().cast<double>();
    return;
  }
  CMat a = A;
  const int ucols = thin ? p : m, vrows = thin ? p : n;
  out.U.resize(m, ucols);
  CMat vh(vrows, n);
  out.D.resize(p);
  std::vector<double> superb(std::max(1, p - 1));
  const char job = thin ? 'S' : 'A';
  const int info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, job, job, m, n, a.data(), m, out.D.data(), out.U.data(), m,
                                  vh.data(), vrows, superb.data());
  if (info != 0) throw CertificationError(kFailSvd, "zgesvd failed to converge, info " + std::to_string(info));
  out.V = vh.adjoint();
}

void verify(const CMat& A, CertifiedSVD& out) {
  const int m = out.rows, n = out.cols, p = std::min(m, n);
  const auto rec = simd::recon_residual(out.U.data(), static_cast<int>(out.U.rows()), out.D.data(), out.V.data(),
                                        static_cast<int>(out.V.rows()), A.data(), static_cast<int>(A.rows()), m, n, p);
  const auto gu = simd::gram_residual(out.U.data(), m, m, static_cast<int>(out.U.cols()));
  const auto gv = simd::gram_residual(out.V.data(), n, n, static_cast<int>(out.V.cols()));
  out.residual_recon = rec.max_abs;
  out.residual_unitary = std::max(gu.max_abs, gv.max_abs);
  out.recon_bound = rec.max_abs + rec.allowance;
  out.unitary_bound_u = gu.max_abs + gu.allowance;
  out.unitary_bound_v = gv.max_abs + gv.allowance;
}

bool within_thresholds(const CertifiedSVD& s) {
  return s.residual_unitary <= kMaxUnitaryResidual && s.residual_recon <= kMaxReconResidual;
}

}  // namespace

CertifiedSVD svd_verified(const CMat& A, SvdMode mode) {
  const int m = static_cast<int>(A.rows()), n = static_cast<int>(A.cols());
  const int p = std::min(m, n);
  CertifiedSVD out;
  out.rows = m;
  out.cols = n;
  out.thin = mode == SvdMode::Thin || (mode == SvdMode::Auto && std::max(m, n) > 48);
  if (m == 0 || n == 0) {
    out.U = CMat::Identity(m, out.thin ? p : m);
    out.V = CMat::Identity(n, out.thin ? p : n);
    out.D.resize(0);
    return out;
  }
  factorize(A, out.thin, false, out);
  verify(A, out);
  if (!within_thresholds(out)) {
    // factors computed in extended precision and rounded are orthonormal to
    // about one ulp
    factorize(A, out.thin, true, out);
    verify(A, out);
  }
  if (!(out.residual_unitary <= kMaxUnitaryResidual))
    throw CertificationError(kFailSvd, "SVD unitarity residual " + std::to_string(out.residual_unitary));
  if (!(out.residual_recon <= kMaxReconResidual))
    throw CertificationError(kFailSvd, "SVD reconstruction residual " + std::to_string(out.residual_recon));

  // Weyl for the entrywise residual (Frobenius bound), plus the multiplicative
  // distortion of D by the nearly orthonormal leading p columns of U and V.
  const double dmax = out.D.size() ? out.D(0) : 0.0;
  out.spectral_perturbation = std::sqrt(static_cast<double>(m) * n) * out.recon_bound +
                              dmax * (p * out.unitary_bound_u + p * out.unitary_bound_v);
  out.spectral_perturbation *= 1.0 + 8 * kUnitRoundoff;
  return out;
}

GapClass classify_gap(const CertifiedSVD& svd, const Bands& bands, double extra) {
  GapClass g;
  g.inflation = svd.spectral_perturbation + extra;
  g.min_high = std::numeric_limits<double>::infinity();
  if (!(bands.low_max + 2 * g.inflation < bands.high_min))
    throw GapViolation("gap consumed by perturbation: inflation " + std::to_string(g.inflation));
  for (int k = 0; k < svd.D.size(); ++k) {
    const double s = svd.D(k);
    if (s <= bands.low_max + g.inflation) {
      ++g.k_low;
      g.max_low = std::max(g.max_low, s);
    } else if (s >= bands.high_min - g.inflation && s <= bands.high_max + g.inflation) {
      ++g.k_high;
      g.min_high = std::min(g.min_high, s);
    } else {
      throw GapViolation("singular value " + std::to_string(s) + " outside both bands");
    }
  }
  g.kernel_dim = svd.cols - g.k_high;
  return g;
}

bool classify_scalar(double value, const Bands& bands, double inflation) {
  if (!(bands.low_max + 2 * inflation < bands.high_min))
    throw GapViolation("gap consumed by perturbation: inflation " + std::to_string(inflation));
  if (value <= bands.low_max + inflation) return false;
  if (value >= bands.high_min - inflation && value <= bands.high_max + inflation) return true;
  throw GapViolation("value " + std::to_string(value) + " outside both bands");
}

CMat kernel_basis(const CertifiedSVD& svd, const GapClass& gap) {
  if (svd.V.cols() != svd.cols) throw std::logic_error("kernel_basis needs the full right factor");
  return svd.V.rightCols(gap.kernel_dim);
}

double kernel_angle_bound(const CertifiedSVD& svd, const GapClass& gap, double delta_a) {
  if (gap.kernel_dim == 0) return 0.0;
  const double residual = gap.max_low + gap.inflation + delta_a;
  const double separation = gap.k_high ? gap.min_high - gap.inflation - delta_a : 0.0;
  if (gap.k_high && separation <= 0) throw GapViolation("kernel not separated from the spectrum");
  const double angle = gap.k_high ? residual / separation : 0.0;
  return std::min(1.0, angle + svd.cols * svd.unitary_bound_v);
}

// ---------------------------------------------------------------------------

int monomial_index(int i, int k) {
  if (i > k) std::swap(i, k);
  // rows i = 0..4 contribute 5, 4, 3, 2, 1 monomials
  return i * 5 - i * (i - 1) / 2 + (k - i);
}

std::pair<int, int> monomial_pair(int idx) {
  for (int i = 0; i < 5; ++i)
    for (int k = i; k < 5; ++k)
      if (monomial_index(i, k) == idx) return {i, k};
  throw std::out_of_range("monomial index");
}

Quadric15 monomial_vector(const std::array<cd, 5>& p) {
  Quadric15 v;
  int idx = 0;
  for (int i = 0; i < 5; ++i)
    for (int k = i; k < 5; ++k) v(idx++) = p[i] * p[k];
  return v;
}

cd eval_quadric(const Quadric15& q, const std::array<cd, 5>& p) { return monomial_vector(p).transpose() * q; }

Quadric15 diag_quadric(const std::array<cd, 5>& c) {
  Quadric15 q = Quadric15::Zero();
  for (int k = 0; k < 5; ++k) q(monomial_index(k, k)) = c[k];
  return q;
}

Quadric15 act_on_quadric(const GroupElement& g, const Quadric15& q) {
  const auto sp = g.signed_permutation();
  Quadric15 out = Quadric15::Zero();
  for (int idx = 0; idx < 15; ++idx) {
    const auto [i, k] = monomial_pair(idx);
    out(monomial_index(sp[i].first, sp[k].first)) = q(idx) * static_cast<double>(sp[i].second * sp[k].second);
  }
  return out;
}

namespace {

CMat build_irrep_basis() {
  CMat b = CMat::Zero(15, 15);
  for (int j = 0; j < 5; ++j) {
    b(monomial_index(j, (j + 1) % 5), j) = 1.0;
    b(monomial_index(j, (j + 2) % 5), 5 + j) = 1.0;
  }
  const double s5 = 1.0 / std::sqrt(5.0);
  const std::array<int, 5> freq = {0, 1, -1, 2, -2};
  for (int c = 0; c < 5; ++c) {
    for (int j = 0; j < 5; ++j) {
      const int e = ((freq[c] * j) % 5 + 5) % 5;
      b(monomial_index(j, j), 10 + c) = std::polar(s5, 2.0 * std::numbers::pi * e / 5.0);
    }
  }
  return b;
}

}  // namespace

const CMat& irrep_basis() {
  static const CMat b = build_irrep_basis();
  return b;
}

const CMat& complement_basis() {
  static const CMat c = [] {
    CMat out(15, 12);
    out.leftCols(10) = irrep_basis().leftCols(10);
    out.rightCols(2) = irrep_basis().rightCols(2);
    return out;
  }();
  return c;
}

const CMat& i2_basis() {
  static const CMat c = irrep_basis().middleCols(10, 3);
  return c;
}

// 1/sqrt(5) and the polar form each contribute a few ulps.
double irrep_basis_error() { return 8 * kUnitRoundoff; }

CVec to_irrep(const Quadric15& q) { return irrep_basis().adjoint() * q; }

Quadric15 from_irrep(const CVec& c) { return irrep_basis() * c; }

CMat project_out_i2(const CMat& m15) { return m15 * complement_basis(); }

double block_magnitude(const CMat& c, int block) {
  const auto& blk = kIrrepBlocks.at(block);
  if (c.cols() == 0) return 0.0;
  const CMat proj = irrep_basis().middleCols(blk.begin, blk.size).adjoint() * c;
  Eigen::JacobiSVD<CMat> svd(proj);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

}  // namespace w160
