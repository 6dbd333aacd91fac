#include "w160/tangency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace w160 {

namespace {

const double kPhi = (1.0 + std::sqrt(5.0)) / 2.0;

double gamma_n(int n) { return n * kUnitRoundoff / (1.0 - n * kUnitRoundoff); }

StageStats stats_of(const GapClass& g) { return {true, g.max_low, g.min_high, g.inflation}; }

struct PointScale {
  double norm = 0.0;
  double eps = 0.0;
};

PointScale scale_of(const std::vector<int>& pts) {
  PointScale s;
  for (int J : pts) {
    const auto& p = model().point(J);
    s.norm = std::max(s.norm, p.norm());
    s.eps = std::max(s.eps, p.eps());
  }
  return s;
}

}  // namespace

std::vector<int> MultiplicityProfile::distinct_points() const {
  std::vector<int> out;
  out.reserve(entries.size());
  for (const auto& [J, m] : entries) out.push_back(J);
  return out;
}

int MultiplicityProfile::total() const {
  int t = 0;
  for (const auto& e : entries) t += e.second;
  return t;
}

MultiplicityProfile multiplicity_profile(const std::array<int, 4>& quad) {
  std::array<int, kNumPoints> count{};
  for (int t : quad)
    for (int J : model().theta(t).points) ++count[J];
  MultiplicityProfile prof;
  for (int J = 0; J < kNumPoints; ++J) {
    if (!count[J]) continue;
    prof.entries.emplace_back(J, count[J]);
    ++prof.n;
    if (count[J] >= 2) ++prof.n2;
    if (count[J] == 3) ++prof.triples;
    if (count[J] >= 4) prof.quadruple_plus = true;
  }
  return prof;
}

const char* to_string(CandidateReason r) {
  switch (r) {
    case CandidateReason::KernelFound:
      return "kernel-found";
    case CandidateReason::KernelDimGt1:
      return "kernel-dim>1";
    case CandidateReason::MultGe4:
      return "mult>=4";
    case CandidateReason::GapViolation:
      return "gap-violation";
  }
  return "?";
}

PerturbationBudget perturbation_budget(double eps, double delta, double gamma, double norm_p, double norm_q) {
  // differences expanded, so nothing is lost to rounding (1 + eps)
  const double p = norm_p, q = norm_q;
  const double lin = p * delta + eps * q + eps * delta;
  const double quad = p * p * delta + 2.0 * p * eps * q + 2.0 * p * eps * delta + eps * eps * q + eps * eps * delta;
  PerturbationBudget b;
  b.b1 = 15.0 * quad;
  b.b2 = 25.0 * lin;
  b.b3 = 2.0 * delta + 6.0 * kPhi * gamma + 50.0 * lin;
  return b;
}

std::array<cd, 5> gradient_at(const Quadric15& q, const std::array<cd, 5>& p) {
  std::array<cd, 5> g{};
  for (int k = 0; k < 5; ++k) {
    cd s = 2.0 * q(monomial_index(k, k)) * p[k];
    for (int m = 0; m < 5; ++m)
      if (m != k) s += q(monomial_index(k, m)) * p[m];
    g[k] = s;
  }
  return g;
}

std::pair<std::array<cd, 5>, std::array<cd, 5>> tangent_pair(const CurvePoint& p) {
  std::array<cd, 5> e{};
  e[p.zero_coord] = 1.0;
  return {p.approx, e};
}

Stage1Result stage1_vanishing(const MultiplicityProfile& profile, const TangencyBands& bands) {
  const auto pts = profile.distinct_points();
  const PointScale sc = scale_of(pts);
  std::vector<std::array<cd, 5>> coords;
  coords.reserve(pts.size());
  for (int J : pts) coords.push_back(model().point(J).approx);
  return stage1_vanishing_points(coords, sc.eps, bands);
}

Stage1Result stage1_vanishing_points(const std::vector<std::array<cd, 5>>& pts, double eps, const TangencyBands& bands) {
  Stage1Result res;
  const int n = static_cast<int>(pts.size());
  double norm = 0.0;
  for (const auto& p : pts) {
    double s = 0.0;
    for (const auto& x : p) s += std::norm(x);
    norm = std::max(norm, std::sqrt(s));
  }

  CMat m15(n, 15);
  for (int r = 0; r < n; ++r) m15.row(r) = monomial_vector(pts[r]).transpose();
  const CMat m = project_out_i2(m15);

  // entry = sum over 15 monomials of p_i p_k B_mc, B columns of unit norm
  const double entry =
      perturbation_budget(eps, irrep_basis_error(), 0.0, norm, 1.0).b1 + 15.0 * gamma_n(32) * norm * norm;
  const double delta_a = std::sqrt(12.0 * n) * entry;

  const CertifiedSVD svd = svd_verified(m);
  const GapClass gap = classify_gap(svd, bands.stage1, delta_a);
  res.stats = stats_of(gap);
  if (gap.kernel_dim == 0) {
    res.verdict = StageVerdict::Certified(1);
    return res;
  }
  const CMat ker = kernel_basis(svd, gap);
  for (int c = 0; c < ker.cols(); ++c) res.kernel.push_back(complement_basis() * ker.col(c));
  const double sq12 = std::sqrt(12.0);
  res.delta = kernel_angle_bound(svd, gap, 0.0) + sq12 * irrep_basis_error() + sq12 * gamma_n(16);
  return res;
}

Stage2Result stage2_double(const std::vector<int>& points, const Stage1Result& s1, const TangencyBands& bands) {
  Stage2Result res;
  const int n2 = static_cast<int>(points.size());
  const int k1 = static_cast<int>(s1.kernel.size());
  const PointScale sc = scale_of(points);

  CMat m2(2 * n2, k1);
  for (int r = 0; r < n2; ++r) {
    const auto& p = model().point(points[r]);
    const auto [fiber, ej] = tangent_pair(p);
    for (int i = 0; i < k1; ++i) {
      const auto g = gradient_at(s1.kernel[i], p.approx);
      cd along_fiber = 0.0;
      for (int k = 0; k < 5; ++k) along_fiber += g[k] * fiber[k];
      m2(2 * r, i) = along_fiber;
      m2(2 * r + 1, i) = g[p.zero_coord];
    }
  }

  // fiber rows are 2 q(p), quadratic in p; e_j rows are linear
  const auto b = perturbation_budget(sc.eps, s1.delta, 0.0, sc.norm, 1.0);
  const double entry = std::max(b.b2, 2.0 * b.b1) + gamma_n(64) * (25.0 * sc.norm + 30.0 * sc.norm * sc.norm);
  const double delta_a = std::sqrt(2.0 * n2 * k1) * entry;

  const CertifiedSVD svd = svd_verified(m2);
  const GapClass gap = classify_gap(svd, bands.stage2, delta_a);
  res.stats = stats_of(gap);
  if (gap.kernel_dim == 0) {
    res.verdict = StageVerdict::Certified(2);
    return res;
  }
  if (gap.kernel_dim > 1) {
    res.verdict = StageVerdict::Candidate(2, CandidateReason::KernelDimGt1);
    return res;
  }
  const CVec lambda = kernel_basis(svd, gap).col(0);
  for (int i = 0; i < k1; ++i) res.f += lambda(i) * s1.kernel[i];
  const double theta = kernel_angle_bound(svd, gap, 0.0);
  const double rk = std::sqrt(static_cast<double>(k1));
  res.delta = rk * (theta * (1.0 + s1.delta) + s1.delta) + rk * gamma_n(2 * k1 + 4);
  return res;
}

LagrangeCoeffs lagrange_coeffs(const std::array<cd, 5>& grad_f, const CurvePoint& p) {
  const int j = p.zero_coord;
  auto at = [&](int off) { return (j + off + 5) % 5; };
  auto half = [&](int off) { return grad_f[at(off)] / (2.0 * p.approx[at(off)]); };
  LagrangeCoeffs lc;
  lc.l0 = half(-2);
  lc.l2 = half(2);
  const cd left = half(-1) - kPhi * lc.l0;
  const cd right = half(1) - kPhi * lc.l2;
  lc.l1 = 0.5 * (left + right);
  lc.residual = std::abs(left - right);
  return lc;
}

Stage3Result stage3_triple(const Quadric15& f, double delta, const CurvePoint& p, const TangencyBands& bands) {
  Stage3Result res;
  const auto g = gradient_at(f, p.approx);
  const LagrangeCoeffs lc = lagrange_coeffs(g, p);
  res.gamma = lc.residual;
  if (!(lc.residual <= kMaxLagrangeResidual)) return res;
  res.evaluated = true;
  const int j = p.zero_coord;
  res.value = std::abs(2.0 * (f(monomial_index(j, j)) - lc.l0 - kPhi * lc.l1 - lc.l2));
  const double norm_f = f.norm();
  res.inflation = perturbation_budget(p.eps(), delta, lc.residual, p.norm(), norm_f).b3 +
                  50.0 * gamma_n(64) * p.norm() * std::max(norm_f, 1.0);
  res.high = classify_scalar(res.value, bands.stage3, res.inflation);
  return res;
}

QuadrupleTrace certify_quadruple(const std::array<int, 4>& quad, Mult4Policy policy, const TangencyBands& bands) {
  QuadrupleTrace tr;
  const MultiplicityProfile prof = multiplicity_profile(quad);
  if (prof.quadruple_plus && policy == Mult4Policy::Candidate) {
    tr.verdict = StageVerdict::Candidate(0, CandidateReason::MultGe4);
    return tr;
  }
  int stage = 1;
  try {
    const Stage1Result s1 = stage1_vanishing(prof, bands);
    tr.s1 = s1.stats;
    tr.k1 = static_cast<int>(s1.kernel.size());
    if (s1.verdict) {
      tr.verdict = *s1.verdict;
      return tr;
    }
    std::vector<int> multiple, triple;
    for (const auto& [J, mult] : prof.entries) {
      if (mult >= 2) multiple.push_back(J);
      if (mult >= 3) triple.push_back(J);
    }
    if (multiple.empty()) {
      tr.verdict = StageVerdict::Candidate(1, CandidateReason::KernelFound);
      return tr;
    }
    stage = 2;
    const Stage2Result s2 = stage2_double(multiple, s1, bands);
    tr.s2 = s2.stats;
    if (s2.verdict) {
      tr.verdict = *s2.verdict;
      return tr;
    }
    stage = 3;
    bool gap_violation = false;
    tr.s3.min_high = std::numeric_limits<double>::infinity();
    for (int J : triple) {
      try {
        const Stage3Result s3 = stage3_triple(s2.f, s2.delta, model().point(J), bands);
        if (!s3.evaluated) {
          gap_violation = true;
          continue;
        }
        tr.s3.ran = true;
        tr.s3.inflation = std::max(tr.s3.inflation, s3.inflation);
        if (s3.high) {
          tr.s3.min_high = std::min(tr.s3.min_high, s3.value);
          tr.verdict = StageVerdict::Certified(3);
          return tr;
        }
        tr.s3.max_low = std::max(tr.s3.max_low, s3.value);
      } catch (const GapViolation&) {
        gap_violation = true;
      }
    }
    CandidateReason why = CandidateReason::KernelFound;
    if (gap_violation) why = CandidateReason::GapViolation;
    if (prof.quadruple_plus) why = CandidateReason::MultGe4;
    tr.verdict = StageVerdict::Candidate(triple.empty() ? 2 : 3, why);
  } catch (const GapViolation&) {
    tr.verdict = StageVerdict::Candidate(stage, CandidateReason::GapViolation);
  }
  return tr;
}

}  // namespace w160
