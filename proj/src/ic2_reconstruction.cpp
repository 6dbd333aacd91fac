#include "w160/ic2_reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace w160 {

namespace {

double gamma_n(int n) { return n * kUnitRoundoff / (1.0 - n * kUnitRoundoff); }

[[noreturn]] void fail(const std::string& what) { throw CertificationError(kFailIc2, what); }

const Bands kHyperplaneBands{1e-14, 1e-2, 10.0};

double max_col_norm(const CMat& m) {
  double r = 0.0;
  for (int c = 0; c < m.cols(); ++c) r = std::max(r, m.col(c).norm());
  return r;
}

CMat orthonormal_columns(const CMat& m) {
  Eigen::HouseholderQR<CMat> qr(m);
  return qr.householderQ() * CMat::Identity(m.rows(), m.cols());
}

}  // namespace

ThetaHyperplane theta_hyperplane(const ThetaChar& t) {
  CMat m(4, 5);
  double eps = 0.0;
  for (int r = 0; r < 4; ++r) {
    const auto& p = model().point(t.points[r]);
    for (int k = 0; k < 5; ++k) m(r, k) = p.approx[k];
    eps = std::max(eps, p.eps());
  }
  const CertifiedSVD svd = svd_verified(m, SvdMode::Full);
  GapClass gap;
  try {
    gap = classify_gap(svd, kHyperplaneBands, std::sqrt(20.0) * eps);
  } catch (const GapViolation& e) {
    fail("theta " + std::to_string(t.index) + ": " + e.what());
  }
  if (gap.kernel_dim != 1) fail("theta " + std::to_string(t.index) + ": kernel dimension " + std::to_string(gap.kernel_dim));

  ThetaHyperplane h;
  h.theta = t.index;
  h.kernel_error = kernel_angle_bound(svd, gap, std::sqrt(20.0) * eps);
  const CVec v = kernel_basis(svd, gap).col(0);
  // ties in magnitude are common; the first coordinate within 1e-12 wins
  const double vmax = v.cwiseAbs().maxCoeff();
  int big = 0;
  while (std::abs(v(big)) < vmax * (1.0 - 1e-12)) ++big;
  const cd phase = std::conj(v(big)) / std::abs(v(big));
  for (int k = 0; k < 5; ++k) h.l[k] = v(k) * phase;
  h.l[big] = std::abs(v(big));

  for (int J : t.points) {
    const auto& p = model().point(J);
    cd s = 0.0;
    for (int k = 0; k < 5; ++k) s += h.l[k] * p.approx[k];
    h.point_residual = std::max(h.point_residual, std::abs(s));
    h.contact_residual = std::max(h.contact_residual, std::abs(h.l[p.zero_coord]));
  }
  if (!(h.point_residual <= kHyperplaneTolerance) || !(h.contact_residual <= kHyperplaneTolerance))
    fail("theta " + std::to_string(t.index) + ": hyperplane residual");
  return h;
}

const std::vector<ThetaHyperplane>& theta_hyperplanes() {
  static const std::vector<ThetaHyperplane> all = [] {
    std::vector<ThetaHyperplane> v;
    v.reserve(kNumThetas);
    for (const auto& t : model().thetas()) v.push_back(theta_hyperplane(t));
    return v;
  }();
  return all;
}

Quadric15 pair_quadric(const std::array<cd, 5>& l1, const std::array<cd, 5>& l2) {
  Quadric15 q;
  for (int i = 0; i < 5; ++i)
    for (int k = i; k < 5; ++k)
      q(monomial_index(i, k)) = i == k ? l1[i] * l2[i] : l1[i] * l2[k] + l1[k] * l2[i];
  return q / q.norm();
}

Quadric15 pair_quadric(int t1, int t2) {
  const auto& hs = theta_hyperplanes();
  return pair_quadric(hs.at(t1).l, hs.at(t2).l);
}

Eigen::Matrix<cd, 5, 5> symmetric_matrix(const Quadric15& q) {
  Eigen::Matrix<cd, 5, 5> s;
  for (int i = 0; i < 5; ++i)
    for (int k = 0; k < 5; ++k) s(i, k) = i == k ? q(monomial_index(i, i)) : 0.5 * q(monomial_index(i, k));
  return s;
}

SteinerSpanReport steiner_span(int class_id, const std::vector<ThetaPair>& pairs, const SpanBands& bands) {
  SteinerSpanReport rep;
  rep.class_id = class_id;
  rep.quadric_count = static_cast<int>(pairs.size());
  const auto& hs = theta_hyperplanes();

  CMat m(pairs.size(), 15);
  double l_err = 0.0;
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    m.row(r) = pair_quadric(pairs[r].first, pairs[r].second).transpose();
    l_err = std::max({l_err, hs[pairs[r].first].kernel_error, hs[pairs[r].second].kernel_error});
  }
  // l1 l2 moves by at most sqrt2 (|dl1| + |dl2|); normalizing can double it
  const double q_err = 4.0 * std::sqrt(2.0) * l_err + gamma_n(40);
  const double delta_a = std::sqrt(static_cast<double>(pairs.size())) * q_err;

  const CertifiedSVD svd = svd_verified(m, SvdMode::Full);
  GapClass gap;
  try {
    gap = classify_gap(svd, bands.span, delta_a);
  } catch (const GapViolation&) {
    return rep;
  }
  rep.usable = true;
  rep.span_dim = gap.k_high;
  rep.max_low = gap.max_low;
  rep.min_high = gap.min_high;
  rep.inflation = gap.inflation + delta_a;
  // w^H q = 0 for every row q  <=>  conj(w) in ker m
  rep.complement = kernel_basis(svd, gap).conjugate();
  rep.complement_error = kernel_angle_bound(svd, gap, delta_a);
  for (int b = 0; b < 5; ++b) rep.block_magnitude[b] = block_magnitude(rep.complement, b);
  if (rep.complement.cols()) rep.span_residual = (rep.complement.adjoint() * m.transpose()).cwiseAbs().maxCoeff();
  return rep;
}

CMat i2_reference() {
  CMat q(15, 3);
  q.col(0) = diag_quadric(quadric_A().coeffs_float());
  q.col(1) = diag_quadric(quadric_B_float());
  q.col(2) = diag_quadric(quadric_C_float());
  return orthonormal_columns(q);
}

Ic2Certificate intersect_and_certify(const PartitionResult& partition, const SpanBands& bands) {
  Ic2Certificate cert;
  const int nc = static_cast<int>(partition.classes.size());
  cert.reports.reserve(nc);
  for (int c = 0; c < nc; ++c) cert.reports.push_back(steiner_span(c, partition.classes[c].pairs, bands));

  std::vector<int> chosen;
  for (int c = 0; c < nc; ++c) {
    const auto& r = cert.reports[c];
    if (r.usable && r.span_dim == 13) {
      ++cert.dim13_classes;
      chosen.push_back(c);
    }
  }
  for (std::size_t o = 0; o < partition.orbits.size(); ++o) {
    const auto& cls = partition.orbits[o].classes;
    if (std::all_of(cls.begin(), cls.end(), [&](int c) { return cert.reports[c].usable && cert.reports[c].span_dim == 13; }))
      cert.good_orbits.push_back(static_cast<int>(o));
  }

  // g maps the complement of one class onto the complement of its image
  for (const auto& orb : partition.orbits) {
    const int base = orb.classes.front();
    const auto& rb = cert.reports[base];
    if (!rb.usable) continue;
    const ThetaPair p0 = partition.classes[base].pairs.front();
    std::vector<bool> seen(nc, false);
    for (int gid = 0; gid < kGroupOrder; ++gid) {
      const GroupElement g = GroupElement::from_id(gid);
      int a = model().act_on_theta(g, p0.first), b = model().act_on_theta(g, p0.second);
      if (a > b) std::swap(a, b);
      const int target = partition.class_of_pair[pair_rank({a, b})];
      if (seen[target]) continue;
      seen[target] = true;
      const auto& rt = cert.reports[target];
      if (!rt.usable || rt.span_dim != rb.span_dim) {
        cert.equivariance_residual = std::numeric_limits<double>::infinity();
        continue;
      }
      for (int k = 0; k < rb.complement.cols(); ++k) {
        const CVec w = act_on_quadric(g, rb.complement.col(k));
        const CVec off = w - rt.complement * (rt.complement.adjoint() * w);
        cert.equivariance_residual = std::max(cert.equivariance_residual, off.norm());
      }
    }
  }

  if (chosen.empty()) fail("no class with a 13-dimensional span");
  CMat stack(2 * chosen.size(), 15);
  double w_err = 0.0;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    const auto& r = cert.reports[chosen[i]];
    stack.middleRows(2 * i, 2) = r.complement.adjoint();
    w_err = std::max(w_err, r.complement_error);
  }
  cert.stacked_rows = static_cast<int>(stack.rows());
  const double delta_a = std::sqrt(static_cast<double>(stack.rows())) * w_err;
  const CertifiedSVD svd = svd_verified(stack);
  GapClass gap;
  try {
    gap = classify_gap(svd, bands.stack, delta_a);
  } catch (const GapViolation& e) {
    fail(std::string("stacked complements: ") + e.what());
  }
  cert.stacked_rank = gap.k_high;
  cert.stack_min_high = gap.min_high;
  cert.stack_max_low = gap.max_low;
  cert.stack_inflation = gap.inflation + delta_a;
  cert.intersection_dim = gap.kernel_dim;
  if (cert.stacked_rank != 12) fail("complements span dimension " + std::to_string(cert.stacked_rank));
  cert.intersection = kernel_basis(svd, gap);

  const CMat ref = i2_reference();
  const CMat& x = cert.intersection;
  cert.mutual_residual = std::max(max_col_norm(x - ref * (ref.adjoint() * x)), max_col_norm(ref - x * (x.adjoint() * ref)));
  for (int c = 0; c < x.cols(); ++c)
    for (const auto& p : model().points())
      cert.point_residual = std::max(cert.point_residual, std::abs(eval_quadric(x.col(c), p.approx)));

  if (!(cert.mutual_residual <= kMutualTolerance)) fail("intersection differs from span(Q_A, Q_B, Q_C)");
  if (!(cert.point_residual <= kMutualTolerance)) fail("intersection quadrics do not vanish at the special points");
  cert.certified = true;
  return cert;
}

ReconstructReport reconstruct_check(const CMat& intersection, int samples, std::uint64_t seed) {
  ReconstructReport rep;
  std::vector<Quadric15> qs;
  for (int c = 0; c < intersection.cols(); ++c) qs.push_back(intersection.col(c).normalized());
  auto worst = [&](const std::array<cd, 5>& x) {
    double r = 0.0;
    for (const auto& q : qs) r = std::max(r, std::abs(eval_quadric(q, x)));
    return r;
  };
  for (const auto& p : model().points()) rep.special_residual = std::max(rep.special_residual, worst(p.approx));

  const std::array<std::array<cd, 5>, 3> diag = {quadric_A().coeffs_float(), quadric_plus().coeffs_float(),
                                                 quadric_minus().coeffs_float()};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  auto random_vec = [&] {
    Eigen::Matrix<cd, 5, 1> v;
    for (int k = 0; k < 5; ++k) v(k) = cd(gauss(rng), gauss(rng));
    return Eigen::Matrix<cd, 5, 1>(v.normalized());
  };

  // the three quadrics plus two affine conditions cut out isolated points
  for (int attempt = 0; rep.samples < samples && attempt < 20 * samples; ++attempt) {
    const auto& start = model().point(attempt % kNumPoints).approx;
    Eigen::Matrix<cd, 5, 1> x;
    for (int k = 0; k < 5; ++k) x(k) = start[k];
    const Eigen::Matrix<cd, 5, 1> c0 = x.conjugate() / x.squaredNorm();
    const Eigen::Matrix<cd, 5, 1> c1 = random_vec();
    const cd target = cd(c1.transpose() * x) + 0.2 * cd(gauss(rng), gauss(rng));

    bool converged = false;
    for (int it = 0; it < 50 && !converged; ++it) {
      Eigen::Matrix<cd, 5, 1> f;
      Eigen::Matrix<cd, 5, 5> jac;
      for (int e = 0; e < 3; ++e) {
        cd v = 0.0;
        for (int k = 0; k < 5; ++k) {
          v += diag[e][k] * x(k) * x(k);
          jac(e, k) = 2.0 * diag[e][k] * x(k);
        }
        f(e) = v;
      }
      f(3) = cd(c0.transpose() * x) - 1.0;
      f(4) = cd(c1.transpose() * x) - target;
      jac.row(3) = c0.transpose();
      jac.row(4) = c1.transpose();
      const Eigen::Matrix<cd, 5, 1> dx = jac.partialPivLu().solve(f);
      x -= dx;
      if (!x.allFinite()) break;
      converged = dx.norm() <= 1e-15 * x.norm();
    }
    if (!converged) continue;
    x.normalize();
    std::array<cd, 5> pt;
    for (int k = 0; k < 5; ++k) pt[k] = x(k);
    double on_curve = 0.0;
    for (const auto& d : diag) {
      cd v = 0.0;
      for (int k = 0; k < 5; ++k) v += d[k] * pt[k] * pt[k];
      on_curve = std::max(on_curve, std::abs(v));
    }
    rep.sample_on_curve = std::max(rep.sample_on_curve, on_curve);
    rep.sample_residual = std::max(rep.sample_residual, worst(pt));
    ++rep.samples;
  }

  rep.offcurve_residual = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 20; ++trial) {
    const auto v = random_vec();
    std::array<cd, 5> pt;
    for (int k = 0; k < 5; ++k) pt[k] = v(k);
    rep.offcurve_residual = std::min(rep.offcurve_residual, worst(pt));
  }
  return rep;
}

}  // namespace w160
