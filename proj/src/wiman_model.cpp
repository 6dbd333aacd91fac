#include "w160/wiman_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace w160 {

namespace {

const std::array<std::array<int, 4>, kNumThetas> kReferenceTable = {{
#include "theta_table.inc"
}};

FieldElem fe_a() { return FieldElem::a(); }
FieldElem fe_i() { return FieldElem::i(); }
FieldElem fe_phi() { return FieldElem::phi(); }

}  // namespace

double CurvePoint::eps() const { return *std::max_element(bound.begin(), bound.end()); }

double CurvePoint::norm() const {
  double s = 0.0;
  for (const auto& z : approx) s += std::norm(z);
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------

GroupElement GroupElement::compose(const GroupElement& other) const {
  // flip(s1) after rotating by r2 equals flip(rotl(s1, r2)) before it
  const int r2 = other.r;
  int s1 = 0;
  for (int m = 0; m < 5; ++m)
    if (s >> m & 1) s1 |= 1 << ((m - r2 + 5) % 5);
  int mask = s1 ^ other.s;
  if (mask & 16) mask ^= 31;
  return {(r + other.r) % 5, mask};
}

GroupElement GroupElement::inverse() const {
  for (int g = 0; g < kGroupOrder; ++g) {
    const GroupElement h = from_id(g);
    if (compose(h) == identity()) return h;
  }
  throw DomainError("group element without inverse");
}

std::array<std::pair<int, int>, 5> GroupElement::signed_permutation() const {
  std::array<std::pair<int, int>, 5> out;
  for (int k = 0; k < 5; ++k) out[k] = {(k + r) % 5, (s >> k & 1) ? -1 : 1};
  return out;
}

// ---------------------------------------------------------------------------

FieldElem DiagQuadric::eval(const std::array<FieldElem, 5>& x) const {
  FieldElem acc;
  for (int k = 0; k < 5; ++k) acc += coeffs[k] * x[k] * x[k];
  return acc;
}

cd DiagQuadric::eval(const std::array<cd, 5>& x) const {
  const auto c = coeffs_float();
  cd acc = 0.0;
  for (int k = 0; k < 5; ++k) acc += c[k] * x[k] * x[k];
  return acc;
}

std::array<cd, 5> DiagQuadric::coeffs_float() const {
  std::array<cd, 5> c;
  for (int k = 0; k < 5; ++k) c[k] = embed_float(coeffs[k]).value;
  return c;
}

DiagQuadric quadric_A() { return {"A", {1, 1, 1, 1, 1}}; }

DiagQuadric quadric_plus() {
  const FieldElem a2 = fe_a() * fe_a();
  const FieldElem phi = fe_phi();
  return {"B+C", {2, a2, -phi, -phi, a2}};
}

DiagQuadric quadric_minus() {
  const FieldElem a2 = fe_a() * fe_a();
  return {"(B-C)/(2i sin72)", {0, 1, a2, -a2, -1}};
}

DiagQuadric quadric_Q(int i) {
  DiagQuadric q{"Q" + std::to_string(i), {0, 0, 0, 0, 0}};
  q.coeffs[(i + 4) % 5] = 1;
  q.coeffs[i % 5] = fe_phi();
  q.coeffs[(i + 1) % 5] = 1;
  return q;
}

DiagQuadric quadric_Qprime(int i) {
  DiagQuadric q{"Q" + std::to_string(i) + "'", {0, 0, 0, 0, 0}};
  q.coeffs[i % 5] = -1;
  q.coeffs[(i + 2) % 5] = fe_phi();
  q.coeffs[(i + 3) % 5] = fe_phi();
  return q;
}

std::array<cd, 5> quadric_B_float() {
  std::array<cd, 5> c;
  for (int k = 0; k < 5; ++k) c[k] = std::polar(1.0, 2.0 * std::numbers::pi * k / 5.0);
  return c;
}

std::array<cd, 5> quadric_C_float() {
  auto c = quadric_B_float();
  for (auto& z : c) z = std::conj(z);
  return c;
}

// ---------------------------------------------------------------------------

CurvePoint decode_point(int J) {
  if (J < 0 || J >= kNumPoints) throw DomainError("point index out of range: " + std::to_string(J));
  const int q = J / 8, j = J % 8;
  const int j0 = j & 1, j1 = (j >> 1) & 1, j2 = (j >> 2) & 1;
  const std::array<FieldElem, 5> base = {
      fe_i() * fe_a() * FieldElem(1 - 2 * j0), FieldElem(1 - 2 * j1), fe_i() * FieldElem(1 - 2 * j2), fe_a(), 0};
  CurvePoint p;
  p.index = J;
  for (int k = 0; k < 5; ++k) p.exact[(k + q) % 5] = base[k];
  p.zero_coord = (4 + q) % 5;
  for (int k = 0; k < 5; ++k) {
    const auto e = embed_float(p.exact[k]);
    p.approx[k] = e.value;
    p.bound[k] = e.bound;
  }
  return p;
}

bool projectively_equal(const std::array<FieldElem, 5>& v, const std::array<FieldElem, 5>& w) {
  bool v_zero = true, w_zero = true;
  for (int k = 0; k < 5; ++k) {
    v_zero = v_zero && v[k].is_zero();
    w_zero = w_zero && w[k].is_zero();
  }
  if (v_zero || w_zero) return false;
  for (int k = 0; k < 5; ++k) {
    for (int m = k + 1; m < 5; ++m) {
      if (!(v[k] * w[m] == v[m] * w[k])) return false;
    }
  }
  return true;
}

int find_point(const std::array<FieldElem, 5>& v) {
  int zero = -1;
  for (int k = 0; k < 5; ++k)
    if (v[k].is_zero()) {
      if (zero >= 0) return -1;
      zero = k;
    }
  if (zero < 0) return -1;
  // points with zero coordinate z have q = (z + 1) mod 5
  static const std::vector<std::array<FieldElem, 5>> exact_points = [] {
    std::vector<std::array<FieldElem, 5>> out;
    for (int J = 0; J < kNumPoints; ++J) out.push_back(decode_point(J).exact);
    return out;
  }();
  const int q = (zero + 1) % 5;
  for (int j = 0; j < 8; ++j) {
    const int J = q * 8 + j;
    if (projectively_equal(v, exact_points[J])) return J;
  }
  return -1;
}

// ---------------------------------------------------------------------------

namespace {

using Divisor = std::array<std::array<FieldElem, 5>, 4>;

std::array<int, 4> divisor_points(const Divisor& d) {
  std::array<int, 4> out{};
  for (int k = 0; k < 4; ++k) {
    out[k] = find_point(d[k]);
    if (out[k] < 0) throw DomainError("seed divisor point is not a special point");
  }
  std::sort(out.begin(), out.end());
  return out;
}

// The two divisor shapes, all sign choices, in lexicographic order of
// (e1, e2, e3, e4) with +1 before -1.
std::vector<std::array<int, 4>> seed_divisors() {
  const FieldElem a = fe_a(), i = fe_i(), ia = fe_i() * fe_a();
  std::vector<std::array<int, 4>> seeds;
  for (int shape = 0; shape < 2; ++shape) {
    for (int m = 0; m < 16; ++m) {
      const FieldElem e1 = (m & 8) ? -1 : 1, e2 = (m & 4) ? -1 : 1;
      const FieldElem e3 = (m & 2) ? -1 : 1, e4 = (m & 1) ? -1 : 1;
      Divisor d;
      if (shape == 0) {
        d = {{{0, ia, e1, i, e2 * a}, {0, ia, e1, -i, e2 * a}, {i, e3, ia, 0, e4 * a}, {-i, e3, ia, 0, e4 * a}}};
      } else {
        d = {{{i, e1 * a, 0, ia, e2}, {i, e1 * a, 0, -ia, e2}, {i, e3, ia, 0, e4 * a}, {i, e3, -ia, 0, e4 * a}}};
      }
      seeds.push_back(divisor_points(d));
    }
  }
  return seeds;
}

std::array<int, 4> image_set(const std::vector<std::array<int, kNumPoints>>& pa, int g, const std::array<int, 4>& s) {
  std::array<int, 4> out{};
  for (int k = 0; k < 4; ++k) out[k] = pa[g][s[k]];
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::array<int, kNumPoints>> build_point_action(const std::vector<CurvePoint>& pts) {
  std::vector<std::array<int, kNumPoints>> table(kGroupOrder);
  for (int g = 0; g < kGroupOrder; ++g) {
    const GroupElement ge = GroupElement::from_id(g);
    for (int J = 0; J < kNumPoints; ++J) {
      const int img = find_point(act_on_coords(ge, pts[J].exact));
      if (img < 0) throw DomainError("group image of a special point is not special");
      table[g][J] = img;
    }
  }
  return table;
}

}  // namespace

std::vector<std::array<int, 4>> enumerate_theta_sets() {
  std::vector<CurvePoint> pts;
  for (int J = 0; J < kNumPoints; ++J) pts.push_back(decode_point(J));
  const auto pa = build_point_action(pts);
  std::vector<std::array<int, 4>> out;
  std::map<std::array<int, 4>, int> seen;
  for (const auto& seed : seed_divisors()) {
    if (seen.count(seed)) continue;
    for (int g = 0; g < kGroupOrder; ++g) {
      const auto img = image_set(pa, g, seed);
      if (seen.emplace(img, static_cast<int>(out.size())).second) out.push_back(img);
    }
  }
  return out;
}

const std::array<std::array<int, 4>, kNumThetas>& reference_theta_table() { return kReferenceTable; }

WimanModel::WimanModel() {
  for (int J = 0; J < kNumPoints; ++J) {
    points_.push_back(decode_point(J));
    point_eps_ = std::max(point_eps_, points_.back().eps());
  }
  point_action_ = build_point_action(points_);

  const auto sets = enumerate_theta_sets();
  if (sets.size() != kNumThetas) throw DomainError("theta enumeration produced " + std::to_string(sets.size()));
  for (int t = 0; t < kNumThetas; ++t) {
    if (sets[t] != kReferenceTable[t])
      throw DomainError("theta " + std::to_string(t) + " differs from the reference table");
    ThetaChar th;
    th.index = t;
    th.points = sets[t];
    int z0 = points_[sets[t][0]].zero_coord, z1 = z0;
    for (int J : sets[t]) {
      const int z = points_[J].zero_coord;
      if (z != z0) z1 = z;
    }
    th.family = {std::min(z0, z1), std::max(z0, z1)};
    thetas_.push_back(th);
    theta_lookup_[th.points] = t;
  }

  theta_action_.resize(kGroupOrder);
  for (int g = 0; g < kGroupOrder; ++g) {
    for (int t = 0; t < kNumThetas; ++t) {
      const int img = theta_index(image_set(point_action_, g, thetas_[t].points));
      if (img < 0) throw DomainError("group image of a theta is not in the table");
      theta_action_[g][t] = img;
    }
  }
}

int WimanModel::theta_index(std::array<int, 4> pts) const {
  std::sort(pts.begin(), pts.end());
  const auto it = theta_lookup_.find(pts);
  return it == theta_lookup_.end() ? -1 : it->second;
}

const WimanModel& model() {
  static const WimanModel instance;
  return instance;
}

CurveCheckReport verify_points_on_curve() {
  CurveCheckReport rep;
  const auto& m = model();
  std::vector<DiagQuadric> exact_set = {quadric_A(), quadric_plus(), quadric_minus()};
  std::vector<DiagQuadric> float_set = exact_set;
  for (int i = 0; i < 5; ++i) {
    float_set.push_back(quadric_Q(i));
    float_set.push_back(quadric_Qprime(i));
  }
  const auto qb = quadric_B_float(), qc = quadric_C_float();
  for (const auto& p : m.points()) {
    for (const auto& q : exact_set) {
      if (!q.eval(p.exact).is_zero()) {
        rep.exact_ok = false;
        rep.failures.push_back(q.label + " at point " + std::to_string(p.index));
      }
    }
    for (const auto& q : float_set) rep.max_float_residual = std::max(rep.max_float_residual, std::abs(q.eval(p.approx)));
    cd vb = 0.0, vc = 0.0;
    for (int k = 0; k < 5; ++k) {
      vb += qb[k] * p.approx[k] * p.approx[k];
      vc += qc[k] * p.approx[k] * p.approx[k];
    }
    rep.max_float_residual = std::max({rep.max_float_residual, std::abs(vb), std::abs(vc)});
  }
  if (rep.max_float_residual > 1e-14) rep.failures.push_back("float residual above 1e-14");
  return rep;
}

}  // namespace w160
