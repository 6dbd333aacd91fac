#pragma once

// The Wiman curve W in P^4: its diagonal quadrics, 40 special points, 160 odd
// theta characteristics and the order-80 group G0 = (Z/2)^4 x| Z/5.

#include <array>
#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "w160/exactfield.hpp"

namespace w160 {

using cd = std::complex<double>;

inline constexpr int kNumPoints = 40;
inline constexpr int kNumThetas = 160;
inline constexpr int kGroupOrder = 80;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct CurvePoint {
  int index = 0;
  std::array<FieldElem, 5> exact;
  std::array<cd, 5> approx;
  std::array<double, 5> bound{};  // |exact_k - approx_k| <= bound_k
  int zero_coord = 0;

  /// max_k bound_k
  double eps() const;
  /// Euclidean norm of the float representative.
  double norm() const;
};

struct ThetaChar {
  int index = 0;
  std::array<int, 4> points{};  // ascending
  std::pair<int, int> family;   // zero coordinates of the points, i < j
};

/// Sign flips by the 5-bit mask s (taken modulo the all-ones mask), then a
/// right rotation of coordinates by r.
struct GroupElement {
  int r = 0;
  int s = 0;  // 0..15, bit k flips coordinate k

  int id() const { return r * 16 + s; }
  static GroupElement from_id(int g) { return {g / 16, g % 16}; }
  static GroupElement identity() { return {}; }

  /// Apply `other` first, then *this.
  GroupElement compose(const GroupElement& other) const;
  GroupElement inverse() const;

  /// Image coordinate k -> (k + r) mod 5 with sign +-1.
  std::array<std::pair<int, int>, 5> signed_permutation() const;

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

template <class T>
std::array<T, 5> act_on_coords(const GroupElement& g, const std::array<T, 5>& v) {
  std::array<T, 5> out{};
  const auto sp = g.signed_permutation();
  for (int k = 0; k < 5; ++k) out[sp[k].first] = sp[k].second > 0 ? v[k] : T(-v[k]);
  return out;
}

/// A diagonal quadric sum_k c_k x_k^2 with coefficients in Q(i, a).
struct DiagQuadric {
  std::string label;
  std::array<FieldElem, 5> coeffs;

  FieldElem eval(const std::array<FieldElem, 5>& x) const;
  cd eval(const std::array<cd, 5>& x) const;
  std::array<cd, 5> coeffs_float() const;
};

/// Q_A = sum x_k^2.
DiagQuadric quadric_A();
/// Q_B + Q_C and (Q_B - Q_C) / (2 i sin(2 pi / 5)); both have coefficients in Q(a).
DiagQuadric quadric_plus();
DiagQuadric quadric_minus();
/// Q_i = x_{i-1}^2 + phi x_i^2 + x_{i+1}^2.
DiagQuadric quadric_Q(int i);
/// Q_i' = -x_i^2 + phi (x_{i+2}^2 + x_{i+3}^2).
DiagQuadric quadric_Qprime(int i);
/// Q_B = sum zeta^k x_k^2 and Q_C = sum zeta^-k x_k^2, zeta = e^{2 pi i / 5}.
std::array<cd, 5> quadric_B_float();
std::array<cd, 5> quadric_C_float();

CurvePoint decode_point(int J);

/// Index of the special point projectively equal to v, or -1.
int find_point(const std::array<FieldElem, 5>& v);

bool projectively_equal(const std::array<FieldElem, 5>& v, const std::array<FieldElem, 5>& w);

class WimanModel {
 public:
  /// Builds points, thetas and action tables; throws DomainError if the
  /// generated theta enumeration differs from the reference table.
  WimanModel();

  const std::vector<CurvePoint>& points() const { return points_; }
  const std::vector<ThetaChar>& thetas() const { return thetas_; }
  const CurvePoint& point(int J) const { return points_.at(J); }
  const ThetaChar& theta(int t) const { return thetas_.at(t); }

  int act_on_point(const GroupElement& g, int J) const { return point_action_[g.id()][J]; }
  int act_on_theta(const GroupElement& g, int t) const { return theta_action_[g.id()][t]; }

  /// Index of the theta with the given point set, or -1.
  int theta_index(std::array<int, 4> pts) const;

  /// Maximum embed_float error over all point coordinates.
  double point_eps() const { return point_eps_; }

 private:
  std::vector<CurvePoint> points_;
  std::vector<ThetaChar> thetas_;
  std::vector<std::array<int, kNumPoints>> point_action_;
  std::vector<std::array<int, kNumThetas>> theta_action_;
  std::map<std::array<int, 4>, int> theta_lookup_;
  double point_eps_ = 0.0;
};

/// Process-wide immutable instance.
const WimanModel& model();

/// The reference table the enumeration must reproduce.
const std::array<std::array<int, 4>, kNumThetas>& reference_theta_table();

/// Theta 4-sets generated from the two seed divisor shapes by closing under G0.
std::vector<std::array<int, 4>> enumerate_theta_sets();

struct CurveCheckReport {
  bool exact_ok = true;        // Q_A, Q_+, Q_- vanish exactly at all 40 points
  double max_float_residual = 0.0;  // over Q_A, Q_B, Q_C, Q_i, Q_i'
  std::vector<std::string> failures;
};

CurveCheckReport verify_points_on_curve();

}  // namespace w160
