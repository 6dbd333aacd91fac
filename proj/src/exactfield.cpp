#include "w160/exactfield.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace w160 {

FieldElem FieldElem::from_coeffs(const std::array<Rational, kDim>& c) {
  FieldElem x;
  x.coeffs_ = c;
  for (auto& q : x.coeffs_) q.canonicalize();
  return x;
}

FieldElem FieldElem::a() {
  FieldElem x;
  x.coeffs_[1] = 1;
  return x;
}

FieldElem FieldElem::i() {
  FieldElem x;
  x.coeffs_[4] = 1;
  return x;
}

FieldElem FieldElem::phi() {
  FieldElem x;
  x.coeffs_[0] = 1;
  x.coeffs_[2] = 1;
  return x;
}

bool FieldElem::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& q) { return sgn(q) == 0; });
}

bool FieldElem::is_rational() const {
  return std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](const Rational& q) { return sgn(q) == 0; });
}

FieldElem FieldElem::operator-() const {
  FieldElem r = *this;
  for (auto& q : r.coeffs_) q = -q;
  return r;
}

FieldElem& FieldElem::operator+=(const FieldElem& o) {
  for (int k = 0; k < kDim; ++k) coeffs_[k] += o.coeffs_[k];
  return *this;
}

FieldElem& FieldElem::operator-=(const FieldElem& o) {
  for (int k = 0; k < kDim; ++k) coeffs_[k] -= o.coeffs_[k];
  return *this;
}

FieldElem& FieldElem::operator*=(const FieldElem& o) {
  // a^n for n = 0..6 over the basis 1, a, a^2, a^3
  static constexpr int kPow[7][4] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1},
                                     {1, 0, -1, 0}, {0, 1, 0, -1}, {-1, 0, 2, 0}};
  std::array<Rational, kDim> out;
  Rational t;
  for (int u = 0; u < kDim; ++u) {
    if (sgn(coeffs_[u]) == 0) continue;
    for (int v = 0; v < kDim; ++v) {
      if (sgn(o.coeffs_[v]) == 0) continue;
      t = coeffs_[u] * o.coeffs_[v];
      const int n = u % 4 + v % 4;
      const int e = u / 4 + v / 4;  // i^2 = -1
      const int sign = e == 2 ? -1 : 1;
      const int base = e == 1 ? 4 : 0;
      for (int k = 0; k < 4; ++k) {
        const int c = kPow[n][k] * sign;
        if (c == 1) out[base + k] += t;
        else if (c == -1) out[base + k] -= t;
        else if (c != 0) out[base + k] += c * t;
      }
    }
  }
  coeffs_ = std::move(out);
  return *this;
}

FieldElem FieldElem::conj_i() const {
  FieldElem r = *this;
  for (int k = 4; k < 8; ++k) r.coeffs_[k] = -r.coeffs_[k];
  return r;
}

FieldElem FieldElem::negate_a() const {
  FieldElem r = *this;
  for (int k : {1, 3, 5, 7}) r.coeffs_[k] = -r.coeffs_[k];
  return r;
}

// x^-1 through the tower Q(i,a) > Q(a) > Q(a^2) > Q.
FieldElem FieldElem::inverse() const {
  if (is_zero()) throw std::domain_error("inverse of zero field element");
  const FieldElem xc = conj_i();
  const FieldElem n1 = *this * xc;           // in Q(a)
  const FieldElem n1m = n1.negate_a();
  const FieldElem n2 = n1 * n1m;             // r + s a^2
  const Rational r = n2.coeffs_[0];
  const Rational s = n2.coeffs_[2];
  const Rational norm = r * r - r * s - s * s;  // nonzero: x^2 - x - 1 has no rational root
  FieldElem cofactor;
  cofactor.coeffs_[0] = (r - s) / norm;
  cofactor.coeffs_[2] = -s / norm;
  return xc * n1m * cofactor;
}

FieldElem field_inv(const FieldElem& x) { return x.inverse(); }

std::string FieldElem::to_string() const {
  static const char* names[8] = {"", "a", "a^2", "a^3", "i", "a*i", "a^2*i", "a^3*i"};
  std::ostringstream os;
  bool first = true;
  for (int k = 0; k < kDim; ++k) {
    if (sgn(coeffs_[k]) == 0) continue;
    if (!first) os << " + ";
    first = false;
    os << "(" << coeffs_[k].get_str() << ")";
    if (k) os << "*" << names[k];
  }
  if (first) os << "0";
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kU = 0x1p-53;

double gamma_n(int n) { return n * kU / (1.0 - n * kU); }

}  // namespace

EmbeddedValue embed_float(const FieldElem& x) {
  // fl(a^k): one representation error of a plus k-1 roundings, each <= u.
  double pw[4] = {1.0, kAFloat, 0.0, 0.0};
  pw[2] = pw[1] * kAFloat;
  pw[3] = pw[2] * kAFloat;

  double part[2] = {0.0, 0.0};
  double err[2] = {0.0, 0.0};
  for (int e = 0; e < 2; ++e) {
    double abs_sum = 0.0;
    int terms = 0;
    for (int k = 0; k < 4; ++k) {
      const Rational& c = x.coeff(k, e);
      if (sgn(c) == 0) continue;
      const double cd = c.get_d();
      const bool exact = Rational(cd) == c;
      int ops = exact ? 0 : 1;
      if (k > 0) ops += 2 * k;  // power error plus the product c * a^k
      const double t = cd * pw[k];
      err[e] += std::abs(t) * gamma_n(ops) * (1.0 + gamma_n(ops + 1));
      abs_sum += std::abs(t);
      part[e] += t;
      ++terms;
    }
    if (terms > 1) err[e] += abs_sum * gamma_n(terms - 1) * (1.0 + gamma_n(8));
  }
  EmbeddedValue out;
  out.value = {part[0], part[1]};
  out.bound = (err[0] + err[1]) * (1.0 + 4 * kU);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Rref {
  std::vector<std::vector<FieldElem>> rows;
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

Rref gauss_jordan(const ExactMatrix& m) {
  Rref out;
  const std::size_t R = m.rows(), C = m.cols();
  out.rows.assign(R, std::vector<FieldElem>(C));
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t c = 0; c < C; ++c) out.rows[r][c] = m(r, c);

  std::size_t rank = 0;
  for (std::size_t c = 0; c < C && rank < R; ++c) {
    std::size_t piv = rank;
    while (piv < R && out.rows[piv][c].is_zero()) ++piv;
    if (piv == R) continue;
    std::swap(out.rows[piv], out.rows[rank]);
    const FieldElem inv = out.rows[rank][c].inverse();
    for (std::size_t k = c; k < C; ++k)
      if (!out.rows[rank][k].is_zero()) out.rows[rank][k] *= inv;
    for (std::size_t r = 0; r < R; ++r) {
      if (r == rank || out.rows[r][c].is_zero()) continue;
      const FieldElem f = out.rows[r][c];
      for (std::size_t k = c; k < C; ++k)
        if (!out.rows[rank][k].is_zero()) out.rows[r][k] -= f * out.rows[rank][k];
    }
    out.pivots.push_back(c);
    ++rank;
  }
  out.rows.resize(rank);
  return out;
}

}  // namespace

std::vector<ExactVector> exact_kernel(const ExactMatrix& m) {
  const Rref rr = gauss_jordan(m);
  const std::size_t C = m.cols();
  std::vector<bool> is_pivot(C, false);
  for (auto p : rr.pivots) is_pivot[p] = true;
  std::vector<ExactVector> basis;
  for (std::size_t f = 0; f < C; ++f) {
    if (is_pivot[f]) continue;
    ExactVector v(C);
    v[f] = 1;
    for (std::size_t r = 0; r < rr.pivots.size(); ++r) v[rr.pivots[r]] = -rr.rows[r][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

std::size_t exact_rank(const ExactMatrix& m) { return gauss_jordan(m).pivots.size(); }

// ---------------------------------------------------------------------------

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 x, u64 y, u64 p) { return static_cast<u64>(static_cast<u128>(x) * y % p); }

u64 powmod(u64 b, u64 e, u64 p) {
  u64 r = 1 % p;
  b %= p;
  while (e) {
    if (e & 1) r = mulmod(r, b, p);
    b = mulmod(b, b, p);
    e >>= 1;
  }
  return r;
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % q == 0) return n == q;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 b : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    u64 x = powmod(b, d, n);
    if (x == 1 || x == n - 1) continue;
    bool comp = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        comp = false;
        break;
      }
    }
    if (comp) return false;
  }
  return true;
}

// Tonelli-Shanks; nullopt when x is a non-residue.
std::optional<u64> sqrt_mod(u64 x, u64 p) {
  x %= p;
  if (x == 0) return 0;
  if (powmod(x, (p - 1) / 2, p) != 1) return std::nullopt;
  u64 q = p - 1;
  int s = 0;
  while ((q & 1) == 0) {
    q >>= 1;
    ++s;
  }
  u64 z = 2;
  while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
  u64 m = s, c = powmod(z, q, p), t = powmod(x, q, p), r = powmod(x, (q + 1) / 2, p);
  while (t != 1) {
    u64 i = 0, tt = t;
    while (tt != 1) {
      tt = mulmod(tt, tt, p);
      ++i;
    }
    u64 b = c;
    for (u64 j = 0; j + i + 1 < m; ++j) b = mulmod(b, b, p);
    m = i;
    c = mulmod(b, b, p);
    t = mulmod(t, c, p);
    r = mulmod(r, b, p);
  }
  return std::min(r, p - r);
}

u64 inv_mod(u64 x, u64 p) { return powmod(x, p - 2, p); }

u64 reduce_rational(const Rational& q, u64 p) {
  mpz_class pz;
  mpz_import(pz.get_mpz_t(), 1, 1, sizeof(u64), 0, 0, &p);
  mpz_class num = q.get_num() % pz;
  if (num < 0) num += pz;
  mpz_class den = q.get_den() % pz;
  if (den == 0) throw UnusablePrime("denominator divisible by p");
  u64 n = 0, d = 0;
  mpz_export(&n, nullptr, 1, sizeof(u64), 0, 0, num.get_mpz_t());
  mpz_export(&d, nullptr, 1, sizeof(u64), 0, 0, den.get_mpz_t());
  return mulmod(n, inv_mod(d, p), p);
}

}  // namespace

std::optional<ModularEmbedding> modular_embedding(std::uint64_t p) {
  if (p >= (1ULL << 62) || p % 4 != 1 || p == 5 || !is_prime(p)) return std::nullopt;
  const auto ri = sqrt_mod(p - 1, p);
  const auto r5 = sqrt_mod(5, p);
  if (!ri || !r5) return std::nullopt;
  const u64 half = inv_mod(2, p);
  // t^2 = (-1 +- sqrt 5) / 2
  for (u64 sgn5 : {*r5, p - *r5}) {
    const u64 t2 = mulmod((sgn5 + p - 1) % p, half, p);
    if (auto ra = sqrt_mod(t2, p)) return ModularEmbedding{p, *ra, *ri};
  }
  return std::nullopt;
}

ModularEmbedding first_usable_prime(std::uint64_t start) {
  for (u64 p = start; p < (1ULL << 62); ++p) {
    if (auto e = modular_embedding(p)) return *e;
  }
  throw UnusablePrime("no usable prime below 2^62");
}

std::size_t rank_mod_p(const ExactMatrix& m, const ModularEmbedding& emb) {
  const u64 p = emb.p;
  u64 pw[4] = {1, emb.root_a, mulmod(emb.root_a, emb.root_a, p), 0};
  pw[3] = mulmod(pw[2], emb.root_a, p);
  const std::size_t R = m.rows(), C = m.cols();
  std::vector<std::vector<u64>> a(R, std::vector<u64>(C, 0));
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t c = 0; c < C; ++c) {
      u64 re = 0, im = 0;
      for (int k = 0; k < 4; ++k) {
        re = (re + mulmod(reduce_rational(m(r, c).coeff(k, 0), p), pw[k], p)) % p;
        im = (im + mulmod(reduce_rational(m(r, c).coeff(k, 1), p), pw[k], p)) % p;
      }
      a[r][c] = (re + mulmod(im, emb.root_i, p)) % p;
    }
  }
  std::size_t rank = 0;
  for (std::size_t c = 0; c < C && rank < R; ++c) {
    std::size_t piv = rank;
    while (piv < R && a[piv][c] == 0) ++piv;
    if (piv == R) continue;
    std::swap(a[piv], a[rank]);
    const u64 inv = inv_mod(a[rank][c], p);
    for (std::size_t r = rank + 1; r < R; ++r) {
      if (a[r][c] == 0) continue;
      const u64 f = mulmod(a[r][c], inv, p);
      for (std::size_t k = c; k < C; ++k) a[r][k] = (a[r][k] + p - mulmod(f, a[rank][k], p)) % p;
    }
    ++rank;
  }
  return rank;
}

}  // namespace w160
