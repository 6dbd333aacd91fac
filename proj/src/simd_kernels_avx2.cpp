// Compiled with -mavx2 -mfma; reached only through the runtime dispatch.
#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "w160/simd_kernels.hpp"

namespace w160::simd::avx2 {

namespace {

constexpr double kU = 0x1p-53;

// |z| for the two complex numbers packed in x, duplicated per lane pair.
inline __m256d cabs2(__m256d x) {
  const __m256d sq = _mm256_mul_pd(x, x);
  return _mm256_sqrt_pd(_mm256_add_pd(sq, _mm256_permute_pd(sq, 0b0101)));
}

inline double hmax(__m256d x) {
  alignas(32) double t[4];
  _mm256_store_pd(t, x);
  return std::max(std::max(t[0], t[1]), std::max(t[2], t[3]));
}

}  // namespace

Residual recon(const cd* U, int ldu, const double* D, const cd* V, int ldv, const cd* A, int lda, int m, int n, int k) {
  Residual out;
  double max_mag = 0.0;
  const int m2 = m & ~1;
  std::vector<double> acc(2 * m), mag(m);
  for (int j = 0; j < n; ++j) {
    const double* a = reinterpret_cast<const double*>(A + static_cast<long>(j) * lda);
    for (int i = 0; i < 2 * m; ++i) acc[i] = -a[i];
    for (int i = 0; i < m; ++i) mag[i] = std::abs(A[i + static_cast<long>(j) * lda]);
    for (int c = 0; c < k; ++c) {
      const cd coef = D[c] * std::conj(V[j + static_cast<long>(c) * ldv]);
      const double cmag = D[c] * std::abs(V[j + static_cast<long>(c) * ldv]);
      const __m256d cr = _mm256_set1_pd(coef.real()), ci = _mm256_set1_pd(coef.imag());
      const __m256d cm = _mm256_set1_pd(cmag);
      const double* u = reinterpret_cast<const double*>(U + static_cast<long>(c) * ldu);
      for (int i = 0; i < m2; i += 2) {
        const __m256d x = _mm256_loadu_pd(u + 2 * i);
        const __m256d xs = _mm256_permute_pd(x, 0b0101);
        const __m256d prod = _mm256_fmaddsub_pd(x, cr, _mm256_mul_pd(xs, ci));
        _mm256_storeu_pd(&acc[2 * i], _mm256_add_pd(_mm256_loadu_pd(&acc[2 * i]), prod));
        const __m256d ax = _mm256_mul_pd(cabs2(x), cm);
        mag[i] += _mm256_cvtsd_f64(ax);
        mag[i + 1] += _mm256_cvtsd_f64(_mm256_permute4x64_pd(ax, 0b10));
      }
      for (int i = m2; i < m; ++i) {
        const cd p = U[i + static_cast<long>(c) * ldu] * coef;
        acc[2 * i] += p.real();
        acc[2 * i + 1] += p.imag();
        mag[i] += std::abs(U[i + static_cast<long>(c) * ldu]) * cmag;
      }
    }
    __m256d best = _mm256_setzero_pd();
    for (int i = 0; i < m2; i += 2) best = _mm256_max_pd(best, cabs2(_mm256_loadu_pd(&acc[2 * i])));
    out.max_abs = std::max(out.max_abs, hmax(best));
    for (int i = m2; i < m; ++i) out.max_abs = std::max(out.max_abs, std::hypot(acc[2 * i], acc[2 * i + 1]));
    for (int i = 0; i < m; ++i) max_mag = std::max(max_mag, mag[i]);
  }
  out.allowance = 4.0 * (k + 4) * kU * max_mag;
  return out;
}

Residual gram(const cd* U, int ldu, int m, int k) {
  Residual out;
  const int m2 = m & ~1;
  std::vector<double> norms(k);
  for (int c = 0; c < k; ++c) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += std::norm(U[i + static_cast<long>(c) * ldu]);
    norms[c] = std::sqrt(s);
  }
  double max_mag = 0.0;
  for (int j = 0; j < k; ++j) {
    const double* x = reinterpret_cast<const double*>(U + static_cast<long>(j) * ldu);
    for (int l = j; l < k; ++l) {
      const double* y = reinterpret_cast<const double*>(U + static_cast<long>(l) * ldu);
      __m256d re = _mm256_setzero_pd(), im = _mm256_setzero_pd();
      for (int i = 0; i < m2; i += 2) {
        const __m256d xv = _mm256_loadu_pd(x + 2 * i);
        const __m256d yv = _mm256_loadu_pd(y + 2 * i);
        re = _mm256_fmadd_pd(xv, yv, re);                               // xr yr, xi yi
        im = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0b0101), im);    // xr yi, xi yr
      }
      alignas(32) double r[4], t[4];
      _mm256_store_pd(r, re);
      _mm256_store_pd(t, im);
      double sr = (r[0] + r[1]) + (r[2] + r[3]);
      double si = (t[0] - t[1]) + (t[2] - t[3]);
      for (int i = m2; i < m; ++i) {
        const cd p = std::conj(U[i + static_cast<long>(j) * ldu]) * U[i + static_cast<long>(l) * ldu];
        sr += p.real();
        si += p.imag();
      }
      if (j == l) sr -= 1.0;
      out.max_abs = std::max(out.max_abs, std::hypot(sr, si));
      max_mag = std::max(max_mag, norms[j] * norms[l]);
    }
  }
  out.allowance = 5.0 * (m + 4) * kU * max_mag + kU;
  return out;
}

}  // namespace w160::simd::avx2
