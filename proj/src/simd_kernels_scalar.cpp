#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "w160/simd_kernels.hpp"

namespace w160::simd {

namespace {
constexpr double kU = 0x1p-53;
}

namespace scalar {

Residual recon(const cd* U, int ldu, const double* D, const cd* V, int ldv, const cd* A, int lda, int m, int n, int k) {
  Residual out;
  double max_mag = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) {
      const cd a = A[i + static_cast<long>(j) * lda];
      cd s = -a;
      double mag = std::abs(a);
      for (int c = 0; c < k; ++c) {
        const cd u = U[i + static_cast<long>(c) * ldu];
        const cd v = V[j + static_cast<long>(c) * ldv];
        s += u * (D[c] * std::conj(v));
        mag += std::abs(u) * D[c] * std::abs(v);
      }
      out.max_abs = std::max(out.max_abs, std::abs(s));
      max_mag = std::max(max_mag, mag);
    }
  }
  out.allowance = 4.0 * (k + 4) * kU * max_mag;
  return out;
}

Residual gram(const cd* U, int ldu, int m, int k) {
  Residual out;
  std::vector<double> norms(k);
  for (int c = 0; c < k; ++c) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += std::norm(U[i + static_cast<long>(c) * ldu]);
    norms[c] = std::sqrt(s);
  }
  double max_mag = 0.0;
  for (int j = 0; j < k; ++j) {
    for (int l = j; l < k; ++l) {
      cd s = 0.0;
      for (int i = 0; i < m; ++i) s += std::conj(U[i + static_cast<long>(j) * ldu]) * U[i + static_cast<long>(l) * ldu];
      if (j == l) s -= 1.0;
      out.max_abs = std::max(out.max_abs, std::abs(s));
      max_mag = std::max(max_mag, norms[j] * norms[l]);
    }
  }
  out.allowance = 5.0 * (m + 4) * kU * max_mag + kU;
  return out;
}

}  // namespace scalar

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

bool use_avx2() {
  static const bool value = [] {
    const char* force = std::getenv("W160_FORCE_SCALAR");
    if (force && *force && *force != '0') return false;
    return avx2_available();
  }();
  return value;
}

}  // namespace

const char* active_backend() { return use_avx2() ? "avx2" : "scalar"; }

Residual recon_residual(const cd* U, int ldu, const double* D, const cd* V, int ldv, const cd* A, int lda, int m, int n,
                        int k) {
  static const ReconFn fn = use_avx2() ? &avx2::recon : &scalar::recon;
  return fn(U, ldu, D, V, ldv, A, lda, m, n, k);
}

Residual gram_residual(const cd* U, int ldu, int m, int k) {
  static const GramFn fn = use_avx2() ? &avx2::gram : &scalar::gram;
  return fn(U, ldu, m, k);
}

}  // namespace w160::simd
