#pragma once

// Residual kernels used to verify a computed SVD: max |U D V^H - A| and
// max |U^H U - I|.  A scalar reference and an AVX2/FMA variant; the variant
// is picked at runtime from CPUID.  Matrices are column-major complex double.

#include <complex>

namespace w160::simd {

using cd = std::complex<double>;

struct Residual {
  double max_abs = 0.0;    // largest computed residual entry
  double allowance = 0.0;  // bound on the rounding error of that computation
};

/// U: m x k (ldu), D: k, V: n x k (ldv), A: m x n (lda).
using ReconFn = Residual (*)(const cd* U, int ldu, const double* D, const cd* V, int ldv, const cd* A, int lda, int m,
                             int n, int k);
/// U: m x k (ldu).
using GramFn = Residual (*)(const cd* U, int ldu, int m, int k);

namespace scalar {
Residual recon(const cd* U, int ldu, const double* D, const cd* V, int ldv, const cd* A, int lda, int m, int n, int k);
Residual gram(const cd* U, int ldu, int m, int k);
}  // namespace scalar

namespace avx2 {
/// Only callable when avx2_available().
Residual recon(const cd* U, int ldu, const double* D, const cd* V, int ldv, const cd* A, int lda, int m, int n, int k);
Residual gram(const cd* U, int ldu, int m, int k);
}  // namespace avx2

bool avx2_available();

/// "avx2" or "scalar"; W160_FORCE_SCALAR=1 in the environment forces scalar.
const char* active_backend();

Residual recon_residual(const cd* U, int ldu, const double* D, const cd* V, int ldv, const cd* A, int lda, int m, int n,
                        int k);
Residual gram_residual(const cd* U, int ldu, int m, int k);

}  // namespace w160::simd
