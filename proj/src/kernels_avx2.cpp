// AVX2+FMA kernel variants. This file is the only one compiled with
// -mavx2 -mfma; it must not be entered unless cpuid reports support.

#include <immintrin.h>

#include <cmath>

namespace stt::kern::avx2 {

void gemm_nn(int m, int n, int k, double alpha, const double* A, int lda,
             const double* B, int ldb, double beta, double* C, int ldc) {
  for (int i = 0; i < m; ++i) {
    double* Ci = C + static_cast<long>(i) * ldc;
    if (beta == 0.0) {
      for (int j = 0; j < n; ++j) Ci[j] = 0.0;
    } else if (beta != 1.0) {
      for (int j = 0; j < n; ++j) Ci[j] *= beta;
    }
    const double* Ai = A + static_cast<long>(i) * lda;
    for (int p = 0; p < k; ++p) {
      double aip = alpha * Ai[p];
      if (aip == 0.0) continue;
      const double* Bp = B + static_cast<long>(p) * ldb;
      __m256d va = _mm256_set1_pd(aip);
      int j = 0;
      for (; j + 16 <= n; j += 16) {
        __m256d c0 = _mm256_loadu_pd(Ci + j);
        __m256d c1 = _mm256_loadu_pd(Ci + j + 4);
        __m256d c2 = _mm256_loadu_pd(Ci + j + 8);
        __m256d c3 = _mm256_loadu_pd(Ci + j + 12);
        c0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(Bp + j), c0);
        c1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(Bp + j + 4), c1);
        c2 = _mm256_fmadd_pd(va, _mm256_loadu_pd(Bp + j + 8), c2);
        c3 = _mm256_fmadd_pd(va, _mm256_loadu_pd(Bp + j + 12), c3);
        _mm256_storeu_pd(Ci + j, c0);
        _mm256_storeu_pd(Ci + j + 4, c1);
        _mm256_storeu_pd(Ci + j + 8, c2);
        _mm256_storeu_pd(Ci + j + 12, c3);
      }
      for (; j + 4 <= n; j += 4) {
        __m256d c0 = _mm256_loadu_pd(Ci + j);
        c0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(Bp + j), c0);
        _mm256_storeu_pd(Ci + j, c0);
      }
      for (; j < n; ++j) Ci[j] += aip * Bp[j];
    }
  }
}

void gemm_tn(int m, int n, int k, double alpha, const double* A, int lda,
             const double* B, int ldb, double beta, double* C, int ldc) {
  for (int i = 0; i < m; ++i) {
    double* Ci = C + static_cast<long>(i) * ldc;
    if (beta == 0.0) {
      for (int j = 0; j < n; ++j) Ci[j] = 0.0;
    } else if (beta != 1.0) {
      for (int j = 0; j < n; ++j) Ci[j] *= beta;
    }
  }
  for (int p = 0; p < k; ++p) {
    const double* Ap = A + static_cast<long>(p) * lda;
    const double* Bp = B + static_cast<long>(p) * ldb;
    for (int i = 0; i < m; ++i) {
      double api = alpha * Ap[i];
      if (api == 0.0) continue;
      double* Ci = C + static_cast<long>(i) * ldc;
      __m256d va = _mm256_set1_pd(api);
      int j = 0;
      for (; j + 4 <= n; j += 4) {
        __m256d c0 = _mm256_loadu_pd(Ci + j);
        c0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(Bp + j), c0);
        _mm256_storeu_pd(Ci + j, c0);
      }
      for (; j < n; ++j) Ci[j] += api * Bp[j];
    }
  }
}

static inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

static inline double dot_impl(int n, const double* x, const double* y) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  int i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), s1);
  }
  for (; i + 4 <= n; i += 4)
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), s0);
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void gemm_nt(int m, int n, int k, double alpha, const double* A, int lda,
             const double* B, int ldb, double beta, double* C, int ldc) {
  for (int i = 0; i < m; ++i) {
    const double* Ai = A + static_cast<long>(i) * lda;
    double* Ci = C + static_cast<long>(i) * ldc;
    for (int j = 0; j < n; ++j) {
      double s = dot_impl(k, Ai, B + static_cast<long>(j) * ldb);
      Ci[j] = alpha * s + (beta == 0.0 ? 0.0 : beta * Ci[j]);
    }
  }
}

double dot(int n, const double* x, const double* y) { return dot_impl(n, x, y); }

void axpy(int n, double a, const double* x, double* y) {
  __m256d va = _mm256_set1_pd(a);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scal(int n, double a, double* x) {
  __m256d va = _mm256_set1_pd(a);
  int i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

double nrm2(int n, const double* x) {
  double mx = 0.0;
  for (int i = 0; i < n; ++i) mx = std::max(mx, std::fabs(x[i]));
  if (mx == 0.0) return 0.0;
  double inv = 1.0 / mx;
  __m256d vi = _mm256_set1_pd(inv);
  __m256d s0 = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_mul_pd(vi, _mm256_loadu_pd(x + i));
    s0 = _mm256_fmadd_pd(t, t, s0);
  }
  double s = hsum(s0);
  for (; i < n; ++i) {
    double t = x[i] * inv;
    s += t * t;
  }
  return mx * std::sqrt(s);
}

void rot(int n, double* x, double* y, double c, double s) {
  __m256d vc = _mm256_set1_pd(c);
  __m256d vs = _mm256_set1_pd(s);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d xi = _mm256_loadu_pd(x + i);
    __m256d yi = _mm256_loadu_pd(y + i);
    __m256d nx = _mm256_fmadd_pd(vc, xi, _mm256_mul_pd(vs, yi));
    __m256d ny = _mm256_fmsub_pd(vc, yi, _mm256_mul_pd(vs, xi));
    _mm256_storeu_pd(x + i, nx);
    _mm256_storeu_pd(y + i, ny);
  }
  for (; i < n; ++i) {
    double xi = x[i];
    double yi = y[i];
    x[i] = c * xi + s * yi;
    y[i] = -s * xi + c * yi;
  }
}

}  // namespace stt::kern::avx2
