#include "stt/kernels.hpp"

#include <cmath>
#include <cstring>
#include <string>

namespace stt::kern {
namespace scalar {

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
      for (int j = 0; j < n; ++j) Ci[j] += aip * Bp[j];
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
      for (int j = 0; j < n; ++j) Ci[j] += api * Bp[j];
    }
  }
}

void gemm_nt(int m, int n, int k, double alpha, const double* A, int lda,
             const double* B, int ldb, double beta, double* C, int ldc) {
  for (int i = 0; i < m; ++i) {
    const double* Ai = A + static_cast<long>(i) * lda;
    double* Ci = C + static_cast<long>(i) * ldc;
    for (int j = 0; j < n; ++j) {
      const double* Bj = B + static_cast<long>(j) * ldb;
      double s = 0.0;
      for (int p = 0; p < k; ++p) s += Ai[p] * Bj[p];
      Ci[j] = alpha * s + (beta == 0.0 ? 0.0 : beta * Ci[j]);
    }
  }
}

double dot(int n, const double* x, const double* y) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(int n, double a, const double* x, double* y) {
  for (int i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal(int n, double a, double* x) {
  for (int i = 0; i < n; ++i) x[i] *= a;
}

double nrm2(int n, const double* x) {
  // two-pass scaled norm, robust against overflow/underflow
  double mx = 0.0;
  for (int i = 0; i < n; ++i) mx = std::max(mx, std::fabs(x[i]));
  if (mx == 0.0) return 0.0;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    double t = x[i] / mx;
    s += t * t;
  }
  return mx * std::sqrt(s);
}

void rot(int n, double* x, double* y, double c, double s) {
  for (int i = 0; i < n; ++i) {
    double xi = x[i];
    double yi = y[i];
    x[i] = c * xi + s * yi;
    y[i] = -s * xi + c * yi;
  }
}

}  // namespace scalar

namespace avx2 {
// defined in kernels_avx2.cpp
void gemm_nn(int, int, int, double, const double*, int, const double*, int, double, double*, int);
void gemm_tn(int, int, int, double, const double*, int, const double*, int, double, double*, int);
void gemm_nt(int, int, int, double, const double*, int, const double*, int, double, double*, int);
double dot(int, const double*, const double*);
void axpy(int, double, const double*, double*);
void scal(int, double, double*);
double nrm2(int, const double*);
void rot(int, double*, double*, double, double);
}  // namespace avx2

namespace {

struct Backend {
  const char* name;
  void (*gemm_nn)(int, int, int, double, const double*, int, const double*, int, double, double*, int);
  void (*gemm_tn)(int, int, int, double, const double*, int, const double*, int, double, double*, int);
  void (*gemm_nt)(int, int, int, double, const double*, int, const double*, int, double, double*, int);
  double (*dot)(int, const double*, const double*);
  void (*axpy)(int, double, const double*, double*);
  void (*scal)(int, double, double*);
  double (*nrm2)(int, const double*);
  void (*rot)(int, double*, double*, double, double);
};

constexpr Backend kScalar = {"scalar", scalar::gemm_nn, scalar::gemm_tn, scalar::gemm_nt,
                             scalar::dot, scalar::axpy, scalar::scal, scalar::nrm2, scalar::rot};
constexpr Backend kAvx2 = {"avx2", avx2::gemm_nn, avx2::gemm_tn, avx2::gemm_nt,
                           avx2::dot, avx2::axpy, avx2::scal, avx2::nrm2, avx2::rot};

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Backend* pick_default() { return avx2_available() ? &kAvx2 : &kScalar; }

const Backend* g_backend = pick_default();

}  // namespace

void gemm_nn(int m, int n, int k, double alpha, const double* A, int lda,
             const double* B, int ldb, double beta, double* C, int ldc) {
  g_backend->gemm_nn(m, n, k, alpha, A, lda, B, ldb, beta, C, ldc);
}
void gemm_tn(int m, int n, int k, double alpha, const double* A, int lda,
             const double* B, int ldb, double beta, double* C, int ldc) {
  g_backend->gemm_tn(m, n, k, alpha, A, lda, B, ldb, beta, C, ldc);
}
void gemm_nt(int m, int n, int k, double alpha, const double* A, int lda,
             const double* B, int ldb, double beta, double* C, int ldc) {
  g_backend->gemm_nt(m, n, k, alpha, A, lda, B, ldb, beta, C, ldc);
}
double dot(int n, const double* x, const double* y) { return g_backend->dot(n, x, y); }
void axpy(int n, double a, const double* x, double* y) { g_backend->axpy(n, a, x, y); }
void scal(int n, double a, double* x) { g_backend->scal(n, a, x); }
double nrm2(int n, const double* x) { return g_backend->nrm2(n, x); }
void rot(int n, double* x, double* y, double c, double s) { g_backend->rot(n, x, y, c, s); }

const char* active_backend() { return g_backend->name; }

bool force_backend(const char* name) {
  std::string w = name ? name : "";
  if (w == "scalar") {
    g_backend = &kScalar;
    return true;
  }
  if (w == "avx2") {
    if (!avx2_available()) return false;
    g_backend = &kAvx2;
    return true;
  }
  if (w == "auto") {
    g_backend = pick_default();
    return true;
  }
  return false;
}

}  // namespace stt::kern
