#pragma once

// Dense floating-point kernels used by all linear-algebra and tensor
// contractions. Each kernel has a scalar reference implementation and an
// AVX2+FMA variant; the active set is chosen once at startup from cpuid and
// can be overridden for equivalence testing.

namespace stt::kern {

// C (m x n, row-major, leading dim ldc) = alpha * A * B + beta * C
// A: m x k (lda), B: k x n (ldb)
void gemm_nn(int m, int n, int k, double alpha, const double* A, int lda,
             const double* B, int ldb, double beta, double* C, int ldc);

// C = alpha * A^T * B + beta * C, with A stored k x m (lda)
void gemm_tn(int m, int n, int k, double alpha, const double* A, int lda,
             const double* B, int ldb, double beta, double* C, int ldc);

// C = alpha * A * B^T + beta * C, with B stored n x k (ldb)
void gemm_nt(int m, int n, int k, double alpha, const double* A, int lda,
             const double* B, int ldb, double beta, double* C, int ldc);

double dot(int n, const double* x, const double* y);
void axpy(int n, double a, const double* x, double* y);
void scal(int n, double a, double* x);
double nrm2(int n, const double* x);

// Plane rotation applied to two contiguous vectors:
// (x, y) <- (c*x + s*y, -s*x + c*y)
void rot(int n, double* x, double* y, double c, double s);

// "scalar", "avx2"
const char* active_backend();

// "scalar" | "avx2" | "auto"; returns false if the request is unavailable
bool force_backend(const char* name);

}  // namespace stt::kern
