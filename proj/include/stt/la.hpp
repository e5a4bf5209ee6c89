#pragma once

#include <limits>
#include <vector>

#include "stt/matrix.hpp"

namespace stt {

// Truncated singular value decomposition: a ~= left * diag(s) * right,
// left has orthonormal columns, right has orthonormal rows.
struct SvdResult {
  Matrix left_factor;                  // m x r
  std::vector<double> singular_values; // length r, nonincreasing
  Matrix right_factor;                 // r x n
};

// Full SVD via one-sided Jacobi (QR preprocessing for strongly rectangular
// inputs). All singular values kept, including numerically zero ones.
SvdResult svd(const Matrix& a);

// Rank chosen by the relative Frobenius-tail criterion
//   sum_{k>r} s_k^2 <= tol^2 * sum_k s_k^2,
// capped at rmax. tol=0 keeps every nonzero singular value.
SvdResult truncated_svd(const Matrix& a, double tol, int rmax = std::numeric_limits<int>::max());

// Absolute-budget variant used by train rounding: discards the largest tail
// with sqrt(sum of discarded s_k^2) <= abs_tail.
SvdResult truncated_svd_abs(const Matrix& a, double abs_tail, int rmax = std::numeric_limits<int>::max());

struct QrResult {
  Matrix orthonormal; // m x min(m,n)
  Matrix triangular;  // min(m,n) x n
};

// Householder QR, thin form.
QrResult qr_decompose(const Matrix& a);

struct LuFactors {
  Matrix lu;              // combined L (unit lower) and U
  std::vector<int> perm;  // row permutation
  bool singular = false;
  double min_pivot = 0.0;
  double max_pivot = 0.0;
};

LuFactors lu_factor(const Matrix& a);
std::vector<double> lu_solve(const LuFactors& f, std::vector<double> b);
// Solve with A^T using the same factorization.
std::vector<double> lu_solve_transposed(const LuFactors& f, std::vector<double> b);

// 1-norm condition estimate (Hager's method on the factorization).
double condition_estimate(const Matrix& a, const LuFactors& f);

// Throws on numerically singular systems, message carries the condition
// estimate.
std::vector<double> solve_dense(const Matrix& a, const std::vector<double>& b);

struct MaxvolResult {
  std::vector<int> rows;  // sorted, size = a.cols
  bool converged = true;
};

// Quasi-maximum-volume row subset of a tall matrix: every entry of
// a * inv(a[rows]) ends up <= 1+tol in absolute value.
MaxvolResult maxvol(const Matrix& a, double tol = 1e-2, int max_iters = 400);

Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace stt
