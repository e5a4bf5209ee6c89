#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "stt/kernels.hpp"
#include "stt/la.hpp"

namespace stt {

// Greedy quasi-maxvol: LU-with-partial-pivoting picks the starting rows, then
// single-entry swaps until |A * inv(A[rows])| <= 1+tol everywhere.
MaxvolResult maxvol(const Matrix& a, double tol, int max_iters) {
  const int n = a.rows, r = a.cols;
  if (n < r) throw std::invalid_argument("maxvol needs a tall matrix (rows >= cols)");
  if (r == 0) return {{}, true};

  // LU with partial pivoting on a copy; the pivot rows form the initial set
  Matrix W = a;
  std::vector<int> rowid(n);
  for (int i = 0; i < n; ++i) rowid[i] = i;
  for (int k = 0; k < r; ++k) {
    int piv = k;
    double best = std::fabs(W(k, k));
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(W(i, k)) > best) {
        best = std::fabs(W(i, k));
        piv = i;
      }
    if (best == 0.0) throw std::runtime_error("maxvol: input is rank-deficient");
    if (piv != k) {
      for (int j = 0; j < r; ++j) std::swap(W(k, j), W(piv, j));
      std::swap(rowid[k], rowid[piv]);
    }
    double inv = 1.0 / W(k, k);
    for (int i = k + 1; i < n; ++i) {
      double l = W(i, k) * inv;
      W(i, k) = l;
      if (l != 0.0)
        kern::axpy(r - k - 1, -l, &W.a[static_cast<long>(k) * r + k + 1],
                   &W.a[static_cast<long>(i) * r + k + 1]);
    }
  }
  std::vector<int> rows(rowid.begin(), rowid.begin() + r);

  // B = A * inv(A[rows]): solve via LU of A[rows]^T column by column
  Matrix sub(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) sub(i, j) = a(rows[i], j);
  LuFactors f = lu_factor(transpose(sub));
  if (f.singular) throw std::runtime_error("maxvol: selected submatrix is singular");
  Matrix B(n, r);
  {
    std::vector<double> row(r);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < r; ++j) row[j] = a(i, j);
      auto c = lu_solve(f, row);
      for (int j = 0; j < r; ++j) B(i, j) = c[j];
    }
  }

  MaxvolResult out;
  out.rows = rows;
  out.converged = false;
  std::vector<double> bcol(n), brow(r);
  for (int iter = 0; iter < max_iters; ++iter) {
    int bi = 0, bj = 0;
    double best = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < r; ++j)
        if (std::fabs(B(i, j)) > best) {
          best = std::fabs(B(i, j));
          bi = i;
          bj = j;
        }
    if (best <= 1.0 + tol) {
      out.converged = true;
      break;
    }
    // swap row rows[bj] -> bi and rank-1 update B
    double pivot = B(bi, bj);
    for (int i = 0; i < n; ++i) bcol[i] = B(i, bj);
    for (int j = 0; j < r; ++j) brow[j] = B(bi, j);
    brow[bj] -= 1.0;
    double inv = 1.0 / pivot;
    for (int i = 0; i < n; ++i) {
      if (bcol[i] == 0.0) continue;
      kern::axpy(r, -bcol[i] * inv, brow.data(), &B.a[static_cast<long>(i) * r]);
    }
    out.rows[bj] = bi;
  }
  std::sort(out.rows.begin(), out.rows.end());
  return out;
}

}  // namespace stt
