#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "stt/kernels.hpp"
#include "stt/la.hpp"

namespace stt {

namespace {

// One-sided Jacobi on the columns of W (m x n, m >= n expected by caller):
// rotates column pairs until mutual orthogonality, accumulating V.
// On return W = U * diag(s) (columns scaled), V holds right singular vectors.
//
// Columns are kept in a column-major scratch so each rotation touches two
// contiguous arrays.
struct JacobiWork {
  int m, n;
  std::vector<double> w;  // column-major m x n
  std::vector<double> v;  // column-major n x n

  double* wc(int j) { return w.data() + static_cast<long>(j) * m; }
  double* vc(int j) { return v.data() + static_cast<long>(j) * n; }
};

void jacobi_sweeps(JacobiWork& J) {
  const int m = J.m, n = J.n;
  const double eps = 1e-15;
  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double* wp = J.wc(p);
        double* wq = J.wc(q);
        double app = kern::dot(m, wp, wp);
        double aqq = kern::dot(m, wq, wq);
        double apq = kern::dot(m, wp, wq);
        if (std::fabs(apq) <= eps * std::sqrt(app * aqq) || apq == 0.0) continue;
        rotated = true;
        double tau = (aqq - app) / (2.0 * apq);
        double t = (tau >= 0 ? -1.0 : 1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        kern::rot(m, wp, wq, c, s);
        kern::rot(n, J.vc(p), J.vc(q), c, s);
      }
    }
    if (!rotated) break;
  }
}

SvdResult svd_square_tail(const Matrix& a);

}  // namespace

SvdResult svd(const Matrix& a) {
  for (double x : a.a)
    if (!std::isfinite(x)) throw std::invalid_argument("svd input has non-finite entries");
  if (a.rows < a.cols) {
    // factor the transpose, then swap roles of the factors
    SvdResult t = svd(transpose(a));
    SvdResult r;
    r.singular_values = t.singular_values;
    r.left_factor = transpose(t.right_factor);
    r.right_factor = transpose(t.left_factor);
    return r;
  }
  // strongly tall inputs: QR first, Jacobi on the small square factor
  if (a.rows > 2 * a.cols && a.cols > 0) {
    auto [Q, R] = qr_decompose(a);
    SvdResult t = svd_square_tail(R);
    t.left_factor = matmul(Q, t.left_factor);
    return t;
  }
  return svd_square_tail(a);
}

namespace {

SvdResult svd_square_tail(const Matrix& a) {
  const int m = a.rows, n = a.cols;
  JacobiWork J;
  J.m = m;
  J.n = n;
  J.w.assign(static_cast<size_t>(m) * n, 0.0);
  J.v.assign(static_cast<size_t>(n) * n, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) J.wc(j)[i] = a(i, j);
    J.vc(j)[j] = 1.0;
  }
  jacobi_sweeps(J);

  std::vector<double> norms(n);
  for (int j = 0; j < n; ++j) norms[j] = kern::nrm2(m, J.wc(j));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return norms[i] > norms[j]; });

  // drop numerically zero directions entirely (keeps factors orthonormal);
  // denormal values count as zero since 1/s would overflow
  double cutoff =
      std::max((n ? norms[order[0]] : 0.0) * 1e-308, std::numeric_limits<double>::min());
  int r = 0;
  while (r < n && norms[order[r]] >= cutoff) ++r;

  SvdResult out;
  out.singular_values.resize(r);
  out.left_factor = Matrix(m, r);
  out.right_factor = Matrix(r, n);
  for (int jj = 0; jj < r; ++jj) {
    int j = order[jj];
    double s = norms[j];
    out.singular_values[jj] = s;
    double inv = 1.0 / s;
    const double* col = J.wc(j);
    for (int i = 0; i < m; ++i) out.left_factor(i, jj) = col[i] * inv;
    const double* vcol = J.vc(j);
    for (int i = 0; i < n; ++i) out.right_factor(jj, i) = vcol[i];
  }
  return out;
}

SvdResult truncate_by_tail(SvdResult full, double abs_tail_sq, int rmax) {
  const int total = static_cast<int>(full.singular_values.size());
  // largest r with sum of discarded squares <= abs_tail_sq
  double tail = 0.0;
  int r = total;
  while (r > 0) {
    double s = full.singular_values[r - 1];
    if (tail + s * s > abs_tail_sq) break;
    tail += s * s;
    --r;
  }
  r = std::min(r, rmax);
  if (r == total) return full;
  SvdResult out;
  out.singular_values.assign(full.singular_values.begin(), full.singular_values.begin() + r);
  out.left_factor = Matrix(full.left_factor.rows, r);
  for (int i = 0; i < out.left_factor.rows; ++i)
    for (int j = 0; j < r; ++j) out.left_factor(i, j) = full.left_factor(i, j);
  out.right_factor = Matrix(r, full.right_factor.cols);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < out.right_factor.cols; ++j) out.right_factor(i, j) = full.right_factor(i, j);
  return out;
}

}  // namespace

SvdResult truncated_svd(const Matrix& a, double tol, int rmax) {
  if (tol < 0) throw std::invalid_argument("negative svd tolerance");
  if (rmax < 1) throw std::invalid_argument("svd rmax must be >= 1");
  SvdResult full = svd(a);
  double total_sq = 0.0;
  for (double s : full.singular_values) total_sq += s * s;
  return truncate_by_tail(std::move(full), tol * tol * total_sq, rmax);
}

SvdResult truncated_svd_abs(const Matrix& a, double abs_tail, int rmax) {
  SvdResult full = svd(a);
  return truncate_by_tail(std::move(full), abs_tail * abs_tail, rmax);
}

}  // namespace stt
