#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "stt/kernels.hpp"
#include "stt/la.hpp"

namespace stt {

LuFactors lu_factor(const Matrix& a) {
  if (a.rows != a.cols) throw std::invalid_argument("lu_factor needs a square matrix");
  const int n = a.rows;
  LuFactors f;
  f.lu = a;
  f.perm.resize(n);
  for (int i = 0; i < n; ++i) f.perm[i] = i;
  Matrix& W = f.lu;
  double maxp = 0.0, minp = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::fabs(W(k, k));
    for (int i = k + 1; i < n; ++i) {
      double v = std::fabs(W(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(W(k, j), W(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
    }
    double p = W(k, k);
    maxp = std::max(maxp, std::fabs(p));
    minp = std::min(minp, std::fabs(p));
    if (p == 0.0) {
      f.singular = true;
      continue;
    }
    double inv = 1.0 / p;
    for (int i = k + 1; i < n; ++i) {
      double l = W(i, k) * inv;
      W(i, k) = l;
      if (l != 0.0) kern::axpy(n - k - 1, -l, &W.a[static_cast<long>(k) * n + k + 1],
                               &W.a[static_cast<long>(i) * n + k + 1]);
    }
  }
  f.max_pivot = maxp;
  f.min_pivot = (n ? minp : 0.0);
  if (n && (minp == 0.0 || minp < maxp * 1e-15)) f.singular = true;
  return f;
}

std::vector<double> lu_solve(const LuFactors& f, std::vector<double> b) {
  const int n = f.lu.rows;
  if (static_cast<int>(b.size()) != n) throw std::invalid_argument("lu_solve size mismatch");
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
    x[i] /= f.lu(i, i);
  }
  return x;
}

std::vector<double> lu_solve_transposed(const LuFactors& f, std::vector<double> b) {
  const int n = f.lu.rows;
  if (static_cast<int>(b.size()) != n)
    throw std::invalid_argument("lu_solve_transposed size mismatch");
  // solve U^T y = b, then L^T z = y, then undo the row permutation
  std::vector<double> y = std::move(b);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) y[i] -= f.lu(j, i) * y[j];
    y[i] /= f.lu(i, i);
  }
  for (int i = n - 1; i >= 0; --i)
    for (int j = i + 1; j < n; ++j) y[i] -= f.lu(j, i) * y[j];
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[f.perm[i]] = y[i];
  return x;
}

// Hager-style 1-norm estimator for ||inv(A)||_1 using the factorization.
double condition_estimate(const Matrix& a, const LuFactors& f) {
  const int n = a.rows;
  if (n == 0) return 0.0;
  if (f.singular) return std::numeric_limits<double>::infinity();
  double anorm = 0.0;
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::fabs(a(i, j));
    anorm = std::max(anorm, s);
  }
  std::vector<double> x(n, 1.0 / n);
  double est = 0.0;
  for (int iter = 0; iter < 5; ++iter) {
    std::vector<double> y = lu_solve(f, x);
    double ynorm = 0.0;
    for (double v : y) ynorm += std::fabs(v);
    est = std::max(est, ynorm);
    std::vector<double> xi(n);
    for (int i = 0; i < n; ++i) xi[i] = (y[i] >= 0 ? 1.0 : -1.0);
    std::vector<double> z = lu_solve_transposed(f, xi);
    int jmax = 0;
    double zmax = 0.0;
    for (int i = 0; i < n; ++i)
      if (std::fabs(z[i]) > zmax) {
        zmax = std::fabs(z[i]);
        jmax = i;
      }
    double zx = kern::dot(n, z.data(), x.data());
    if (zmax <= zx + 1e-30) break;
    x.assign(n, 0.0);
    x[jmax] = 1.0;
  }
  return anorm * est;
}

std::vector<double> solve_dense(const Matrix& a, const std::vector<double>& b) {
  LuFactors f = lu_factor(a);
  if (f.singular) {
    std::ostringstream os;
    os << "dense solve failed: matrix is singular to working precision (condition estimate ";
    double c = f.min_pivot > 0 ? f.max_pivot / f.min_pivot : std::numeric_limits<double>::infinity();
    os << c << ")";
    throw std::runtime_error(os.str());
  }
  return lu_solve(f, b);
}

}  // namespace stt
