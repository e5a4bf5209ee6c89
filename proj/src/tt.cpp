#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "stt/kernels.hpp"
#include "stt/la.hpp"
#include "stt/tt.hpp"

namespace stt {

namespace {

Matrix wrap(const std::vector<double>& data, int rows, int cols) {
  if (static_cast<size_t>(rows) * cols != data.size())
    throw std::logic_error("train core reshape size mismatch");
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.a.begin());
  return m;
}

// Truncated bond factorization a ~= left * right with orthonormal left
// columns. An input that truncates away entirely yields a rank-1 zero pair.
struct BondSplit {
  Matrix left;
  Matrix right;
};

BondSplit split_bond(const Matrix& m, double abs_tail, int rmax) {
  SvdResult f = truncated_svd_abs(m, abs_tail, rmax);
  const int r = static_cast<int>(f.singular_values.size());
  if (r == 0) return {Matrix(m.rows, 1), Matrix(1, m.cols)};
  Matrix right(r, m.cols);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < m.cols; ++j) right(i, j) = f.singular_values[i] * f.right_factor(i, j);
  return {std::move(f.left_factor), std::move(right)};
}

void check_same_modes(const std::vector<int>& a, const std::vector<int>& b) {
  if (a != b) throw std::invalid_argument("train mode sizes differ");
}

}  // namespace

std::vector<int> TTVector::mode_sizes() const {
  std::vector<int> out(cores.size());
  for (size_t k = 0; k < cores.size(); ++k) out[k] = cores[k].n;
  return out;
}

std::vector<int> TTVector::ranks() const {
  std::vector<int> out;
  for (size_t k = 0; k + 1 < cores.size(); ++k) out.push_back(cores[k].r1);
  return out;
}

int TTVector::max_rank() const {
  int r = 1;
  for (const TTCore& c : cores) r = std::max({r, c.r0, c.r1});
  return r;
}

long long TTVector::parameter_count() const {
  long long total = 0;
  for (const TTCore& c : cores) total += static_cast<long long>(c.a.size());
  return total;
}

double TTVector::element(const std::vector<int>& idx) const {
  if (static_cast<int>(idx.size()) != order())
    throw std::invalid_argument("train index arity mismatch");
  std::vector<double> v{1.0}, w;
  for (int k = 0; k < order(); ++k) {
    const TTCore& c = cores[k];
    if (idx[k] < 0 || idx[k] >= c.n) throw std::out_of_range("train index out of range");
    w.assign(c.r1, 0.0);
    for (int i = 0; i < c.r0; ++i) {
      const double vi = v[i];
      if (vi == 0.0) continue;
      const double* row = c.a.data() + (static_cast<size_t>(i) * c.n + idx[k]) * c.r1;
      kern::axpy(c.r1, vi, row, w.data());
    }
    v.swap(w);
  }
  return v[0];
}

void TTVector::validate() const {
  if (cores.empty()) throw std::invalid_argument("train has no cores");
  if (cores.front().r0 != 1 || cores.back().r1 != 1)
    throw std::invalid_argument("train boundary ranks must be 1");
  for (size_t k = 0; k < cores.size(); ++k) {
    const TTCore& c = cores[k];
    if (c.r0 < 1 || c.n < 1 || c.r1 < 1) throw std::invalid_argument("train core has empty axis");
    if (c.a.size() != static_cast<size_t>(c.r0) * c.n * c.r1)
      throw std::invalid_argument("train core data length mismatch");
    if (k + 1 < cores.size() && c.r1 != cores[k + 1].r0)
      throw std::invalid_argument("train ranks do not chain");
    for (double x : c.a)
      if (!std::isfinite(x)) throw std::invalid_argument("train has non-finite entries");
  }
}

std::vector<int> TTMatrix::row_sizes() const {
  std::vector<int> out(cores.size());
  for (size_t k = 0; k < cores.size(); ++k) out[k] = cores[k].m;
  return out;
}

std::vector<int> TTMatrix::col_sizes() const {
  std::vector<int> out(cores.size());
  for (size_t k = 0; k < cores.size(); ++k) out[k] = cores[k].n;
  return out;
}

std::vector<int> TTMatrix::ranks() const {
  std::vector<int> out;
  for (size_t k = 0; k + 1 < cores.size(); ++k) out.push_back(cores[k].r1);
  return out;
}

int TTMatrix::max_rank() const {
  int r = 1;
  for (const TTMatCore& c : cores) r = std::max({r, c.r0, c.r1});
  return r;
}

long long TTMatrix::parameter_count() const {
  long long total = 0;
  for (const TTMatCore& c : cores) total += static_cast<long long>(c.a.size());
  return total;
}

void TTMatrix::validate() const {
  if (cores.empty()) throw std::invalid_argument("operator train has no cores");
  if (cores.front().r0 != 1 || cores.back().r1 != 1)
    throw std::invalid_argument("operator train boundary ranks must be 1");
  for (size_t k = 0; k < cores.size(); ++k) {
    const TTMatCore& c = cores[k];
    if (c.r0 < 1 || c.m < 1 || c.n < 1 || c.r1 < 1)
      throw std::invalid_argument("operator core has empty axis");
    if (c.a.size() != static_cast<size_t>(c.r0) * c.m * c.n * c.r1)
      throw std::invalid_argument("operator core data length mismatch");
    if (k + 1 < cores.size() && c.r1 != cores[k + 1].r0)
      throw std::invalid_argument("operator train ranks do not chain");
    for (double x : c.a)
      if (!std::isfinite(x)) throw std::invalid_argument("operator train has non-finite entries");
  }
}

TTVector tt_zero(const std::vector<int>& dims) {
  if (dims.empty()) throw std::invalid_argument("train needs at least one mode");
  TTVector out;
  for (int n : dims) out.cores.emplace_back(1, n, 1);
  return out;
}

TTVector tt_ones(const std::vector<int>& dims) {
  TTVector out = tt_zero(dims);
  for (TTCore& c : out.cores) std::fill(c.a.begin(), c.a.end(), 1.0);
  return out;
}

TTVector tt_from_dense(const DenseTensor& x, double tol, int rmax) {
  if (tol < 0) throw std::invalid_argument("negative train tolerance");
  if (rmax < 1) throw std::invalid_argument("train rmax must be >= 1");
  for (double v : x.a)
    if (!std::isfinite(v)) throw std::invalid_argument("tensor has non-finite entries");
  const int d = x.order();
  TTVector out;
  if (d == 1) {
    TTCore c(1, x.shape[0], 1);
    c.a = x.a;
    out.cores.push_back(std::move(c));
    return out;
  }
  const double nrm = x.frob_norm();
  if (nrm == 0.0) return tt_zero(x.shape);
  const double delta = tol * nrm / std::sqrt(static_cast<double>(d - 1));

  Matrix cur = wrap(x.a, x.shape[0], static_cast<int>(x.size() / x.shape[0]));
  int rprev = 1;
  for (int k = 0; k < d - 1; ++k) {
    BondSplit bs = split_bond(cur, delta, rmax);
    const int r = bs.left.cols;
    TTCore c(rprev, x.shape[k], r);
    c.a.assign(bs.left.a.begin(), bs.left.a.end());
    out.cores.push_back(std::move(c));
    rprev = r;
    if (k + 1 < d - 1) {
      const int n_next = x.shape[k + 1];
      cur = wrap(bs.right.a, rprev * n_next, bs.right.cols / n_next);
    } else {
      TTCore last(rprev, x.shape[d - 1], 1);
      last.a.assign(bs.right.a.begin(), bs.right.a.end());
      out.cores.push_back(std::move(last));
    }
  }
  return out;
}

DenseTensor tt_to_dense(const TTVector& x, long long element_cap) {
  x.validate();
  long long total = 1;
  for (int n : x.mode_sizes()) {
    total *= n;
    if (total > element_cap)
      throw std::runtime_error("train materialization exceeds the element cap");
  }
  Matrix cur = wrap(x.cores[0].a, x.cores[0].n, x.cores[0].r1);
  for (int k = 1; k < x.order(); ++k) {
    const TTCore& c = x.cores[k];
    Matrix prod = matmul(cur, wrap(c.a, c.r0, c.n * c.r1));
    cur = wrap(prod.a, prod.rows * c.n, c.r1);
  }
  return DenseTensor(x.mode_sizes(), std::move(cur.a));
}

void left_orthogonalize_step(TTVector& x, int k) {
  if (k < 0 || k + 1 >= x.order())
    throw std::invalid_argument("left orthogonalization needs an interior bond");
  TTCore& c = x.cores[k];
  QrResult f = qr_decompose(wrap(c.a, c.r0 * c.n, c.r1));
  c.r1 = f.orthonormal.cols;
  c.a.assign(f.orthonormal.a.begin(), f.orthonormal.a.end());
  TTCore& nx = x.cores[k + 1];
  Matrix moved = matmul(f.triangular, wrap(nx.a, nx.r0, nx.n * nx.r1));
  nx.r0 = moved.rows;
  nx.a.assign(moved.a.begin(), moved.a.end());
}

void right_orthogonalize_step(TTVector& x, int k) {
  if (k < 1 || k >= x.order())
    throw std::invalid_argument("right orthogonalization needs an interior bond");
  TTCore& c = x.cores[k];
  QrResult f = qr_decompose(transpose(wrap(c.a, c.r0, c.n * c.r1)));
  Matrix q = transpose(f.orthonormal);  // rows orthonormal, shape p x (n*r1)
  c.r0 = q.rows;
  c.a.assign(q.a.begin(), q.a.end());
  TTCore& pv = x.cores[k - 1];
  Matrix moved = matmul_nt(wrap(pv.a, pv.r0 * pv.n, pv.r1), f.triangular);
  pv.r1 = moved.cols;
  pv.a.assign(moved.a.begin(), moved.a.end());
}

double tt_norm(const TTVector& x) {
  x.validate();
  TTVector t = x;
  for (int k = t.order() - 1; k >= 1; --k) right_orthogonalize_step(t, k);
  return kern::nrm2(static_cast<int>(t.cores[0].a.size()), t.cores[0].a.data());
}

TTVector tt_round(const TTVector& x, double tol, int rmax) {
  if (tol < 0) throw std::invalid_argument("negative train tolerance");
  if (rmax < 1) throw std::invalid_argument("train rmax must be >= 1");
  x.validate();
  TTVector t = x;
  const int d = t.order();
  if (d == 1) return t;
  for (int k = d - 1; k >= 1; --k) right_orthogonalize_step(t, k);
  const double nrm = kern::nrm2(static_cast<int>(t.cores[0].a.size()), t.cores[0].a.data());
  if (nrm == 0.0) return tt_zero(t.mode_sizes());
  // After right orthogonalization the remaining chain has orthonormal rows,
  // so per-bond singular values measure the global error exactly; splitting
  // the budget evenly keeps the total below tol * |x|.
  const double delta = tol * nrm / std::sqrt(static_cast<double>(d - 1));
  for (int k = 0; k < d - 1; ++k) {
    TTCore& c = t.cores[k];
    BondSplit bs = split_bond(wrap(c.a, c.r0 * c.n, c.r1), delta, rmax);
    c.r1 = bs.left.cols;
    c.a.assign(bs.left.a.begin(), bs.left.a.end());
    TTCore& nx = t.cores[k + 1];
    Matrix moved = matmul(bs.right, wrap(nx.a, nx.r0, nx.n * nx.r1));
    nx.r0 = moved.rows;
    nx.a.assign(moved.a.begin(), moved.a.end());
  }
  return t;
}

TTMatrix tt_round(const TTMatrix& x, double tol, int rmax) {
  x.validate();
  // Merging each (row, col) pair into one mode preserves the Frobenius norm,
  // so vector rounding applies verbatim.
  TTVector merged;
  for (const TTMatCore& c : x.cores) {
    TTCore v(c.r0, c.m * c.n, c.r1);
    v.a = c.a;
    merged.cores.push_back(std::move(v));
  }
  merged = tt_round(merged, tol, rmax);
  TTMatrix out;
  for (int k = 0; k < x.order(); ++k) {
    const TTCore& v = merged.cores[k];
    TTMatCore c(v.r0, x.cores[k].m, x.cores[k].n, v.r1);
    c.a = v.a;
    out.cores.push_back(std::move(c));
  }
  return out;
}

TTVector tt_scale(double alpha, const TTVector& x) {
  TTVector out = x;
  kern::scal(static_cast<int>(out.cores[0].a.size()), alpha, out.cores[0].a.data());
  return out;
}

TTVector tt_axpy(double alpha, const TTVector& x, const TTVector& y) {
  x.validate();
  y.validate();
  check_same_modes(x.mode_sizes(), y.mode_sizes());
  if (alpha == 0.0) return y;
  const int d = x.order();
  TTVector out;
  if (d == 1) {
    TTCore c(1, x.cores[0].n, 1);
    c.a = y.cores[0].a;
    kern::axpy(static_cast<int>(c.a.size()), alpha, x.cores[0].a.data(), c.a.data());
    out.cores.push_back(std::move(c));
    return out;
  }
  for (int k = 0; k < d; ++k) {
    const TTCore& cx = x.cores[k];
    const TTCore& cy = y.cores[k];
    const bool first = (k == 0), last = (k == d - 1);
    TTCore c(first ? 1 : cx.r0 + cy.r0, cx.n, last ? 1 : cx.r1 + cy.r1);
    const double sx = first ? alpha : 1.0;
    const int row_off = first ? 0 : cx.r0;
    const int col_off = last ? 0 : cx.r1;
    for (int i = 0; i < cx.r0; ++i)
      for (int j = 0; j < cx.n; ++j)
        for (int l = 0; l < cx.r1; ++l) c.at(i, j, l) = sx * cx.at(i, j, l);
    for (int i = 0; i < cy.r0; ++i)
      for (int j = 0; j < cy.n; ++j)
        for (int l = 0; l < cy.r1; ++l) c.at(row_off + i, j, col_off + l) += cy.at(i, j, l);
    out.cores.push_back(std::move(c));
  }
  return out;
}

TTVector tt_hadamard(const TTVector& x, const TTVector& y) {
  x.validate();
  y.validate();
  check_same_modes(x.mode_sizes(), y.mode_sizes());
  TTVector out;
  for (int k = 0; k < x.order(); ++k) {
    const TTCore& cx = x.cores[k];
    const TTCore& cy = y.cores[k];
    TTCore c(cx.r0 * cy.r0, cx.n, cx.r1 * cy.r1);
    for (int a = 0; a < cx.r0; ++a)
      for (int b = 0; b < cy.r0; ++b)
        for (int j = 0; j < cx.n; ++j)
          for (int a2 = 0; a2 < cx.r1; ++a2)
            for (int b2 = 0; b2 < cy.r1; ++b2)
              c.at(a * cy.r0 + b, j, a2 * cy.r1 + b2) = cx.at(a, j, a2) * cy.at(b, j, b2);
    out.cores.push_back(std::move(c));
  }
  return out;
}

double tt_dot(const TTVector& x, const TTVector& y) {
  x.validate();
  y.validate();
  check_same_modes(x.mode_sizes(), y.mode_sizes());
  Matrix g(1, 1);
  g(0, 0) = 1.0;
  for (int k = 0; k < x.order(); ++k) {
    const TTCore& cx = x.cores[k];
    const TTCore& cy = y.cores[k];
    // b(ry0, n*rx1) = g^T * unfold(x); then contract (ry0*n) against y.
    Matrix b = matmul_tn(g, wrap(cx.a, cx.r0, cx.n * cx.r1));
    g = matmul_tn(wrap(b.a, cy.r0 * cy.n, cx.r1), wrap(cy.a, cy.r0 * cy.n, cy.r1));
  }
  return g(0, 0);
}

TTMatrix tt_diag(const TTVector& x) {
  x.validate();
  TTMatrix out;
  for (const TTCore& v : x.cores) {
    TTMatCore c(v.r0, v.n, v.n, v.r1);
    for (int i = 0; i < v.r0; ++i)
      for (int j = 0; j < v.n; ++j)
        for (int l = 0; l < v.r1; ++l) c.at(i, j, j, l) = v.at(i, j, l);
    out.cores.push_back(std::move(c));
  }
  return out;
}

TTVector ttmat_diagonal(const TTMatrix& a) {
  a.validate();
  TTVector out;
  for (const TTMatCore& c : a.cores) {
    if (c.m != c.n) throw std::invalid_argument("diagonal of a non-square operator train");
    TTCore v(c.r0, c.n, c.r1);
    for (int i = 0; i < c.r0; ++i)
      for (int j = 0; j < c.n; ++j)
        for (int l = 0; l < c.r1; ++l) v.at(i, j, l) = c.at(i, j, j, l);
    out.cores.push_back(std::move(v));
  }
  return out;
}

TTMatrix ttmat_from_factors(const std::vector<Matrix>& factors) {
  if (factors.empty()) throw std::invalid_argument("operator train needs at least one factor");
  TTMatrix out;
  for (const Matrix& f : factors) {
    if (f.empty()) throw std::invalid_argument("operator factor is empty");
    TTMatCore c(1, f.rows, f.cols, 1);
    c.a = f.a;
    out.cores.push_back(std::move(c));
  }
  out.validate();
  return out;
}

TTMatrix ttmat_identity(const std::vector<int>& dims) {
  std::vector<Matrix> factors;
  factors.reserve(dims.size());
  for (int n : dims) factors.push_back(Matrix::identity(n));
  return ttmat_from_factors(factors);
}

TTVector ttmat_apply(const TTMatrix& a, const TTVector& x) {
  a.validate();
  x.validate();
  check_same_modes(a.col_sizes(), x.mode_sizes());
  TTVector out;
  for (int k = 0; k < a.order(); ++k) {
    const TTMatCore& ac = a.cores[k];
    const TTCore& xc = x.cores[k];
    // Contract over the column index j with one gemm by moving j last in the
    // operator core and first in the vector core.
    Matrix a2(ac.r0 * ac.m * ac.r1, ac.n);
    for (int p = 0; p < ac.r0; ++p)
      for (int i = 0; i < ac.m; ++i)
        for (int j = 0; j < ac.n; ++j)
          for (int q = 0; q < ac.r1; ++q)
            a2((p * ac.m + i) * ac.r1 + q, j) = ac.at(p, i, j, q);
    Matrix xp(xc.n, xc.r0 * xc.r1);
    for (int b = 0; b < xc.r0; ++b)
      for (int j = 0; j < xc.n; ++j)
        for (int b2 = 0; b2 < xc.r1; ++b2) xp(j, b * xc.r1 + b2) = xc.at(b, j, b2);
    Matrix t = matmul(a2, xp);
    TTCore c(ac.r0 * xc.r0, ac.m, ac.r1 * xc.r1);
    for (int p = 0; p < ac.r0; ++p)
      for (int i = 0; i < ac.m; ++i)
        for (int q = 0; q < ac.r1; ++q)
          for (int b = 0; b < xc.r0; ++b)
            for (int b2 = 0; b2 < xc.r1; ++b2)
              c.at(p * xc.r0 + b, i, q * xc.r1 + b2) =
                  t((p * ac.m + i) * ac.r1 + q, b * xc.r1 + b2);
    out.cores.push_back(std::move(c));
  }
  return out;
}

TTMatrix ttmat_axpy(double alpha, const TTMatrix& a, const TTMatrix& b) {
  a.validate();
  b.validate();
  check_same_modes(a.row_sizes(), b.row_sizes());
  check_same_modes(a.col_sizes(), b.col_sizes());
  if (alpha == 0.0) return b;
  const int d = a.order();
  TTMatrix out;
  if (d == 1) {
    TTMatCore c(1, a.cores[0].m, a.cores[0].n, 1);
    c.a = b.cores[0].a;
    kern::axpy(static_cast<int>(c.a.size()), alpha, a.cores[0].a.data(), c.a.data());
    out.cores.push_back(std::move(c));
    return out;
  }
  for (int k = 0; k < d; ++k) {
    const TTMatCore& ca = a.cores[k];
    const TTMatCore& cb = b.cores[k];
    const bool first = (k == 0), last = (k == d - 1);
    TTMatCore c(first ? 1 : ca.r0 + cb.r0, ca.m, ca.n, last ? 1 : ca.r1 + cb.r1);
    const double sa = first ? alpha : 1.0;
    const int row_off = first ? 0 : ca.r0;
    const int col_off = last ? 0 : ca.r1;
    for (int i = 0; i < ca.r0; ++i)
      for (int p = 0; p < ca.m; ++p)
        for (int q = 0; q < ca.n; ++q)
          for (int l = 0; l < ca.r1; ++l) c.at(i, p, q, l) = sa * ca.at(i, p, q, l);
    for (int i = 0; i < cb.r0; ++i)
      for (int p = 0; p < cb.m; ++p)
        for (int q = 0; q < cb.n; ++q)
          for (int l = 0; l < cb.r1; ++l) c.at(row_off + i, p, q, col_off + l) += cb.at(i, p, q, l);
    out.cores.push_back(std::move(c));
  }
  return out;
}

TTMatrix ttmat_multiply(const TTMatrix& a, const TTMatrix& b) {
  a.validate();
  b.validate();
  check_same_modes(a.col_sizes(), b.row_sizes());
  TTMatrix out;
  for (int k = 0; k < a.order(); ++k) {
    const TTMatCore& ca = a.cores[k];
    const TTMatCore& cb = b.cores[k];
    Matrix a2(ca.r0 * ca.m * ca.r1, ca.n);
    for (int p = 0; p < ca.r0; ++p)
      for (int i = 0; i < ca.m; ++i)
        for (int s = 0; s < ca.n; ++s)
          for (int q = 0; q < ca.r1; ++q)
            a2((p * ca.m + i) * ca.r1 + q, s) = ca.at(p, i, s, q);
    Matrix bp(cb.m, cb.r0 * cb.n * cb.r1);
    for (int v = 0; v < cb.r0; ++v)
      for (int s = 0; s < cb.m; ++s)
        for (int j = 0; j < cb.n; ++j)
          for (int w = 0; w < cb.r1; ++w)
            bp(s, (v * cb.n + j) * cb.r1 + w) = cb.at(v, s, j, w);
    Matrix t = matmul(a2, bp);
    TTMatCore c(ca.r0 * cb.r0, ca.m, cb.n, ca.r1 * cb.r1);
    for (int p = 0; p < ca.r0; ++p)
      for (int i = 0; i < ca.m; ++i)
        for (int q = 0; q < ca.r1; ++q)
          for (int v = 0; v < cb.r0; ++v)
            for (int j = 0; j < cb.n; ++j)
              for (int w = 0; w < cb.r1; ++w)
                c.at(p * cb.r0 + v, i, j, q * cb.r1 + w) =
                    t((p * ca.m + i) * ca.r1 + q, (v * cb.n + j) * cb.r1 + w);
    out.cores.push_back(std::move(c));
  }
  return out;
}

TTMatrix ttmat_transpose(const TTMatrix& a) {
  a.validate();
  TTMatrix out;
  for (const TTMatCore& c : a.cores) {
    TTMatCore t(c.r0, c.n, c.m, c.r1);
    for (int i = 0; i < c.r0; ++i)
      for (int p = 0; p < c.m; ++p)
        for (int q = 0; q < c.n; ++q)
          for (int l = 0; l < c.r1; ++l) t.at(i, q, p, l) = c.at(i, p, q, l);
    out.cores.push_back(std::move(t));
  }
  return out;
}

Matrix ttmat_to_dense(const TTMatrix& a, long long element_cap) {
  a.validate();
  long long rows = 1, cols = 1;
  for (const TTMatCore& c : a.cores) {
    rows *= c.m;
    cols *= c.n;
    if (rows > element_cap || cols > element_cap || rows * cols > element_cap)
      throw std::runtime_error("operator materialization exceeds the element cap");
  }
  // cur holds the partial contraction indexed ((I, J), r) where I, J run over
  // the processed row/col multi-indices, first mode slowest.
  Matrix cur(1, 1);
  cur(0, 0) = 1.0;
  int pm = 1, pn = 1;
  for (const TTMatCore& c : a.cores) {
    Matrix t = matmul(cur, wrap(c.a, c.r0, c.m * c.n * c.r1));
    Matrix next(pm * c.m * pn * c.n, c.r1);
    for (int bi = 0; bi < pm; ++bi)
      for (int bj = 0; bj < pn; ++bj)
        for (int i = 0; i < c.m; ++i)
          for (int j = 0; j < c.n; ++j)
            for (int r = 0; r < c.r1; ++r)
              next((bi * c.m + i) * (pn * c.n) + (bj * c.n + j), r) =
                  t(bi * pn + bj, (i * c.n + j) * c.r1 + r);
    cur = std::move(next);
    pm *= c.m;
    pn *= c.n;
  }
  Matrix out(static_cast<int>(rows), static_cast<int>(cols));
  out.a = std::move(cur.a);
  return out;
}

TTVector restrict_modes(const TTVector& x, const std::vector<IndexRange>& ranges) {
  x.validate();
  if (static_cast<int>(ranges.size()) != x.order())
    throw std::invalid_argument("one index range per mode required");
  TTVector out;
  for (int k = 0; k < x.order(); ++k) {
    const TTCore& c = x.cores[k];
    const IndexRange r = ranges[k];
    if (r.begin < 0 || r.end > c.n || r.begin >= r.end)
      throw std::invalid_argument("mode restriction range is empty or out of bounds");
    TTCore t(c.r0, r.end - r.begin, c.r1);
    for (int i = 0; i < c.r0; ++i)
      for (int j = r.begin; j < r.end; ++j)
        for (int l = 0; l < c.r1; ++l) t.at(i, j - r.begin, l) = c.at(i, j, l);
    out.cores.push_back(std::move(t));
  }
  return out;
}

TTMatrix restrict_modes(const TTMatrix& a, const std::vector<IndexRange>& row_ranges,
                        const std::vector<IndexRange>& col_ranges) {
  a.validate();
  if (static_cast<int>(row_ranges.size()) != a.order() ||
      static_cast<int>(col_ranges.size()) != a.order())
    throw std::invalid_argument("one row and one col range per mode required");
  TTMatrix out;
  for (int k = 0; k < a.order(); ++k) {
    const TTMatCore& c = a.cores[k];
    const IndexRange rr = row_ranges[k], cr = col_ranges[k];
    if (rr.begin < 0 || rr.end > c.m || rr.begin >= rr.end)
      throw std::invalid_argument("row restriction range is empty or out of bounds");
    if (cr.begin < 0 || cr.end > c.n || cr.begin >= cr.end)
      throw std::invalid_argument("col restriction range is empty or out of bounds");
    TTMatCore t(c.r0, rr.end - rr.begin, cr.end - cr.begin, c.r1);
    for (int i = 0; i < c.r0; ++i)
      for (int p = rr.begin; p < rr.end; ++p)
        for (int q = cr.begin; q < cr.end; ++q)
          for (int l = 0; l < c.r1; ++l)
            t.at(i, p - rr.begin, q - cr.begin, l) = c.at(i, p, q, l);
    out.cores.push_back(std::move(t));
  }
  return out;
}

}  // namespace stt
