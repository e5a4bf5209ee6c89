#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "stt/kernels.hpp"
#include "stt/la.hpp"

namespace stt {

// Householder QR, thin form: A (m x n) = Q (m x k) * R (k x n), k = min(m, n).
QrResult qr_decompose(const Matrix& a) {
  for (double x : a.a)
    if (!std::isfinite(x)) throw std::invalid_argument("qr input has non-finite entries");
  const int m = a.rows, n = a.cols;
  const int k = std::min(m, n);
  Matrix W = a;  // working copy, reflectors accumulate below the diagonal
  std::vector<double> tau(k, 0.0);

  std::vector<double> col(m), wv(n);
  for (int j = 0; j < k; ++j) {
    // build the Householder vector for column j, rows j..m-1
    double nrm = 0.0;
    for (int i = j; i < m; ++i) nrm = std::hypot(nrm, W(i, j));
    // denormal column norms would overflow 1/(alpha - beta); such columns
    // carry no usable direction, so skip them like exact zeros
    if (nrm < std::numeric_limits<double>::min()) {
      tau[j] = 0.0;
      continue;
    }
    double alpha = W(j, j);
    double beta = (alpha >= 0 ? -nrm : nrm);
    tau[j] = (beta - alpha) / beta;
    double inv = 1.0 / (alpha - beta);
    for (int i = j + 1; i < m; ++i) W(i, j) *= inv;
    W(j, j) = beta;
    // apply (I - tau v v^T) to trailing columns: v = [1; W(j+1..,j)]
    int nt = n - j - 1;
    if (nt > 0) {
      for (int c = 0; c < nt; ++c) wv[c] = W(j, j + 1 + c);
      for (int i = j + 1; i < m; ++i)
        kern::axpy(nt, W(i, j), &W.a[static_cast<long>(i) * n + j + 1], wv.data());
      for (int c = 0; c < nt; ++c) W(j, j + 1 + c) -= tau[j] * wv[c];
      for (int i = j + 1; i < m; ++i)
        kern::axpy(nt, -tau[j] * W(i, j), wv.data(), &W.a[static_cast<long>(i) * n + j + 1]);
    }
  }

  QrResult out;
  out.triangular = Matrix(k, n);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < n; ++j) out.triangular(i, j) = W(i, j);

  // accumulate Q = H_0 ... H_{k-1} applied to the first k identity columns
  Matrix Q(m, k);
  for (int j = 0; j < k; ++j) Q(j, j) = 1.0;
  for (int j = k - 1; j >= 0; --j) {
    if (tau[j] == 0.0) continue;
    // v = [1; W(j+1..m-1, j)], apply I - tau v v^T to Q rows j..m-1
    int nc = k;
    for (int c = 0; c < nc; ++c) wv[c] = Q(j, c);
    for (int i = j + 1; i < m; ++i)
      kern::axpy(nc, W(i, j), &Q.a[static_cast<long>(i) * k], wv.data());
    for (int c = 0; c < nc; ++c) Q(j, c) -= tau[j] * wv[c];
    for (int i = j + 1; i < m; ++i)
      kern::axpy(nc, -tau[j] * W(i, j), wv.data(), &Q.a[static_cast<long>(i) * k]);
  }
  out.orthonormal = std::move(Q);
  return out;
}

}  // namespace stt
