#include "stt/matrix.hpp"

#include <cmath>
#include <stdexcept>

#include "stt/kernels.hpp"

namespace stt {

namespace {
void check_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument("matrix entry is not finite");
}
}  // namespace

Matrix::Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {
  if (r < 0 || c < 0) throw std::invalid_argument("negative matrix dimension");
}

Matrix::Matrix(int r, int c, std::vector<double> data) : rows(r), cols(c), a(std::move(data)) {
  if (a.size() != static_cast<size_t>(r) * c)
    throw std::invalid_argument("matrix data length does not match shape");
  check_finite(a);
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows_list) {
  rows = static_cast<int>(rows_list.size());
  cols = rows ? static_cast<int>(rows_list.begin()->size()) : 0;
  a.reserve(static_cast<size_t>(rows) * cols);
  for (const auto& r : rows_list) {
    if (static_cast<int>(r.size()) != cols)
      throw std::invalid_argument("ragged initializer for matrix");
    a.insert(a.end(), r.begin(), r.end());
  }
  check_finite(a);
}

Matrix Matrix::identity(int n) {
  Matrix I(n, n);
  for (int i = 0; i < n; ++i) I(i, i) = 1.0;
  return I;
}

Matrix matmul(const Matrix& A, const Matrix& B) {
  if (A.cols != B.rows) throw std::invalid_argument("matmul shape mismatch");
  Matrix C(A.rows, B.cols);
  kern::gemm_nn(A.rows, B.cols, A.cols, 1.0, A.a.data(), A.cols, B.a.data(), B.cols, 0.0,
                C.a.data(), C.cols);
  return C;
}

Matrix matmul_tn(const Matrix& A, const Matrix& B) {
  if (A.rows != B.rows) throw std::invalid_argument("matmul_tn shape mismatch");
  Matrix C(A.cols, B.cols);
  kern::gemm_tn(A.cols, B.cols, A.rows, 1.0, A.a.data(), A.cols, B.a.data(), B.cols, 0.0,
                C.a.data(), C.cols);
  return C;
}

Matrix matmul_nt(const Matrix& A, const Matrix& B) {
  if (A.cols != B.cols) throw std::invalid_argument("matmul_nt shape mismatch");
  Matrix C(A.rows, B.rows);
  kern::gemm_nt(A.rows, B.rows, A.cols, 1.0, A.a.data(), A.cols, B.a.data(), B.cols, 0.0,
                C.a.data(), C.cols);
  return C;
}

Matrix transpose(const Matrix& A) {
  Matrix T(A.cols, A.rows);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) T(j, i) = A(i, j);
  return T;
}

Matrix operator+(const Matrix& A, const Matrix& B) {
  if (A.rows != B.rows || A.cols != B.cols) throw std::invalid_argument("add shape mismatch");
  Matrix C = A;
  kern::axpy(static_cast<int>(C.a.size()), 1.0, B.a.data(), C.a.data());
  return C;
}

Matrix operator-(const Matrix& A, const Matrix& B) {
  if (A.rows != B.rows || A.cols != B.cols) throw std::invalid_argument("sub shape mismatch");
  Matrix C = A;
  kern::axpy(static_cast<int>(C.a.size()), -1.0, B.a.data(), C.a.data());
  return C;
}

Matrix operator*(double s, const Matrix& A) {
  Matrix C = A;
  kern::scal(static_cast<int>(C.a.size()), s, C.a.data());
  return C;
}

double frob_norm(const Matrix& A) { return kern::nrm2(static_cast<int>(A.a.size()), A.a.data()); }

double max_abs_diff(const Matrix& A, const Matrix& B) {
  if (A.rows != B.rows || A.cols != B.cols) throw std::invalid_argument("diff shape mismatch");
  double m = 0.0;
  for (size_t i = 0; i < A.a.size(); ++i) m = std::max(m, std::fabs(A.a[i] - B.a[i]));
  return m;
}

std::vector<double> matvec(const Matrix& A, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != A.cols) throw std::invalid_argument("matvec shape mismatch");
  std::vector<double> y(A.rows, 0.0);
  kern::gemm_nn(A.rows, 1, A.cols, 1.0, A.a.data(), A.cols, x.data(), 1, 0.0, y.data(), 1);
  return y;
}

}  // namespace stt
