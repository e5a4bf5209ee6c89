#pragma once

#include <initializer_list>
#include <vector>

namespace stt {

// Dense row-major matrix of doubles. Construction from data validates
// finiteness; shape-only constructors zero-fill.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c);
  Matrix(int r, int c, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows_list);

  static Matrix identity(int n);

  double& operator()(int i, int j) { return a[static_cast<long>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<long>(i) * cols + j]; }

  bool empty() const { return rows == 0 || cols == 0; }
};

Matrix matmul(const Matrix& A, const Matrix& B);
// A^T * B where A is stored k x m
Matrix matmul_tn(const Matrix& A, const Matrix& B);
// A * B^T where B is stored n x k
Matrix matmul_nt(const Matrix& A, const Matrix& B);
Matrix transpose(const Matrix& A);
Matrix operator+(const Matrix& A, const Matrix& B);
Matrix operator-(const Matrix& A, const Matrix& B);
Matrix operator*(double s, const Matrix& A);

double frob_norm(const Matrix& A);
// max |A - B| over entries
double max_abs_diff(const Matrix& A, const Matrix& B);

std::vector<double> matvec(const Matrix& A, const std::vector<double>& x);

}  // namespace stt
