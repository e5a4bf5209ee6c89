#include <stdexcept>

#include "stt/la.hpp"

namespace stt {

Matrix kron(const Matrix& a, const Matrix& b) {
  long rows = static_cast<long>(a.rows) * b.rows;
  long cols = static_cast<long>(a.cols) * b.cols;
  if (rows * cols > (1L << 28))
    throw std::invalid_argument("kron result would exceed the dense size guard");
  Matrix C(static_cast<int>(rows), static_cast<int>(cols));
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) {
      double aij = a(i, j);
      if (aij == 0.0) continue;
      for (int p = 0; p < b.rows; ++p) {
        double* dst = &C.a[(static_cast<long>(i) * b.rows + p) * cols +
                           static_cast<long>(j) * b.cols];
        const double* src = &b.a[static_cast<long>(p) * b.cols];
        for (int q = 0; q < b.cols; ++q) dst[q] += aij * src[q];
      }
    }
  return C;
}

}  // namespace stt
