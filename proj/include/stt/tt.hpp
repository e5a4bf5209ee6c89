#pragma once

#include <string>
#include <vector>

#include "stt/matrix.hpp"
#include "stt/tensor.hpp"

namespace stt {

// Three-way train core with shape [r0, n, r1]; r1 is the fastest index.
struct TTCore {
  int r0 = 1, n = 1, r1 = 1;
  std::vector<double> a;

  TTCore() = default;
  TTCore(int r0_, int n_, int r1_)
      : r0(r0_), n(n_), r1(r1_), a(static_cast<size_t>(r0_) * n_ * r1_, 0.0) {}

  double& at(int i, int j, int k) { return a[(static_cast<size_t>(i) * n + j) * r1 + k]; }
  double at(int i, int j, int k) const { return a[(static_cast<size_t>(i) * n + j) * r1 + k]; }
};

// Four-way train core for operators, shape [r0, m, n, r1] (m rows, n cols).
struct TTMatCore {
  int r0 = 1, m = 1, n = 1, r1 = 1;
  std::vector<double> a;

  TTMatCore() = default;
  TTMatCore(int r0_, int m_, int n_, int r1_)
      : r0(r0_), m(m_), n(n_), r1(r1_), a(static_cast<size_t>(r0_) * m_ * n_ * r1_, 0.0) {}

  double& at(int i, int p, int q, int k) {
    return a[((static_cast<size_t>(i) * m + p) * n + q) * r1 + k];
  }
  double at(int i, int p, int q, int k) const {
    return a[((static_cast<size_t>(i) * m + p) * n + q) * r1 + k];
  }
};

// Tensor in train format: a chain of 3-way cores with boundary ranks 1.
// The first mode is the slowest index of the represented tensor.
struct TTVector {
  std::vector<TTCore> cores;

  int order() const { return static_cast<int>(cores.size()); }
  std::vector<int> mode_sizes() const;
  std::vector<int> ranks() const;  // interior bond ranks r_1..r_{d-1}
  int max_rank() const;
  long long parameter_count() const;
  double element(const std::vector<int>& idx) const;
  void validate() const;
};

// Linear operator in train format: 4-way cores, boundary ranks 1.
struct TTMatrix {
  std::vector<TTMatCore> cores;

  int order() const { return static_cast<int>(cores.size()); }
  std::vector<int> row_sizes() const;
  std::vector<int> col_sizes() const;
  std::vector<int> ranks() const;
  int max_rank() const;
  long long parameter_count() const;
  void validate() const;
};

// Construction
TTVector tt_zero(const std::vector<int>& dims);
TTVector tt_ones(const std::vector<int>& dims);
TTVector tt_from_dense(const DenseTensor& x, double tol, int rmax = 1 << 30);
DenseTensor tt_to_dense(const TTVector& x, long long element_cap = 100000000);

// Rounding: quasi-optimal rank reduction with relative Frobenius error <= tol.
TTVector tt_round(const TTVector& x, double tol, int rmax = 1 << 30);
TTMatrix tt_round(const TTMatrix& x, double tol, int rmax = 1 << 30);

// Arithmetic (no implicit rounding; callers truncate explicitly)
TTVector tt_scale(double alpha, const TTVector& x);
TTVector tt_axpy(double alpha, const TTVector& x, const TTVector& y);
TTVector tt_hadamard(const TTVector& x, const TTVector& y);
double tt_dot(const TTVector& x, const TTVector& y);
double tt_norm(const TTVector& x);

// Operators
TTMatrix tt_diag(const TTVector& x);
TTVector ttmat_diagonal(const TTMatrix& a);
TTMatrix ttmat_from_factors(const std::vector<Matrix>& factors);
TTMatrix ttmat_identity(const std::vector<int>& dims);
TTVector ttmat_apply(const TTMatrix& a, const TTVector& x);
TTMatrix ttmat_axpy(double alpha, const TTMatrix& a, const TTMatrix& b);
TTMatrix ttmat_multiply(const TTMatrix& a, const TTMatrix& b);
TTMatrix ttmat_transpose(const TTMatrix& a);
Matrix ttmat_to_dense(const TTMatrix& a, long long element_cap = 100000000);

// Mode restriction (half-open ranges, one per mode)
struct IndexRange {
  int begin = 0;
  int end = 0;
};
TTVector restrict_modes(const TTVector& x, const std::vector<IndexRange>& ranges);
TTMatrix restrict_modes(const TTMatrix& a, const std::vector<IndexRange>& row_ranges,
                        const std::vector<IndexRange>& col_ranges);

// In-place orthogonalization steps shared with the iterative solver.
// Left: QR core k, absorb the triangle into core k+1 (requires k < d-1).
// Right: factor core k as L*Q, absorb L into core k-1 (requires k >= 1).
void left_orthogonalize_step(TTVector& x, int k);
void right_orthogonalize_step(TTVector& x, int k);

// Binary container for caching trains on disk.
void save_train(const std::string& path, const TTVector& v,
                const std::vector<std::vector<int>>* factorization = nullptr);
void save_train(const std::string& path, const TTMatrix& m,
                const std::vector<std::vector<int>>* factorization = nullptr);

struct LoadedTrain {
  bool is_matrix = false;
  TTVector vec;
  TTMatrix mat;
  std::vector<std::vector<int>> factorization;  // empty when not quantized
};
LoadedTrain load_train(const std::string& path);

}  // namespace stt
