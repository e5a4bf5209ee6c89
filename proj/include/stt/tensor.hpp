#pragma once

#include <vector>

namespace stt {

// Dense multiway array. Entries are stored with the last index fastest, so
// the flat offset of (i_1, ..., i_d) is ((i_1*n_2 + i_2)*n_3 + ...) + i_d.
struct DenseTensor {
  std::vector<int> shape;
  std::vector<double> a;

  DenseTensor() = default;
  explicit DenseTensor(std::vector<int> shape_in);
  DenseTensor(std::vector<int> shape_in, std::vector<double> data);

  int order() const { return static_cast<int>(shape.size()); }
  long long size() const;
  long long flat(const std::vector<int>& idx) const;
  double& at(const std::vector<int>& idx) { return a[flat(idx)]; }
  double at(const std::vector<int>& idx) const { return a[flat(idx)]; }
  double frob_norm() const;
};

}  // namespace stt
