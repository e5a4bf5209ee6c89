#include <cmath>
#include <stdexcept>
#include <utility>

#include "stt/kernels.hpp"
#include "stt/tensor.hpp"

namespace stt {

namespace {

long long checked_size(const std::vector<int>& shape) {
  if (shape.empty()) throw std::invalid_argument("tensor needs at least one mode");
  long long total = 1;
  for (int n : shape) {
    if (n < 1) throw std::invalid_argument("tensor mode sizes must be positive");
    if (total > (1LL << 62) / n) throw std::invalid_argument("tensor size overflows");
    total *= n;
  }
  return total;
}

}  // namespace

DenseTensor::DenseTensor(std::vector<int> shape_in) : shape(std::move(shape_in)) {
  a.assign(static_cast<size_t>(checked_size(shape)), 0.0);
}

DenseTensor::DenseTensor(std::vector<int> shape_in, std::vector<double> data)
    : shape(std::move(shape_in)), a(std::move(data)) {
  if (checked_size(shape) != static_cast<long long>(a.size()))
    throw std::invalid_argument("tensor data length does not match its shape");
  for (double x : a)
    if (!std::isfinite(x)) throw std::invalid_argument("tensor has non-finite entries");
}

long long DenseTensor::size() const { return static_cast<long long>(a.size()); }

long long DenseTensor::flat(const std::vector<int>& idx) const {
  if (idx.size() != shape.size()) throw std::invalid_argument("tensor index arity mismatch");
  long long off = 0;
  for (size_t k = 0; k < shape.size(); ++k) {
    if (idx[k] < 0 || idx[k] >= shape[k]) throw std::out_of_range("tensor index out of range");
    off = off * shape[k] + idx[k];
  }
  return off;
}

double DenseTensor::frob_norm() const {
  return kern::nrm2(static_cast<int>(a.size()), a.data());
}

}  // namespace stt
