#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "stt/tt.hpp"

namespace stt {

// Black-box function sampled on a tensor-product index box. The evaluator
// must be deterministic and total on the box; it may be called from
// multiple threads concurrently and must be side-effect free.
struct GridFunction {
  std::vector<int> shape;
  std::function<double(const std::vector<int>&)> evaluator;
};

// Wraps a function of physical coordinates: axes[k][i] is the coordinate of
// node i along mode k, so coefficient closures can be written in physical
// space instead of raw indices.
GridFunction grid_function_from_axes(std::vector<std::vector<double>> axes,
                                     std::function<double(const std::vector<double>&)> f);

struct CrossOptions {
  double tol = 1e-6;      // target max sampled error relative to max |f|
  int rmax = 200;         // bond rank cap
  int max_sweeps = 40;
  std::uint64_t seed = 1;  // drives initial index sets and validation set
  int sample_count = 1000;  // held-out validation budget (exhaustive if box is smaller)
  int initial_rank = 2;
  int rank_step = 2;  // rank increase applied after each failed sweep
};

struct CrossResult {
  TTVector values;
  bool converged = false;
  double sample_error = 0.0;  // achieved max error on the held-out set, relative to max |f|
  int sweeps = 0;
  std::uint64_t seed = 0;
};

// Alternating maxvol cross interpolation. Sweeps left-to-right and back,
// re-selecting pivot fibers with the maximum-volume criterion, growing bond
// ranks until the held-out sample error meets tol, then trims the train by
// rounding at tol/10. Non-convergence returns the last train with
// converged=false and the achieved sample error.
CrossResult cross_interpolate(const GridFunction& f, const CrossOptions& opts);
CrossResult cross_interpolate(const GridFunction& f, double tol, int rmax = 200,
                              int max_sweeps = 40);

}  // namespace stt
