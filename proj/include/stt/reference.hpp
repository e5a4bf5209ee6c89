#pragma once

#include <vector>

#include "stt/matrix.hpp"
#include "stt/problem.hpp"
#include "stt/sem.hpp"

namespace stt {

// One entry of a sparse accumulation; duplicates are summed when the system
// is finalized by the solver (or by system_to_dense).
struct SparseEntry {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

// Sparse linear system over the interior unknowns, assembled classically and
// used as the full-grid baseline and as an oracle for the train-format path.
struct SparseSystem {
  int dimension = 0;
  std::vector<SparseEntry> triplets;
  std::vector<double> rhs;
};

struct ReferenceOptions {
  long long unknown_cap = 200000;  // refuse larger systems; use the train path
  double residual_tol = 1e-10;     // relative residual required of solve_full
};

// Element-loop assembly of the discrete weak form with tensorized two-point
// Gauss quadrature and nodally interpolated coefficients. Test rows range
// over interior nodes; known node values (the initial level at the first time
// node and Dirichlet data on the spatial boundary) are moved to the
// right-hand side, which also receives the interpolated forcing term.
SparseSystem assemble_full_system(const ProblemSpec& problem, const Grid& grid,
                                  const ReferenceOptions& opts = {});

// Space(-time) mass matrix with rows and columns both restricted to the
// interior unknowns; the quadratic form behind the discrete L2 norm.
SparseSystem assemble_full_mass(const Grid& grid, bool time_dependent,
                                const ReferenceOptions& opts = {});

// Direct sparse solve with an iterative fallback; the relative residual is
// checked against opts.residual_tol and a failure throws with its value.
std::vector<double> solve_full(const SparseSystem& system, const ReferenceOptions& opts = {});

Matrix system_to_dense(const SparseSystem& system);

}  // namespace stt
