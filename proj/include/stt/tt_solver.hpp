#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "stt/tt.hpp"

namespace stt {

struct SolverOptions {
  double solver_tol = 1e-8;  // relative residual target
  double tt_tol = 1e-10;     // truncation tolerance applied to iterates
  int rmax = 500;            // bond rank cap for iterates
  int max_sweeps = 50;
  int enrichment_rank = 3;  // residual directions appended per bond and sweep
  int max_newton = 30;
  bool backtracking = false;  // halve the Newton step up to 5 times on loss increase
  int dense_cap = 900;        // largest local system factored directly; larger ones iterate
  // The sweep loop drives the residual to residual_safety * solver_tol so the
  // delivered residual sits comfortably under the advertised target.
  double residual_safety = 0.5;
  // Optional progress stream: (iteration, relative residual or loss, max rank).
  std::function<void(int, double, int)> on_progress;
};

struct SolveStats {
  int sweeps_used = 0;
  int newton_iterations = 0;
  double final_residual = 0.0;
  std::vector<int> rank_history;
  std::vector<double> residual_history;  // per sweep; for Newton, the loss per iteration
  bool converged = false;
};

// Semilinear system A·u = M·(u - u^3 + F) written as the loss
// L(u) = A·u - M·(u - u^3 + F).
struct SemilinearSystem {
  TTMatrix a;
  TTMatrix m;
  TTVector f;
};

// Alternating one-site solver for a·x = b with steepest-descent residual
// enrichment: each sweep appends a few directions of the rounded global
// residual to the growing bond, so ranks adapt to the solution. Returns the
// solution train and the solve statistics; a non-converged run carries
// converged=false and the achieved residual instead of throwing.
std::pair<TTVector, SolveStats> als_solve(const TTMatrix& a, const TTVector& b,
                                          const SolverOptions& opts,
                                          const TTVector* x0 = nullptr);

// ||a·x - b|| in train arithmetic, rounding a·x at round_tol first.
double tt_residual_norm(const TTMatrix& a, const TTVector& x, const TTVector& b,
                        double round_tol = 1e-12);

// Step-truncation Newton iteration for the semilinear system: solves
// J·delta = -L(u) with J = A - M·(I - 3·diag(u⊙u)) and re-truncates
// u + delta at tt_tol each step. Stops when ||L(u)|| <= solver_tol·||M·F||.
// Three consecutive loss increases raise an error carrying the history.
std::pair<TTVector, SolveStats> newton_solve(const SemilinearSystem& sys, const TTVector& u0,
                                             const SolverOptions& opts);

// Exposed for derivative checks: the loss and its Jacobian, rounded at tol.
TTVector semilinear_loss(const SemilinearSystem& sys, const TTVector& u, double tol);
TTMatrix semilinear_jacobian(const SemilinearSystem& sys, const TTVector& u, double tol);

}  // namespace stt
