#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stt/problem.hpp"
#include "stt/sem.hpp"
#include "stt/tt.hpp"

namespace stt {

enum class SolveFormat { full, tt, qtt };

std::string format_name(SolveFormat format);
SolveFormat parse_format(const std::string& name);  // throws on unknown names

struct RunOptions {
  SolveFormat format = SolveFormat::tt;
  double tt_tol = 1e-10;
  double solver_tol = 1e-6;
  int rmax = 500;
  int max_sweeps = 60;
  // The alternating solver aims for residual_safety * solver_tol so delivered
  // residuals sit well below the advertised target; format-agreement checks
  // between solvers depend on this margin.
  double residual_safety = 0.05;
  std::uint64_t seed = 1;
  std::string cache_dir;               // operator cache directory; empty = off
  long long full_unknown_cap = 200000; // guard for the full-grid format
  std::function<void(int, double, int)> on_progress;  // forwarded to solves
};

struct SolveReport {
  std::string experiment;
  int elements = 0;
  SolveFormat format = SolveFormat::tt;
  double tt_tol = 0.0;
  double solver_tol = 0.0;
  double l2_error = -1.0;  // negative when no exact solution is available
  std::vector<int> operator_ranks;  // empty for the full format
  std::vector<int> solution_ranks;
  double operator_compression = 1.0;  // dense elements per stored entry
  double solution_compression = 1.0;
  int sweeps = 0;
  int newton_iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  double seconds = 0.0;
  std::string failure_stage;    // empty on success
  std::string failure_message;  // populated alongside failure_stage
};

// Built-in experiments. Forcing terms are closed forms derived from the
// manufactured solutions; forcing_validation_error checks them numerically.
ProblemSpec make_poisson_problem();     // stationary diffusion, wavy coefficient
ProblemSpec make_cdr_problem();         // space-time convection-diffusion-reaction
ProblemSpec make_semilinear_problem();  // cubic reaction, two-wave solution
ProblemSpec make_trivial_problem();     // everything zero
std::vector<ProblemSpec> problem_catalog();
ProblemSpec catalog_problem(const std::string& name);  // throws on unknown names

// Largest relative gap, over `samples` random interior points, between the
// problem's forcing closure and a fourth-order finite-difference application
// of the differential operator to the exact solution.
double forcing_validation_error(const ProblemSpec& problem, int samples, std::uint64_t seed);

// Discrete L2 norm of u minus the interpolated exact solution on the unknown
// windows: sqrt(e' M e) with M the interior mass operator.
double compute_l2_error(const TTVector& u, const FieldFn& exact, bool time_dependent,
                        const Grid& grid, const AssemblyOptions& opts);

// Assemble, solve, and measure one problem at one grid in one format. Stage
// failures are recorded in the report instead of thrown.
SolveReport run_experiment(const ProblemSpec& problem, int elements, const RunOptions& opts);

struct RankStudyEntry {
  std::string label;
  FieldFn kappa;  // null means the constant coefficient 1
  double tol = 1e-12;
};

struct RankStudyRow {
  std::string label;
  double tol = 1e-12;
  std::vector<int> coefficient_ranks;
  std::vector<std::vector<int>> operator_ranks;  // one list per grid
};

// The five coefficient rows of the diffusion-operator rank table.
std::vector<RankStudyEntry> rank_study_catalog();

// Cross-interpolate each coefficient at its tolerance and report the ranks of
// the rounded interior diffusion operator per grid. Grids are element counts
// per dimension. Reported ranks are taken at the rounding fixed point (the
// assembled operator is rounded once more at the row tolerance, which a
// single truncation sweep can miss by one at the margin).
std::vector<RankStudyRow> rank_study(const std::vector<RankStudyEntry>& entries,
                                     const std::vector<int>& element_counts,
                                     const AssemblyOptions& base);

struct ConvergenceStudy {
  std::vector<SolveReport> rows;
  double fitted_order = 0.0;  // least-squares slope of log error vs log h
};

// Least-squares slope of log(error) against log(1/N) over rows that solved
// cleanly with a positive error; throws when fewer than two qualify.
double fit_order(const std::vector<SolveReport>& rows);

ConvergenceStudy convergence_study(const ProblemSpec& problem,
                                   const std::vector<int>& element_counts,
                                   const RunOptions& opts);

}  // namespace stt
