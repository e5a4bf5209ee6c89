#include "stt/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>

#include "stt/qtt.hpp"
#include "stt/reference.hpp"
#include "stt/tt_solver.hpp"

namespace stt {
namespace {

const double kPi = 3.14159265358979323846;

SolverOptions solver_options(const RunOptions& opts) {
  SolverOptions s;
  s.solver_tol = opts.solver_tol;
  s.tt_tol = opts.tt_tol;
  s.rmax = opts.rmax;
  s.max_sweeps = opts.max_sweeps;
  s.residual_safety = opts.residual_safety;
  s.on_progress = opts.on_progress;
  return s;
}

AssemblyOptions assembly_options(const RunOptions& opts) {
  AssemblyOptions a;
  a.tt_tol = opts.tt_tol;
  a.rmax = std::max(opts.rmax, 500);
  a.seed = opts.seed;
  a.cache_dir = opts.cache_dir;
  return a;
}

std::vector<IndexRange> unknown_windows(const Grid& grid, bool time_dependent) {
  std::vector<IndexRange> windows(time_dependent ? 4 : 3, grid.interior_space());
  if (time_dependent) windows[0] = grid.interior_time();
  return windows;
}

double dense_elements(const TTMatrix& a) {
  double total = 1.0;
  for (const TTMatCore& core : a.cores) total *= static_cast<double>(core.m) * core.n;
  return total;
}

double dense_elements_vec(const std::vector<int>& sizes) {
  double total = 1.0;
  for (int n : sizes) total *= n;
  return total;
}

// Exact solution sampled over the unknown windows, flattened last axis
// fastest to match both solver orderings.
std::vector<double> exact_window_values(const ProblemSpec& problem, const Grid& grid,
                                        bool time_dependent) {
  std::vector<IndexRange> windows = unknown_windows(grid, time_dependent);
  int modes = static_cast<int>(windows.size());
  long long total = 1;
  for (const auto& w : windows) total *= w.end - w.begin;
  std::vector<double> values(static_cast<size_t>(total));
  std::vector<int> idx(modes);
  for (int k = 0; k < modes; ++k) idx[k] = windows[k].begin;
  for (long long flat = 0; flat < total; ++flat) {
    double t = time_dependent ? grid.time_nodes[idx[0]] : 0.0;
    double x = grid.space_nodes[idx[modes - 3]];
    double y = grid.space_nodes[idx[modes - 2]];
    double z = grid.space_nodes[idx[modes - 1]];
    values[static_cast<size_t>(flat)] = problem.exact(t, x, y, z);
    for (int k = modes - 1; k >= 0; --k) {
      if (++idx[k] < windows[k].end) break;
      idx[k] = windows[k].begin;
    }
  }
  return values;
}

double full_grid_error(const std::vector<double>& u, const ProblemSpec& problem,
                       const Grid& grid, bool time_dependent, const ReferenceOptions& ropts) {
  std::vector<double> want = exact_window_values(problem, grid, time_dependent);
  std::vector<double> e(u.size());
  for (size_t i = 0; i < u.size(); ++i) e[i] = u[i] - want[i];
  SparseSystem mass = assemble_full_mass(grid, time_dependent, ropts);
  double quad = 0.0;
  for (const auto& t : mass.triplets) quad += e[t.row] * t.value * e[t.col];
  return std::sqrt(std::max(0.0, quad));
}

// Sparse matrix-vector product straight off the triplets.
std::vector<double> triplet_apply(const SparseSystem& sys, const std::vector<double>& x) {
  std::vector<double> y(x.size(), 0.0);
  for (const auto& t : sys.triplets) y[t.row] += t.value * x[t.col];
  return y;
}

double norm2(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// Full-grid counterpart of the train-format Newton iteration, for format
// agreement checks: solve A u = M (u - u^3) + load with sparse Jacobians.
std::pair<std::vector<double>, int> full_semilinear_solve(const SparseSystem& linear,
                                                          const SparseSystem& mass,
                                                          const RunOptions& opts,
                                                          const ReferenceOptions& ropts) {
  const int dim = linear.dimension;
  std::vector<double> u(static_cast<size_t>(dim), 0.0);
  const double target = opts.solver_tol * norm2(linear.rhs);
  int iterations = 0;
  for (; iterations <= 30; ++iterations) {
    std::vector<double> w(u.size());
    for (size_t i = 0; i < u.size(); ++i) w[i] = u[i] - u[i] * u[i] * u[i];
    std::vector<double> loss = triplet_apply(linear, u);
    std::vector<double> mw = triplet_apply(mass, w);
    for (int i = 0; i < dim; ++i) loss[i] -= mw[i] + linear.rhs[i];
    if (norm2(loss) <= target) return {u, iterations};
    SparseSystem jac;
    jac.dimension = dim;
    jac.triplets = linear.triplets;
    for (const auto& t : mass.triplets)
      jac.triplets.push_back({t.row, t.col, t.value * (3.0 * u[t.col] * u[t.col] - 1.0)});
    jac.rhs.assign(loss.begin(), loss.end());
    for (auto& v : jac.rhs) v = -v;
    std::vector<double> delta = solve_full(jac, ropts);
    for (int i = 0; i < dim; ++i) u[i] += delta[i];
  }
  throw std::runtime_error("full-grid cubic iteration did not converge in 30 steps");
}

// Fourth-order central differences used by the forcing validation.
template <typename F>
double fd1(const F& f, double h) {
  return (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h);
}

template <typename F>
double fd2(const F& f, double h) {
  return (-f(-2.0 * h) + 16.0 * f(-h) - 30.0 * f(0.0) + 16.0 * f(h) - f(2.0 * h)) /
         (12.0 * h * h);
}

struct PointDerivatives {
  double value = 0.0;
  double dt = 0.0;
  double grad[3] = {0.0, 0.0, 0.0};
  double laplacian = 0.0;
};

PointDerivatives differentiate(const FieldFn& f, double t, double x, double y, double z,
                               double h, bool with_time) {
  PointDerivatives d;
  d.value = f(t, x, y, z);
  if (with_time) d.dt = fd1([&](double s) { return f(t + s, x, y, z); }, h);
  auto fx = [&](double s) { return f(t, x + s, y, z); };
  auto fy = [&](double s) { return f(t, x, y + s, z); };
  auto fz = [&](double s) { return f(t, x, y, z + s); };
  d.grad[0] = fd1(fx, h);
  d.grad[1] = fd1(fy, h);
  d.grad[2] = fd1(fz, h);
  d.laplacian = fd2(fx, h) + fd2(fy, h) + fd2(fz, h);
  return d;
}

}  // namespace

std::string format_name(SolveFormat format) {
  switch (format) {
    case SolveFormat::full: return "full";
    case SolveFormat::tt: return "tt";
    default: return "qtt";
  }
}

SolveFormat parse_format(const std::string& name) {
  if (name == "full") return SolveFormat::full;
  if (name == "tt") return SolveFormat::tt;
  if (name == "qtt") return SolveFormat::qtt;
  throw std::invalid_argument("unknown format '" + name + "' (expected full, tt, or qtt)");
}

ProblemSpec make_poisson_problem() {
  ProblemSpec p;
  p.name = "poisson";
  p.kind = ProblemKind::stationary_diffusion;
  p.kappa = [](double, double x, double y, double z) {
    return 1.0 + std::cos(kPi * (x + y)) * std::cos(kPi * z);
  };
  p.exact = [](double, double x, double y, double z) {
    return std::sin(kPi * x) * std::sin(kPi * y) * std::sin(kPi * z);
  };
  p.forcing = [](double, double x, double y, double z) {
    const double sx = std::sin(kPi * x), cx = std::cos(kPi * x);
    const double sy = std::sin(kPi * y), cy = std::cos(kPi * y);
    const double sz = std::sin(kPi * z), cz = std::cos(kPi * z);
    const double sxy = std::sin(kPi * (x + y)), cxy = std::cos(kPi * (x + y));
    const double kappa = 1.0 + cxy * cz;
    return 3.0 * kPi * kPi * kappa * sx * sy * sz +
           kPi * kPi * sz * cz * (sxy * sxy + cxy * sx * sy);
  };
  return p;
}

ProblemSpec make_cdr_problem() {
  ProblemSpec p;
  p.name = "cdr";
  p.kind = ProblemKind::linear_cdr;
  p.kappa = [](double, double x, double y, double z) {
    return 1.0 + std::cos(kPi * x) * std::cos(kPi * y) * std::cos(kPi * z);
  };
  p.b1 = [](double, double x, double, double) { return x; };
  p.b2 = [](double, double, double y, double) { return y; };
  p.b3 = [](double, double, double, double z) { return z; };
  p.c = [](double, double x, double y, double z) { return std::exp(-(x + y + z)); };
  p.exact = [](double t, double x, double y, double z) {
    return std::sin(kPi * (t + x + y + z));
  };
  p.boundary = [](double t, double x, double y, double z) {
    return std::sin(kPi * (t + x + y + z));
  };
  p.initial = [](double, double x, double y, double z) {
    return std::sin(kPi * (x + y + z));
  };
  p.forcing = [](double t, double x, double y, double z) {
    const double phase = kPi * (t + x + y + z);
    const double s = std::sin(phase), c = std::cos(phase);
    const double sx = std::sin(kPi * x), cx = std::cos(kPi * x);
    const double sy = std::sin(kPi * y), cy = std::cos(kPi * y);
    const double sz = std::sin(kPi * z), cz = std::cos(kPi * z);
    const double kappa = 1.0 + cx * cy * cz;
    return kPi * c + 3.0 * kPi * kPi * kappa * s +
           kPi * kPi * c * (sx * cy * cz + cx * sy * cz + cx * cy * sz) +
           kPi * (x + y + z) * c + std::exp(-(x + y + z)) * s;
  };
  return p;
}

ProblemSpec make_semilinear_problem() {
  ProblemSpec p;
  p.name = "semilinear";
  p.kind = ProblemKind::semilinear;
  p.exact = [](double t, double x, double y, double z) {
    return std::sin(kPi * x) * std::sin(kPi * y) * std::sin(kPi * z) * std::sin(kPi * t) +
           std::sin(2.0 * kPi * x) * std::sin(2.0 * kPi * y) * std::sin(2.0 * kPi * z) *
               std::sin(2.0 * kPi * t);
  };
  p.forcing = [](double t, double x, double y, double z) {
    const double s1 = std::sin(kPi * x) * std::sin(kPi * y) * std::sin(kPi * z);
    const double s2 = std::sin(2.0 * kPi * x) * std::sin(2.0 * kPi * y) * std::sin(2.0 * kPi * z);
    const double u = s1 * std::sin(kPi * t) + s2 * std::sin(2.0 * kPi * t);
    const double ut = kPi * s1 * std::cos(kPi * t) + 2.0 * kPi * s2 * std::cos(2.0 * kPi * t);
    const double lap =
        -3.0 * kPi * kPi * s1 * std::sin(kPi * t) - 12.0 * kPi * kPi * s2 * std::sin(2.0 * kPi * t);
    return ut - lap - u + u * u * u;
  };
  return p;
}

ProblemSpec make_trivial_problem() {
  ProblemSpec p;
  p.name = "trivial";
  p.kind = ProblemKind::linear_cdr;
  p.exact = [](double, double, double, double) { return 0.0; };
  return p;
}

std::vector<ProblemSpec> problem_catalog() {
  return {make_poisson_problem(), make_cdr_problem(), make_semilinear_problem(),
          make_trivial_problem()};
}

ProblemSpec catalog_problem(const std::string& name) {
  for (ProblemSpec& p : problem_catalog())
    if (p.name == name) return std::move(p);
  throw std::invalid_argument("unknown problem '" + name +
                              "' (expected poisson, cdr, semilinear, or trivial)");
}

double forcing_validation_error(const ProblemSpec& problem, int samples, std::uint64_t seed) {
  if (!problem.exact) throw std::invalid_argument("forcing validation needs an exact solution");
  const double h = 5e-3;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.06, 0.94);
  bool time_dependent = problem.kind != ProblemKind::stationary_diffusion;
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    double t = time_dependent ? unif(rng) : 0.0;
    double x = unif(rng), y = unif(rng), z = unif(rng);
    PointDerivatives u = differentiate(problem.exact, t, x, y, z, h, time_dependent);
    double applied = 0.0;
    if (problem.kind == ProblemKind::semilinear) {
      applied = u.dt - u.laplacian - u.value + u.value * u.value * u.value;
    } else {
      double kappa = 1.0;
      double kappa_grad[3] = {0.0, 0.0, 0.0};
      if (problem.kappa) {
        PointDerivatives k = differentiate(problem.kappa, t, x, y, z, h, false);
        kappa = k.value;
        for (int d = 0; d < 3; ++d) kappa_grad[d] = k.grad[d];
      }
      applied = -kappa * u.laplacian;
      for (int d = 0; d < 3; ++d) applied -= kappa_grad[d] * u.grad[d];
      if (time_dependent) applied += u.dt;
      const FieldFn* convection[3] = {&problem.b1, &problem.b2, &problem.b3};
      for (int d = 0; d < 3; ++d)
        if (*convection[d]) applied += (*convection[d])(t, x, y, z) * u.grad[d];
      if (problem.c) applied += problem.c(t, x, y, z) * u.value;
    }
    double declared = problem.forcing ? problem.forcing(t, x, y, z) : 0.0;
    double gap = std::abs(applied - declared) / std::max(1.0, std::abs(declared));
    worst = std::max(worst, gap);
  }
  return worst;
}

double compute_l2_error(const TTVector& u, const FieldFn& exact, bool time_dependent,
                        const Grid& grid, const AssemblyOptions& opts) {
  if (!exact) throw std::invalid_argument("error evaluation needs an exact solution");
  TTVector star = interpolate_field_tt(exact, grid, time_dependent, opts.tt_tol * 0.1, opts);
  TTVector star_interior = restrict_modes(star, unknown_windows(grid, time_dependent));
  if (u.mode_sizes() != star_interior.mode_sizes())
    throw std::invalid_argument("solution modes do not match the unknown windows");
  TTVector e = tt_round(tt_axpy(-1.0, star_interior, u), opts.tt_tol * 0.1);
  TTMatrix mass = build_mass_tt(grid, time_dependent, opts);
  double quad = tt_dot(e, ttmat_apply(mass, e));
  return std::sqrt(std::max(0.0, quad));
}

SolveReport run_experiment(const ProblemSpec& problem, int elements, const RunOptions& opts) {
  SolveReport report;
  report.experiment = problem.name;
  report.elements = elements;
  report.format = opts.format;
  report.tt_tol = opts.tt_tol;
  report.solver_tol = opts.solver_tol;
  const auto started = std::chrono::steady_clock::now();
  std::string stage = "grid";
  try {
    Grid grid(elements, problem.length, problem.final_time);
    const bool time_dependent = problem.kind != ProblemKind::stationary_diffusion;
    const bool semilinear = problem.kind == ProblemKind::semilinear;
    if (semilinear && (problem.boundary || problem.initial))
      throw std::invalid_argument(
          "the cubic-reaction path assumes homogeneous boundary and initial data");

    if (opts.format == SolveFormat::full) {
      stage = "assembly";
      ReferenceOptions ropts;
      ropts.unknown_cap = opts.full_unknown_cap;
      SparseSystem sys = assemble_full_system(problem, grid, ropts);
      stage = "solve";
      std::vector<double> u;
      if (semilinear) {
        SparseSystem mass = assemble_full_mass(grid, true, ropts);
        auto solved = full_semilinear_solve(sys, mass, opts, ropts);
        u = std::move(solved.first);
        report.newton_iterations = solved.second;
      } else {
        u = solve_full(sys, ropts);
      }
      report.converged = true;
      stage = "error";
      if (problem.exact) report.l2_error = full_grid_error(u, problem, grid, time_dependent, ropts);
    } else {
      stage = "assembly";
      AssemblyOptions aopts = assembly_options(opts);
      TTMatrix op_map = build_operator_tt(problem, grid, aopts);
      TTMatrix a = restrict_columns(op_map, grid);
      TTVector rhs = build_load_tt(problem, grid, aopts);
      TTVector lift = build_boundary_term_tt(problem, grid, aopts, &op_map);
      if (tt_norm(lift) > 0.0) rhs = tt_round(tt_axpy(-1.0, lift, rhs), aopts.tt_tol);

      SolverOptions sopts = solver_options(opts);
      TTVector solution;  // on the unknown windows, whatever the solve format
      if (opts.format == SolveFormat::tt) {
        report.operator_ranks = a.ranks();
        report.operator_compression = compression_ratio(a);
        stage = "solve";
        SolveStats stats;
        if (semilinear) {
          TTMatrix mass = build_mass_tt(grid, true, aopts);
          SolverOptions pre = sopts;
          pre.solver_tol = 0.01 * opts.solver_tol;
          pre.residual_safety = 0.1;
          pre.on_progress = nullptr;
          auto mass_solve = als_solve(mass, rhs, pre);
          if (!mass_solve.second.converged)
            throw std::runtime_error("mass pre-solve for the cubic term did not converge");
          SemilinearSystem sys{a, mass, mass_solve.first};
          auto solved = newton_solve(sys, tt_zero(a.col_sizes()), sopts);
          solution = std::move(solved.first);
          stats = std::move(solved.second);
        } else {
          auto solved = als_solve(a, rhs, sopts);
          solution = std::move(solved.first);
          stats = std::move(solved.second);
        }
        report.sweeps = stats.sweeps_used;
        report.newton_iterations = stats.newton_iterations;
        report.final_residual = stats.final_residual;
        report.converged = stats.converged;
        report.solution_ranks = solution.ranks();
        report.solution_compression = compression_ratio(solution);
      } else {
        // digit-split path: embed every mode into the next power of two, with
        // ones completing the operator diagonal so the system stays regular
        TTMatrix a_embedded = embed_pow2(a, true);
        TTVector rhs_embedded = embed_pow2(rhs);
        std::vector<std::vector<int>> row_fact, col_fact, vec_fact;
        TTMatrix qa = quantize(a_embedded, aopts.tt_tol, &row_fact, &col_fact);
        TTVector qb = quantize(rhs_embedded, aopts.tt_tol, &vec_fact);
        report.operator_ranks = qa.ranks();
        report.operator_compression = dense_elements(a) / qa.parameter_count();
        stage = "solve";
        SolveStats stats;
        TTVector qx;
        if (semilinear) {
          TTMatrix mass = build_mass_tt(grid, true, aopts);
          SolverOptions pre = sopts;
          pre.solver_tol = 0.01 * opts.solver_tol;
          pre.residual_safety = 0.1;
          pre.on_progress = nullptr;
          auto mass_solve = als_solve(mass, rhs, pre);
          if (!mass_solve.second.converged)
            throw std::runtime_error("mass pre-solve for the cubic term did not converge");
          // zero-complement mass keeps the added unknowns decoupled while the
          // operator's identity block makes the padded Jacobian regular
          TTMatrix qm = quantize(embed_pow2(mass, false), aopts.tt_tol);
          TTVector qf = quantize(embed_pow2(mass_solve.first), aopts.tt_tol);
          SemilinearSystem sys{qa, qm, qf};
          auto solved = newton_solve(sys, tt_zero(qa.col_sizes()), sopts);
          qx = std::move(solved.first);
          stats = std::move(solved.second);
        } else {
          auto solved = als_solve(qa, qb, sopts);
          qx = std::move(solved.first);
          stats = std::move(solved.second);
        }
        report.sweeps = stats.sweeps_used;
        report.newton_iterations = stats.newton_iterations;
        report.final_residual = stats.final_residual;
        report.converged = stats.converged;
        report.solution_ranks = qx.ranks();

        std::vector<IndexRange> windows = unknown_windows(grid, time_dependent);
        std::vector<int> window_sizes;
        std::vector<IndexRange> original;
        for (const auto& w : windows) {
          window_sizes.push_back(w.end - w.begin);
          original.push_back({0, w.end - w.begin});
        }
        report.solution_compression = dense_elements_vec(window_sizes) / qx.parameter_count();
        TTVector padded = dequantize(qx, vec_fact);
        solution = tt_round(restrict_modes(padded, original), aopts.tt_tol);
      }
      stage = "error";
      if (problem.exact)
        report.l2_error = compute_l2_error(solution, problem.exact, time_dependent, grid, aopts);
    }
  } catch (const std::exception& error) {
    report.failure_stage = stage;
    report.failure_message = error.what();
    report.converged = false;
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

std::vector<RankStudyEntry> rank_study_catalog() {
  std::vector<RankStudyEntry> entries;
  entries.push_back({"1", FieldFn{}, 1e-12});
  entries.push_back(
      {"1 + xyz", [](double, double x, double y, double z) { return 1.0 + x * y * z; }, 1e-12});
  entries.push_back({"1 + cos(pi(x+y))cos(pi z)",
                     [](double, double x, double y, double z) {
                       return 1.0 + std::cos(kPi * (x + y)) * std::cos(kPi * z);
                     },
                     1e-12});
  entries.push_back({"1/(1 + x+y+z)",
                     [](double, double x, double y, double z) {
                       return 1.0 / (1.0 + x + y + z);
                     },
                     1e-6});
  entries.push_back({"1/(1 + x+y+z)",
                     [](double, double x, double y, double z) {
                       return 1.0 / (1.0 + x + y + z);
                     },
                     1e-12});
  return entries;
}

std::vector<RankStudyRow> rank_study(const std::vector<RankStudyEntry>& entries,
                                     const std::vector<int>& element_counts,
                                     const AssemblyOptions& base) {
  if (element_counts.empty()) throw std::invalid_argument("rank study needs at least one grid");
  std::vector<RankStudyRow> rows;
  int entry_index = 0;
  for (const auto& entry : entries) {
    RankStudyRow row;
    row.label = entry.label;
    row.tol = entry.tol;
    for (size_t g = 0; g < element_counts.size(); ++g) {
      int elems = element_counts[g];
      if (elems < 2)
        throw std::invalid_argument("rank study grids are element counts (at least 2)");
      Grid grid(elems);
      AssemblyOptions opts = base;
      opts.tt_tol = entry.tol;
      opts.coefficient_tol = entry.tol;
      opts.force_cross = true;
      if (g == 0) {
        if (entry.kappa) {
          TTVector coeff = interpolate_field_tt(entry.kappa, grid, false, entry.tol, opts);
          row.coefficient_ranks = coeff.ranks();
        } else {
          row.coefficient_ranks = {1, 1};
        }
      }
      ProblemSpec p;
      p.name = "rank-study-" + std::to_string(entry_index);
      p.kind = ProblemKind::stationary_diffusion;
      p.kappa = entry.kappa;
      TTMatrix square = restrict_columns(build_operator_tt(p, grid, opts), grid);
      // one more rounding pass: a single truncation sweep is not idempotent
      // at the tolerance margin and can leave one spurious rank
      square = tt_round(square, entry.tol);
      row.operator_ranks.push_back(square.ranks());
    }
    rows.push_back(std::move(row));
    ++entry_index;
  }
  return rows;
}

double fit_order(const std::vector<SolveReport>& rows) {
  std::vector<double> xs, ys;
  for (const auto& row : rows)
    if (row.failure_stage.empty() && row.converged && row.l2_error > 0.0) {
      xs.push_back(std::log(1.0 / row.elements));
      ys.push_back(std::log(row.l2_error));
    }
  if (xs.size() < 2)
    throw std::runtime_error("too few successful solves to fit a convergence order");
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) * (xs[i] - mx);
  }
  return num / den;
}

ConvergenceStudy convergence_study(const ProblemSpec& problem,
                                   const std::vector<int>& element_counts,
                                   const RunOptions& opts) {
  if (element_counts.size() < 2)
    throw std::invalid_argument("a convergence study needs at least two grids");
  if (!problem.exact)
    throw std::invalid_argument("a convergence study needs the exact solution");
  ConvergenceStudy study;
  for (int n : element_counts) study.rows.push_back(run_experiment(problem, n, opts));
  std::stable_sort(study.rows.begin(), study.rows.end(),
                   [](const SolveReport& a, const SolveReport& b) {
                     return a.elements < b.elements;
                   });
  study.fitted_order = fit_order(study.rows);
  return study;
}

}  // namespace stt
