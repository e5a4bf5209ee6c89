#include "stt/sem.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <stdexcept>

#include "stt/cross.hpp"

namespace stt {

namespace {

Matrix block_diagonal_repeat(const Matrix& local, int count) {
  Matrix out(2 * count, 2 * count);
  for (int e = 0; e < count; ++e)
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) out(2 * e + r, 2 * e + c) = local(r, c);
  return out;
}

const Matrix* weighted_pair(const Local1D& loc, FactorKind kind) {
  switch (kind) {
    case FactorKind::mass: return loc.weighted_mass;
    case FactorKind::stiffness: return loc.weighted_stiffness;
    case FactorKind::derivative: return loc.weighted_derivative;
  }
  throw std::invalid_argument("unknown factor kind");
}

std::vector<FactorKind> kinds_with(int modes, int slot, FactorKind special) {
  std::vector<FactorKind> kinds(modes, FactorKind::mass);
  if (slot >= 0) kinds[slot] = special;
  return kinds;
}

bool is_time_dependent(const ProblemSpec& problem) {
  return problem.kind != ProblemKind::stationary_diffusion;
}

std::vector<int> unknown_dims(const Grid& grid, bool time_dependent) {
  std::vector<int> dims(time_dependent ? 4 : 3, grid.elements - 1);
  if (time_dependent) dims[0] = grid.elements;
  return dims;
}

std::vector<IndexRange> unknown_rows(const Grid& grid, bool time_dependent) {
  std::vector<IndexRange> rows(time_dependent ? 4 : 3, grid.interior_space());
  if (time_dependent) rows[0] = grid.interior_time();
  return rows;
}

double effective_coefficient_tol(const AssemblyOptions& opts) {
  return opts.coefficient_tol > 0 ? opts.coefficient_tol : opts.tt_tol;
}

// Sum the weak-form terms, restrict test rows to unknowns, round.
TTMatrix finish_operator(std::vector<TTMatrix>& terms, const Grid& grid, bool time_dependent,
                         const AssemblyOptions& opts) {
  TTMatrix acc = terms.front();
  for (size_t i = 1; i < terms.size(); ++i) {
    acc = ttmat_axpy(1.0, terms[i], acc);
    if (opts.round_each_term) acc = tt_round(acc, opts.tt_tol, opts.rmax);
  }
  int modes = acc.order();
  std::vector<IndexRange> cols(modes, grid.all_nodes());
  acc = restrict_modes(acc, unknown_rows(grid, time_dependent), cols);
  return tt_round(acc, opts.tt_tol, opts.rmax);
}

// All-node coefficient-free mass map (unknown rows, all columns).
TTMatrix mass_map(const Grid& grid, bool time_dependent, const AssemblyOptions& opts) {
  int modes = time_dependent ? 4 : 3;
  TTVector one = tt_ones(std::vector<int>(modes, grid.node_count()));
  TTMatrix m = contract_coefficient_operator(one, kinds_with(modes, -1, FactorKind::mass), grid);
  std::vector<IndexRange> cols(modes, grid.all_nodes());
  return restrict_modes(m, unknown_rows(grid, time_dependent), cols);
}

std::string cache_path(const ProblemSpec& problem, const Grid& grid, const AssemblyOptions& opts) {
  char tag[256];
  std::snprintf(tag, sizeof tag, "%s|%d|%d|%a|%a|%d|%d|%d|%a|%a", problem.name.c_str(),
                static_cast<int>(problem.kind), grid.elements, opts.tt_tol,
                effective_coefficient_tol(opts), opts.rmax, opts.round_each_term ? 1 : 0,
                opts.force_cross ? 1 : 0, problem.length, problem.final_time);
  char name[128];
  std::snprintf(name, sizeof name, "op-%016" PRIx64 ".tt",
                static_cast<std::uint64_t>(std::hash<std::string>{}(tag)));
  return (std::filesystem::path(opts.cache_dir) / name).string();
}

}  // namespace

Grid::Grid(int elements_in, double length_in, double final_time_in)
    : elements(elements_in), length(length_in), final_time(final_time_in) {
  if (elements < 1) throw std::invalid_argument("grid needs at least one element");
  if (!(length > 0.0) || !(final_time > 0.0))
    throw std::invalid_argument("grid extents must be positive");
  space_spacing = length / elements;
  time_spacing = final_time / elements;
  space_nodes.resize(elements + 1);
  time_nodes.resize(elements + 1);
  for (int i = 0; i <= elements; ++i) {
    space_nodes[i] = length * i / elements;
    time_nodes[i] = final_time * i / elements;
  }
}

Local1D local_matrices(double h) {
  if (!(h > 0.0)) throw std::invalid_argument("element width must be positive");
  Local1D loc;
  loc.mass = h * Matrix{{1.0 / 3, 1.0 / 6}, {1.0 / 6, 1.0 / 3}};
  loc.stiffness = (1.0 / h) * Matrix{{1.0, -1.0}, {-1.0, 1.0}};
  loc.time_derivative = Matrix{{-0.5, 0.5}, {-0.5, 0.5}};
  loc.weighted_mass[0] = h * Matrix{{1.0 / 4, 1.0 / 12}, {1.0 / 12, 1.0 / 12}};
  loc.weighted_mass[1] = h * Matrix{{1.0 / 12, 1.0 / 12}, {1.0 / 12, 1.0 / 4}};
  loc.weighted_stiffness[0] = (1.0 / h) * Matrix{{0.5, -0.5}, {-0.5, 0.5}};
  loc.weighted_stiffness[1] = loc.weighted_stiffness[0];
  loc.weighted_derivative[0] = Matrix{{-1.0 / 3, 1.0 / 3}, {-1.0 / 6, 1.0 / 6}};
  loc.weighted_derivative[1] = Matrix{{-1.0 / 6, 1.0 / 6}, {-1.0 / 3, 1.0 / 3}};
  return loc;
}

Matrix assembly_binary(int elements) {
  if (elements < 1) throw std::invalid_argument("assembly needs at least one element");
  Matrix b(elements + 1, 2 * elements);
  b(0, 0) = 1.0;
  for (int k = 1; k < elements; ++k) {
    b(k, 2 * k - 1) = 1.0;
    b(k, 2 * k) = 1.0;
  }
  b(elements, 2 * elements - 1) = 1.0;
  return b;
}

Matrix assemble_global_1d(const Matrix& local, int elements) {
  Matrix b = assembly_binary(elements);
  return matmul_nt(matmul(b, block_diagonal_repeat(local, elements)), b);
}

Matrix coefficient_staggered_diagonals(const std::vector<double>& nodal_values, int p) {
  if (nodal_values.size() < 2) throw std::invalid_argument("need at least two nodal values");
  if (p != 0 && p != 1) throw std::invalid_argument("weight index must be 0 or 1");
  int elements = static_cast<int>(nodal_values.size()) - 1;
  Matrix c(2 * elements, 2 * elements);
  for (int e = 0; e < elements; ++e) {
    c(2 * e, 2 * e) = nodal_values[std::min(e + p, elements)];
    c(2 * e + 1, 2 * e + 1) = nodal_values[std::min(e + p + 1, elements)];
  }
  return c;
}

Matrix coefficient_element_diagonals(const std::vector<double>& nodal_values, int p) {
  if (nodal_values.size() < 2) throw std::invalid_argument("need at least two nodal values");
  if (p != 0 && p != 1) throw std::invalid_argument("weight index must be 0 or 1");
  int elements = static_cast<int>(nodal_values.size()) - 1;
  Matrix c(2 * elements, 2 * elements);
  for (int e = 0; e < elements; ++e) {
    c(2 * e, 2 * e) = nodal_values[e + p];
    c(2 * e + 1, 2 * e + 1) = nodal_values[e + p];
  }
  return c;
}

Matrix assemble_weighted_global_1d(const Matrix& localp, const Matrix& c_p, const Matrix& b) {
  if (localp.rows != 2 || localp.cols != 2)
    throw std::invalid_argument("local matrix must be 2x2");
  if (b.cols != c_p.rows || c_p.rows != c_p.cols || b.cols != 2 * (b.rows - 1))
    throw std::invalid_argument("assembly matrix sizes are inconsistent");
  int elements = b.rows - 1;
  return matmul_nt(matmul(matmul(b, block_diagonal_repeat(localp, elements)), c_p), b);
}

std::vector<Matrix> node_weight_matrices(FactorKind kind, int elements, double h) {
  Local1D loc = local_matrices(h);
  const Matrix* pair = weighted_pair(loc, kind);
  std::vector<Matrix> w(elements + 1, Matrix(elements + 1, elements + 1));
  for (int e = 0; e < elements; ++e)
    for (int p = 0; p < 2; ++p)
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) w[e + p](e + r, e + c) += pair[p](r, c);
  return w;
}

TTVector interpolate_field_tt(const FieldFn& f, const Grid& grid, bool time_dependent,
                              double tol, const AssemblyOptions& opts) {
  if (!f) throw std::invalid_argument("field closure is empty");
  int modes = time_dependent ? 4 : 3;
  std::vector<std::vector<double>> axes(modes, grid.space_nodes);
  if (time_dependent) axes[0] = grid.time_nodes;
  auto value = [&](const std::vector<double>& c) {
    return time_dependent ? f(c[0], c[1], c[2], c[3]) : f(0.0, c[0], c[1], c[2]);
  };

  long long total = 1;
  for (const auto& axis : axes) total *= static_cast<long long>(axis.size());
  if (!opts.force_cross && total <= opts.dense_interpolation_cap) {
    std::vector<int> shape(modes, grid.node_count());
    DenseTensor x(shape);
    std::vector<int> idx(modes, 0);
    std::vector<double> coords(modes);
    for (long long flat = 0; flat < total; ++flat) {
      for (int k = 0; k < modes; ++k) coords[k] = axes[k][idx[k]];
      x.a[flat] = value(coords);
      for (int k = modes - 1; k >= 0; --k) {
        if (++idx[k] <= grid.elements) break;
        idx[k] = 0;
      }
    }
    return tt_from_dense(x, tol, opts.rmax);
  }

  CrossOptions copts;
  copts.tol = tol;
  copts.rmax = opts.rmax;
  copts.seed = opts.seed;
  CrossResult res = cross_interpolate(grid_function_from_axes(axes, value), copts);
  if (!res.converged)
    std::fprintf(stderr,
                 "warning: field interpolation stopped at sample error %.3e (target %.3e)\n",
                 res.sample_error, tol);
  return res.values;
}

TTMatrix contract_coefficient_operator(const TTVector& coeff, const std::vector<FactorKind>& kinds,
                                       const Grid& grid) {
  int modes = coeff.order();
  if (static_cast<int>(kinds.size()) != modes)
    throw std::invalid_argument("one factor kind per coefficient mode required");
  if (modes != 3 && modes != 4)
    throw std::invalid_argument("operator layout is 3 space modes with optional leading time");
  bool time_dependent = modes == 4;
  int n = grid.node_count();

  TTMatrix op;
  op.cores.reserve(modes);
  for (int k = 0; k < modes; ++k) {
    const TTCore& coef = coeff.cores[k];
    if (coef.n != n)
      throw std::invalid_argument("coefficient train mode size does not match the grid");
    double h = (time_dependent && k == 0) ? grid.time_spacing : grid.space_spacing;
    Local1D loc = local_matrices(h);
    const Matrix* pair = weighted_pair(loc, kinds[k]);
    TTMatCore out(coef.r0, n, n, coef.r1);
    for (int a0 = 0; a0 < coef.r0; ++a0)
      for (int j = 0; j < n; ++j)
        for (int a1 = 0; a1 < coef.r1; ++a1) {
          double v = coef.at(a0, j, a1);
          if (v == 0.0) continue;
          for (int p = 0; p < 2; ++p) {
            int e = j - p;
            if (e < 0 || e >= grid.elements) continue;
            for (int r = 0; r < 2; ++r)
              for (int c = 0; c < 2; ++c) out.at(a0, e + r, e + c, a1) += v * pair[p](r, c);
          }
        }
    op.cores.push_back(std::move(out));
  }
  op.validate();
  return op;
}

TTMatrix build_operator_tt(const ProblemSpec& problem, const Grid& grid,
                           const AssemblyOptions& opts) {
  std::string cached;
  if (!opts.cache_dir.empty()) {
    cached = cache_path(problem, grid, opts);
    if (std::filesystem::exists(cached)) {
      LoadedTrain t = load_train(cached);
      if (t.is_matrix) return t.mat;
    }
  }

  bool time_dependent = is_time_dependent(problem);
  if (problem.kind == ProblemKind::semilinear && (problem.b1 || problem.b2 || problem.b3 || problem.c))
    throw std::invalid_argument(
        "semilinear problems keep convection and the linear reaction slot empty");

  int modes = time_dependent ? 4 : 3;
  int n = grid.node_count();
  double ctol = effective_coefficient_tol(opts);
  int first_space = modes - 3;

  std::vector<TTMatrix> terms;
  if (time_dependent) {
    TTVector one = tt_ones(std::vector<int>(modes, n));
    terms.push_back(
        contract_coefficient_operator(one, kinds_with(modes, 0, FactorKind::derivative), grid));
  }

  TTVector kappa = problem.kappa
                       ? interpolate_field_tt(problem.kappa, grid, time_dependent, ctol, opts)
                       : tt_ones(std::vector<int>(modes, n));
  for (int d = 0; d < 3; ++d)
    terms.push_back(contract_coefficient_operator(
        kappa, kinds_with(modes, first_space + d, FactorKind::stiffness), grid));

  const FieldFn* convection[3] = {&problem.b1, &problem.b2, &problem.b3};
  for (int d = 0; d < 3; ++d) {
    if (!*convection[d]) continue;
    TTVector comp = interpolate_field_tt(*convection[d], grid, time_dependent, ctol, opts);
    terms.push_back(contract_coefficient_operator(
        comp, kinds_with(modes, first_space + d, FactorKind::derivative), grid));
  }

  if (problem.c) {
    TTVector reaction = interpolate_field_tt(problem.c, grid, time_dependent, ctol, opts);
    terms.push_back(
        contract_coefficient_operator(reaction, kinds_with(modes, -1, FactorKind::mass), grid));
  }

  TTMatrix op = finish_operator(terms, grid, time_dependent, opts);
  if (!cached.empty()) {
    std::filesystem::create_directories(opts.cache_dir);
    save_train(cached, op);
  }
  return op;
}

TTMatrix restrict_columns(const TTMatrix& op, const Grid& grid) {
  int modes = op.order();
  bool time_dependent = modes == 4;
  std::vector<IndexRange> rows(modes);
  for (int k = 0; k < modes; ++k) rows[k] = {0, op.cores[k].m};
  return restrict_modes(op, rows, unknown_rows(grid, time_dependent));
}

TTMatrix build_mass_tt(const Grid& grid, bool time_dependent, const AssemblyOptions& opts) {
  TTMatrix m = mass_map(grid, time_dependent, opts);
  return tt_round(restrict_columns(m, grid), opts.tt_tol, opts.rmax);
}

TTVector build_load_tt(const ProblemSpec& problem, const Grid& grid, const AssemblyOptions& opts) {
  bool time_dependent = is_time_dependent(problem);
  if (!problem.forcing) return tt_zero(unknown_dims(grid, time_dependent));
  double ctol = effective_coefficient_tol(opts);
  TTVector f = interpolate_field_tt(problem.forcing, grid, time_dependent, ctol, opts);
  TTVector load = ttmat_apply(mass_map(grid, time_dependent, opts), f);
  return tt_round(load, opts.tt_tol, opts.rmax);
}

TTVector build_boundary_term_tt(const ProblemSpec& problem, const Grid& grid,
                                const AssemblyOptions& opts, const TTMatrix* operator_map) {
  bool time_dependent = is_time_dependent(problem);
  bool has_initial = time_dependent && static_cast<bool>(problem.initial);
  if (!problem.boundary && !has_initial) return tt_zero(unknown_dims(grid, time_dependent));

  int modes = time_dependent ? 4 : 3;
  int n = grid.node_count();
  double ctol = effective_coefficient_tol(opts);

  TTVector known;
  bool have = false;
  if (problem.boundary) {
    TTVector g = interpolate_field_tt(problem.boundary, grid, time_dependent, ctol, opts);
    // Keep spatial-boundary nodes (at t > 0 when time is present), zero the rest.
    Matrix full = Matrix::identity(n);
    Matrix inner(n, n);
    for (int i = 1; i + 1 <= grid.elements; ++i) inner(i, i) = 1.0;
    Matrix late = Matrix::identity(n);
    if (time_dependent) late(0, 0) = 0.0;
    std::vector<Matrix> keep_all(modes, full), keep_inner(modes, inner);
    if (time_dependent) keep_all[0] = keep_inner[0] = late;
    TTMatrix mask = ttmat_axpy(-1.0, ttmat_from_factors(keep_inner), ttmat_from_factors(keep_all));
    known = ttmat_apply(mask, g);
    have = true;
  }
  if (has_initial) {
    TTVector u0 = interpolate_field_tt(problem.initial, grid, false, ctol, opts);
    TTCore start(1, n, 1);
    start.at(0, 0, 0) = 1.0;
    TTVector lifted;
    lifted.cores.push_back(std::move(start));
    for (auto& core : u0.cores) lifted.cores.push_back(std::move(core));
    known = have ? tt_axpy(1.0, lifted, known) : lifted;
    have = true;
  }
  known = tt_round(known, 0.1 * ctol, opts.rmax);

  TTVector term = operator_map ? ttmat_apply(*operator_map, known)
                               : ttmat_apply(build_operator_tt(problem, grid, opts), known);
  return tt_round(term, opts.tt_tol, opts.rmax);
}

}  // namespace stt
