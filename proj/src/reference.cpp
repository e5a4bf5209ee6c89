#include "stt/reference.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace stt {
namespace {

constexpr double kGaussOffset = 0.21132486540518712;  // (1 - 1/sqrt(3)) / 2

// Hat-function data on one axis of an element, sampled at the two Gauss
// points of [0, h]; hat 0 is the one equal to 1 at the left node.
struct AxisShapes {
  double value[2][2];  // [gauss point][hat]
  double slope[2];
};

AxisShapes axis_shapes(double h) {
  AxisShapes s;
  const double xi[2] = {kGaussOffset, 1.0 - kGaussOffset};
  for (int g = 0; g < 2; ++g) {
    s.value[g][0] = 1.0 - xi[g];
    s.value[g][1] = xi[g];
  }
  s.slope[0] = -1.0 / h;
  s.slope[1] = 1.0 / h;
  return s;
}

// Tensorized two-point Gauss rule: exact for the trilinear-coefficient
// integrands here (per-axis polynomial degree at most three). Local nodes and
// quadrature points share one packing: one bit per axis, first axis highest.
struct QuadratureTables {
  int modes = 3;
  int count = 8;       // 2^modes local nodes; equally many quadrature points
  double weight = 0.0; // common weight of every quadrature point
  std::vector<double> value;                  // [point*count + node]
  std::vector<std::vector<double>> gradient;  // per axis, [point*count + node]
};

int packed_bit(int packed, int axis, int modes) { return (packed >> (modes - 1 - axis)) & 1; }

QuadratureTables make_tables(const Grid& grid, bool time_dependent) {
  QuadratureTables q;
  q.modes = time_dependent ? 4 : 3;
  q.count = 1 << q.modes;
  std::vector<AxisShapes> axes(q.modes);
  q.weight = 1.0;
  for (int k = 0; k < q.modes; ++k) {
    double h = (time_dependent && k == 0) ? grid.time_spacing : grid.space_spacing;
    axes[k] = axis_shapes(h);
    q.weight *= 0.5 * h;  // both one-dimensional Gauss weights equal h/2
  }
  q.value.assign(static_cast<size_t>(q.count) * q.count, 0.0);
  q.gradient.assign(q.modes, std::vector<double>(static_cast<size_t>(q.count) * q.count, 0.0));
  for (int p = 0; p < q.count; ++p)
    for (int node = 0; node < q.count; ++node) {
      double v = 1.0;
      for (int k = 0; k < q.modes; ++k)
        v *= axes[k].value[packed_bit(p, k, q.modes)][packed_bit(node, k, q.modes)];
      q.value[static_cast<size_t>(p) * q.count + node] = v;
      for (int a = 0; a < q.modes; ++a) {
        double g = axes[a].slope[packed_bit(node, a, q.modes)];
        for (int k = 0; k < q.modes; ++k)
          if (k != a) g *= axes[k].value[packed_bit(p, k, q.modes)][packed_bit(node, k, q.modes)];
        q.gradient[a][static_cast<size_t>(p) * q.count + node] = g;
      }
    }
  return q;
}

struct NodeInfo {
  bool known = false;
  double value = 0.0;  // prescribed value when known
  int index = -1;      // unknown index otherwise
};

long long count_unknowns(const Grid& grid, bool time_dependent) {
  long long interior = grid.elements - 1;
  long long u = interior * interior * interior;
  if (time_dependent) u *= grid.elements;
  return u;
}

// Walk all nodes in flat order (last axis fastest) and split them into
// unknowns, numbered consecutively, and known nodes carrying their data: the
// initial level at the first time node, Dirichlet data on the spatial
// boundary, zero when the problem leaves either unset.
std::vector<NodeInfo> classify_nodes(const ProblemSpec* problem, const Grid& grid,
                                     bool time_dependent) {
  int n = grid.node_count();
  int modes = time_dependent ? 4 : 3;
  long long total = 1;
  for (int k = 0; k < modes; ++k) total *= n;
  std::vector<NodeInfo> info(static_cast<size_t>(total));
  std::vector<int> idx(modes, 0);
  int next = 0;
  for (long long flat = 0; flat < total; ++flat) {
    NodeInfo& node = info[static_cast<size_t>(flat)];
    double t = time_dependent ? grid.time_nodes[idx[0]] : 0.0;
    double x = grid.space_nodes[idx[modes - 3]];
    double y = grid.space_nodes[idx[modes - 2]];
    double z = grid.space_nodes[idx[modes - 1]];
    bool outer = false;
    for (int k = modes - 3; k < modes; ++k)
      outer = outer || idx[k] == 0 || idx[k] == grid.elements;
    if (time_dependent && idx[0] == 0) {
      node.known = true;
      if (problem && problem->initial) node.value = problem->initial(0.0, x, y, z);
    } else if (outer) {
      node.known = true;
      if (problem && problem->boundary) node.value = problem->boundary(t, x, y, z);
    } else {
      node.index = next++;
    }
    for (int k = modes - 1; k >= 0; --k) {
      if (++idx[k] < n) break;
      idx[k] = 0;
    }
  }
  return info;
}

SparseSystem assemble_impl(const ProblemSpec* problem, const Grid& grid, bool time_dependent,
                           bool mass_only, const ReferenceOptions& opts) {
  long long unknowns = count_unknowns(grid, time_dependent);
  if (unknowns > opts.unknown_cap)
    throw std::invalid_argument("full-grid system has " + std::to_string(unknowns) +
                                " unknowns, above the cap of " +
                                std::to_string(opts.unknown_cap) +
                                "; use the train-format path instead");
  SparseSystem sys;
  sys.dimension = static_cast<int>(unknowns);
  sys.rhs.assign(static_cast<size_t>(sys.dimension), 0.0);
  if (unknowns == 0) return sys;

  const int modes = time_dependent ? 4 : 3;
  const int count = 1 << modes;
  const QuadratureTables q = make_tables(grid, time_dependent);
  const std::vector<NodeInfo> info = classify_nodes(problem, grid, time_dependent);
  sys.triplets.reserve(static_cast<size_t>(sys.dimension) * (mass_only ? 24 : 40));

  const bool has_time = time_dependent && !mass_only;
  const int first_space = modes - 3;
  const FieldFn* convection[3] = {nullptr, nullptr, nullptr};
  bool any_convection = false;
  bool has_reaction = false;
  bool has_forcing = false;
  if (!mass_only && problem) {
    const FieldFn* fields[3] = {&problem->b1, &problem->b2, &problem->b3};
    for (int d = 0; d < 3; ++d) {
      convection[d] = fields[d];
      any_convection = any_convection || static_cast<bool>(*fields[d]);
    }
    has_reaction = static_cast<bool>(problem->c);
    has_forcing = static_cast<bool>(problem->forcing);
  }

  long long elements_total = 1;
  for (int k = 0; k < modes; ++k) elements_total *= grid.elements;

  std::vector<long long> node_flat(static_cast<size_t>(count));
  std::vector<double> kappa_nodal(count), reaction_nodal(count), forcing_nodal(count);
  std::vector<double> convection_nodal[3];
  for (auto& v : convection_nodal) v.assign(static_cast<size_t>(count), 0.0);
  std::vector<double> local(static_cast<size_t>(count) * count);
  std::vector<double> local_rhs(static_cast<size_t>(count));
  std::vector<int> elem(modes, 0);

  for (long long e = 0; e < elements_total; ++e) {
    {
      long long rest = e;
      for (int k = modes - 1; k >= 0; --k) {
        elem[k] = static_cast<int>(rest % grid.elements);
        rest /= grid.elements;
      }
    }
    for (int node = 0; node < count; ++node) {
      long long flat = 0;
      double t = 0.0, c[3] = {0.0, 0.0, 0.0};
      for (int k = 0; k < modes; ++k) {
        int i = elem[k] + packed_bit(node, k, modes);
        flat = flat * grid.node_count() + i;
        if (time_dependent && k == 0)
          t = grid.time_nodes[i];
        else
          c[k - first_space] = grid.space_nodes[i];
      }
      node_flat[static_cast<size_t>(node)] = flat;
      if (!mass_only) {
        kappa_nodal[node] =
            (problem && problem->kappa) ? problem->kappa(t, c[0], c[1], c[2]) : 1.0;
        for (int d = 0; d < 3; ++d)
          if (convection[d] && *convection[d])
            convection_nodal[d][node] = (*convection[d])(t, c[0], c[1], c[2]);
        if (has_reaction) reaction_nodal[node] = problem->c(t, c[0], c[1], c[2]);
        if (has_forcing) forcing_nodal[node] = problem->forcing(t, c[0], c[1], c[2]);
      }
    }

    std::fill(local.begin(), local.end(), 0.0);
    std::fill(local_rhs.begin(), local_rhs.end(), 0.0);
    for (int p = 0; p < count; ++p) {
      const double* val = &q.value[static_cast<size_t>(p) * count];
      const double* gx = &q.gradient[first_space + 0][static_cast<size_t>(p) * count];
      const double* gy = &q.gradient[first_space + 1][static_cast<size_t>(p) * count];
      const double* gz = &q.gradient[first_space + 2][static_cast<size_t>(p) * count];
      const double* gt = has_time ? &q.gradient[0][static_cast<size_t>(p) * count] : nullptr;
      double kq = 0.0, cq = mass_only ? 1.0 : 0.0, fq = 0.0, bq[3] = {0.0, 0.0, 0.0};
      if (!mass_only) {
        for (int node = 0; node < count; ++node) {
          kq += kappa_nodal[node] * val[node];
          if (has_reaction) cq += reaction_nodal[node] * val[node];
          if (has_forcing) fq += forcing_nodal[node] * val[node];
        }
        if (any_convection)
          for (int d = 0; d < 3; ++d)
            if (*convection[d])
              for (int node = 0; node < count; ++node)
                bq[d] += convection_nodal[d][node] * val[node];
      }
      for (int a = 0; a < count; ++a) {
        const double va = val[a];
        const double gax = mass_only ? 0.0 : gx[a];
        const double gay = mass_only ? 0.0 : gy[a];
        const double gaz = mass_only ? 0.0 : gz[a];
        double* row = &local[static_cast<size_t>(a) * count];
        for (int b = 0; b < count; ++b) {
          double s = cq * val[b] * va;
          if (!mass_only) {
            s += kq * (gax * gx[b] + gay * gy[b] + gaz * gz[b]);
            if (any_convection) s += (bq[0] * gx[b] + bq[1] * gy[b] + bq[2] * gz[b]) * va;
            if (has_time) s += gt[b] * va;
          }
          row[b] += q.weight * s;
        }
        if (has_forcing) local_rhs[a] += q.weight * fq * va;
      }
    }

    for (int a = 0; a < count; ++a) {
      const NodeInfo& test = info[static_cast<size_t>(node_flat[a])];
      if (test.known) continue;
      sys.rhs[static_cast<size_t>(test.index)] += local_rhs[a];
      const double* row = &local[static_cast<size_t>(a) * count];
      for (int b = 0; b < count; ++b) {
        if (row[b] == 0.0) continue;
        const NodeInfo& trial = info[static_cast<size_t>(node_flat[b])];
        if (trial.known) {
          if (!mass_only && trial.value != 0.0)
            sys.rhs[static_cast<size_t>(test.index)] -= row[b] * trial.value;
        } else {
          sys.triplets.push_back({test.index, trial.index, row[b]});
        }
      }
    }
  }
  return sys;
}

}  // namespace

SparseSystem assemble_full_system(const ProblemSpec& problem, const Grid& grid,
                                  const ReferenceOptions& opts) {
  bool time_dependent = problem.kind != ProblemKind::stationary_diffusion;
  if (problem.kind == ProblemKind::semilinear &&
      (problem.b1 || problem.b2 || problem.b3 || problem.c))
    throw std::invalid_argument(
        "semilinear problems fix the convection and reaction fields; leave them unset");
  return assemble_impl(&problem, grid, time_dependent, /*mass_only=*/false, opts);
}

SparseSystem assemble_full_mass(const Grid& grid, bool time_dependent,
                                const ReferenceOptions& opts) {
  return assemble_impl(nullptr, grid, time_dependent, /*mass_only=*/true, opts);
}

std::vector<double> solve_full(const SparseSystem& system, const ReferenceOptions& opts) {
  const int dim = system.dimension;
  if (dim == 0) return {};
  if (static_cast<int>(system.rhs.size()) != dim)
    throw std::invalid_argument("right-hand side length does not match the system dimension");
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(system.triplets.size());
  for (const auto& t : system.triplets) {
    if (t.row < 0 || t.row >= dim || t.col < 0 || t.col >= dim)
      throw std::invalid_argument("triplet index outside the system dimension");
    entries.emplace_back(t.row, t.col, t.value);
  }
  Eigen::SparseMatrix<double> a(dim, dim);
  a.setFromTriplets(entries.begin(), entries.end());
  Eigen::Map<const Eigen::VectorXd> b(system.rhs.data(), dim);
  const double b_norm = b.norm();
  if (b_norm == 0.0) return std::vector<double>(static_cast<size_t>(dim), 0.0);

  Eigen::VectorXd x;
  double residual = std::numeric_limits<double>::infinity();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> direct;
  direct.compute(a);
  if (direct.info() == Eigen::Success) {
    x = direct.solve(b);
    residual = (a * x - b).norm() / b_norm;
  }
  if (!(residual <= opts.residual_tol)) {
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::DiagonalPreconditioner<double>> krylov;
    krylov.setTolerance(opts.residual_tol / 10.0);
    krylov.setMaxIterations(20000);
    krylov.compute(a);
    Eigen::VectorXd y = x.size() == dim ? krylov.solveWithGuess(b, x).eval() : krylov.solve(b).eval();
    double retry = (a * y - b).norm() / b_norm;
    if (retry < residual) {
      x = y;
      residual = retry;
    }
  }
  if (!(residual <= opts.residual_tol)) {
    char msg[96];
    std::snprintf(msg, sizeof msg, "full-grid solve stalled at relative residual %.3e",
                  residual);
    throw std::runtime_error(msg);
  }
  return std::vector<double>(x.data(), x.data() + dim);
}

Matrix system_to_dense(const SparseSystem& system) {
  Matrix a(system.dimension, system.dimension);
  for (const auto& t : system.triplets) {
    if (t.row < 0 || t.row >= system.dimension || t.col < 0 || t.col >= system.dimension)
      throw std::invalid_argument("triplet index outside the system dimension");
    a(t.row, t.col) += t.value;
  }
  return a;
}

}  // namespace stt
