#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stt/matrix.hpp"
#include "stt/problem.hpp"
#include "stt/tt.hpp"

namespace stt {

// Uniform tensor-product grid with N elements per dimension. Every spatial
// axis shares the same node list; time has its own extent. Unknowns exclude
// the initial time level (the final one is kept) and the spatial boundary.
struct Grid {
  int elements = 0;
  double length = 1.0;
  double final_time = 1.0;
  double space_spacing = 0.0;
  double time_spacing = 0.0;
  std::vector<double> space_nodes;  // N + 1 nodes
  std::vector<double> time_nodes;   // N + 1 nodes

  Grid() = default;
  explicit Grid(int elements_in, double length_in = 1.0, double final_time_in = 1.0);

  int node_count() const { return elements + 1; }
  IndexRange all_nodes() const { return {0, elements + 1}; }
  IndexRange interior_time() const { return {1, elements + 1}; }  // size N
  IndexRange interior_space() const { return {1, elements}; }     // size N - 1
};

// Local 2x2 element matrices for hat functions on an interval of width h.
// Index 0 is the basis function equal to 1 at the left node. weighted_*[p]
// carries an extra phi_p factor inside the integral; the two weighted
// variants of each kind sum to the plain matrix (partition of unity).
struct Local1D {
  Matrix mass;             // h * [[1/3, 1/6], [1/6, 1/3]]
  Matrix stiffness;        // (1/h) * [[1, -1], [-1, 1]]
  Matrix time_derivative;  // [[-1/2, 1/2], [-1/2, 1/2]], h-independent
  Matrix weighted_mass[2];
  Matrix weighted_stiffness[2];
  Matrix weighted_derivative[2];
};
Local1D local_matrices(double h);

// (N+1) x 2N binary gather matrix taking stacked per-element node pairs to
// global nodes: row 0 hits column 0, interior row k hits columns 2k-1 and
// 2k, the last row hits column 2N-1.
Matrix assembly_binary(int elements);

// B * blockdiag(local repeated N times) * B^T; tridiagonal.
Matrix assemble_global_1d(const Matrix& local, int elements);

// 2N x 2N diagonal coefficient blocks from nodal samples (length N+1).
// The staggered variant follows the source formulation literally: block e
// holds the values at both ends of element e+p, clamping the node index at
// N for the shifted half. The element variant holds the single value at
// node e+p in both slots; it is what the assembly uses, because the
// weighted local matrices already carry the hat-function weight.
Matrix coefficient_staggered_diagonals(const std::vector<double>& nodal_values, int p);
Matrix coefficient_element_diagonals(const std::vector<double>& nodal_values, int p);

// B * blockdiag(localp repeated N times) * C_p * B^T.
Matrix assemble_weighted_global_1d(const Matrix& localp, const Matrix& c_p, const Matrix& b);

enum class FactorKind { mass, stiffness, derivative };

// Sensitivity of the coefficient-weighted global matrix to each nodal value:
// W[j] = sum_p B * blockdiag(local_p) * C_p(e_j) * B^T. Contracting nodal
// samples v against W gives sum_j v_j W[j] = the weighted global matrix.
std::vector<Matrix> node_weight_matrices(FactorKind kind, int elements, double h);

struct AssemblyOptions {
  double tt_tol = 1e-10;        // rounding tolerance for assembled trains
  double coefficient_tol = 0.0; // coefficient/forcing interpolation tolerance; 0 uses tt_tol
  int rmax = 500;
  bool round_each_term = false; // round after each summand instead of once at the end
  // Nodal tensors up to this many entries are enumerated exactly; larger ones
  // are cross-interpolated. force_cross overrides the cap.
  long long dense_interpolation_cap = 400000;
  bool force_cross = false;
  std::string cache_dir;  // cache assembled operators on disk when set
  std::uint64_t seed = 1; // cross-interpolation seed
};

// Interpolate a scalar field at the grid nodes as a train. Mode order is
// [x, y, z] for stationary fields and [t, x, y, z] otherwise.
TTVector interpolate_field_tt(const FieldFn& f, const Grid& grid, bool time_dependent,
                              double tol, const AssemblyOptions& opts);

// Contract a nodal coefficient train with one factor kind per mode into the
// all-node operator train. kinds.size() must equal coeff.order(); 4 modes
// place time first, 3 modes are space only.
TTMatrix contract_coefficient_operator(const TTVector& coeff, const std::vector<FactorKind>& kinds,
                                       const Grid& grid);

// Weak-form operator with test rows restricted to unknowns and all node
// columns kept, so the same train serves as the known-value map. Columns of
// the square system matrix come from restrict_columns.
TTMatrix build_operator_tt(const ProblemSpec& problem, const Grid& grid,
                           const AssemblyOptions& opts);
TTMatrix restrict_columns(const TTMatrix& op, const Grid& grid);

// Coefficient-free mass operator restricted to unknown rows and columns.
TTMatrix build_mass_tt(const Grid& grid, bool time_dependent, const AssemblyOptions& opts);

// Mass term on unknown rows applied to the interpolated forcing.
TTVector build_load_tt(const ProblemSpec& problem, const Grid& grid, const AssemblyOptions& opts);

// Known-value transfer: the operator columns at boundary and initial nodes
// applied to the node train holding g on the spatial boundary for t > 0,
// u0 at t = 0, and zero at unknowns. Subtract the result from the load.
// Passing the already-built operator avoids an internal rebuild.
TTVector build_boundary_term_tt(const ProblemSpec& problem, const Grid& grid,
                                const AssemblyOptions& opts,
                                const TTMatrix* operator_map = nullptr);

}  // namespace stt
