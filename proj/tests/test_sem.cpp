#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <vector>

#include "stt/la.hpp"
#include "stt/sem.hpp"
#include "stt/tt.hpp"

namespace {

const double kPi = 3.14159265358979323846;

const stt::Matrix* weighted_pair(const stt::Local1D& loc, stt::FactorKind kind) {
  switch (kind) {
    case stt::FactorKind::mass: return loc.weighted_mass;
    case stt::FactorKind::stiffness: return loc.weighted_stiffness;
    default: return loc.weighted_derivative;
  }
}

const stt::Matrix& plain_local(const stt::Local1D& loc, stt::FactorKind kind) {
  switch (kind) {
    case stt::FactorKind::mass: return loc.mass;
    case stt::FactorKind::stiffness: return loc.stiffness;
    default: return loc.time_derivative;
  }
}

// Classical element loop with a nodally interpolated coefficient.
stt::Matrix element_loop_weighted(stt::FactorKind kind, const std::vector<double>& nodal,
                                  double h) {
  int elements = static_cast<int>(nodal.size()) - 1;
  stt::Local1D loc = stt::local_matrices(h);
  const stt::Matrix* pair = weighted_pair(loc, kind);
  stt::Matrix g(elements + 1, elements + 1);
  for (int e = 0; e < elements; ++e)
    for (int p = 0; p < 2; ++p)
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) g(e + r, e + c) += nodal[e + p] * pair[p](r, c);
  return g;
}

double rel_frob_gap(const stt::Matrix& got, const stt::Matrix& want) {
  stt::Matrix diff = got - want;
  double scale = stt::frob_norm(want);
  return stt::frob_norm(diff) / (scale > 0 ? scale : 1.0);
}

// Dense multilinear assembly: sum_j coeff(j) * kron_k W_k[j_k].
stt::Matrix dense_operator_oracle(const stt::DenseTensor& coeff,
                                  const std::vector<stt::FactorKind>& kinds,
                                  const stt::Grid& grid) {
  int modes = coeff.order();
  int n = grid.node_count();
  std::vector<std::vector<stt::Matrix>> w(modes);
  for (int k = 0; k < modes; ++k) {
    double h = (modes == 4 && k == 0) ? grid.time_spacing : grid.space_spacing;
    w[k] = stt::node_weight_matrices(kinds[k], grid.elements, h);
  }
  long long side = 1;
  for (int k = 0; k < modes; ++k) side *= n;
  stt::Matrix acc(static_cast<int>(side), static_cast<int>(side));
  std::vector<int> idx(modes, 0);
  for (long long flat = 0; flat < coeff.size(); ++flat) {
    double v = coeff.a[flat];
    if (v != 0.0) {
      stt::Matrix term = w[0][idx[0]];
      for (int k = 1; k < modes; ++k) term = stt::kron(term, w[k][idx[k]]);
      for (size_t i = 0; i < acc.a.size(); ++i) acc.a[i] += v * term.a[i];
    }
    for (int k = modes - 1; k >= 0; --k) {
      if (++idx[k] < n) break;
      idx[k] = 0;
    }
  }
  return acc;
}

stt::DenseTensor evaluate_nodal(const stt::FieldFn& f, const stt::Grid& grid,
                                bool time_dependent) {
  int modes = time_dependent ? 4 : 3;
  int n = grid.node_count();
  stt::DenseTensor x(std::vector<int>(modes, n));
  std::vector<int> idx(modes, 0);
  for (long long flat = 0; flat < x.size(); ++flat) {
    double c[4] = {0, 0, 0, 0};
    for (int k = 0; k < modes; ++k)
      c[4 - modes + k] = (time_dependent && k == 0) ? grid.time_nodes[idx[k]]
                                                    : grid.space_nodes[idx[k]];
    x.a[flat] = f(c[0], c[1], c[2], c[3]);
    for (int k = modes - 1; k >= 0; --k) {
      if (++idx[k] < n) break;
      idx[k] = 0;
    }
  }
  return x;
}

// Flat indices (first mode slowest) of a per-mode kept window.
std::vector<int> window_indices(const std::vector<stt::IndexRange>& keep, int n) {
  std::vector<int> flats{0};
  for (const auto& r : keep) {
    std::vector<int> next;
    next.reserve(flats.size() * (r.end - r.begin));
    for (int base : flats)
      for (int i = r.begin; i < r.end; ++i) next.push_back(base * n + i);
    flats = std::move(next);
  }
  return flats;
}

stt::Matrix submatrix(const stt::Matrix& a, const std::vector<int>& rows,
                      const std::vector<int>& cols) {
  stt::Matrix out(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j) out(static_cast<int>(i), static_cast<int>(j)) = a(rows[i], cols[j]);
  return out;
}

std::vector<stt::IndexRange> unknown_windows(const stt::Grid& grid, bool time_dependent) {
  std::vector<stt::IndexRange> rows(time_dependent ? 4 : 3, grid.interior_space());
  if (time_dependent) rows[0] = grid.interior_time();
  return rows;
}

std::vector<stt::IndexRange> full_windows(const stt::Grid& grid, int modes) {
  return std::vector<stt::IndexRange>(modes, grid.all_nodes());
}

// Dense weak-form matrix (all rows and columns) for a linear problem.
stt::Matrix dense_weak_form(const stt::ProblemSpec& problem, const stt::Grid& grid) {
  bool td = problem.kind != stt::ProblemKind::stationary_diffusion;
  int modes = td ? 4 : 3;
  int n = grid.node_count();
  int first_space = modes - 3;
  auto all_mass = std::vector<stt::FactorKind>(modes, stt::FactorKind::mass);
  stt::DenseTensor ones(std::vector<int>(modes, n));
  for (auto& v : ones.a) v = 1.0;
  stt::DenseTensor kap =
      problem.kappa ? evaluate_nodal(problem.kappa, grid, td) : ones;

  stt::Matrix acc;
  auto add = [&](const stt::Matrix& term) {
    if (acc.empty())
      acc = term;
    else
      for (size_t i = 0; i < acc.a.size(); ++i) acc.a[i] += term.a[i];
  };
  if (td) {
    auto kinds = all_mass;
    kinds[0] = stt::FactorKind::derivative;
    add(dense_operator_oracle(ones, kinds, grid));
  }
  for (int d = 0; d < 3; ++d) {
    auto kinds = all_mass;
    kinds[first_space + d] = stt::FactorKind::stiffness;
    add(dense_operator_oracle(kap, kinds, grid));
  }
  const stt::FieldFn* convection[3] = {&problem.b1, &problem.b2, &problem.b3};
  for (int d = 0; d < 3; ++d) {
    if (!*convection[d]) continue;
    auto kinds = all_mass;
    kinds[first_space + d] = stt::FactorKind::derivative;
    add(dense_operator_oracle(evaluate_nodal(*convection[d], grid, td), kinds, grid));
  }
  if (problem.c) add(dense_operator_oracle(evaluate_nodal(problem.c, grid, td), all_mass, grid));
  return acc;
}

// Node values of the known-data train: initial level at t = 0, Dirichlet data
// on the spatial boundary afterwards, zero at unknowns.
std::vector<double> known_values(const stt::ProblemSpec& problem, const stt::Grid& grid) {
  bool td = problem.kind != stt::ProblemKind::stationary_diffusion;
  int modes = td ? 4 : 3;
  int n = grid.node_count();
  long long total = 1;
  for (int k = 0; k < modes; ++k) total *= n;
  std::vector<double> g(total, 0.0);
  std::vector<int> idx(modes, 0);
  for (long long flat = 0; flat < total; ++flat) {
    double t = td ? grid.time_nodes[idx[0]] : 0.0;
    double x = grid.space_nodes[idx[modes - 3]];
    double y = grid.space_nodes[idx[modes - 2]];
    double z = grid.space_nodes[idx[modes - 1]];
    bool on_boundary = false;
    for (int k = modes - 3; k < modes; ++k)
      on_boundary = on_boundary || idx[k] == 0 || idx[k] == grid.elements;
    if (td && idx[0] == 0) {
      if (problem.initial) g[flat] = problem.initial(0.0, x, y, z);
    } else if (on_boundary && problem.boundary) {
      g[flat] = problem.boundary(t, x, y, z);
    }
    for (int k = modes - 1; k >= 0; --k) {
      if (++idx[k] < n) break;
      idx[k] = 0;
    }
  }
  return g;
}

stt::AssemblyOptions tight_options() {
  stt::AssemblyOptions opts;
  opts.tt_tol = 1e-13;
  opts.coefficient_tol = 1e-14;
  return opts;
}

}  // namespace

TEST_SUITE("partition-of-unity") {
  TEST_CASE("weighted local matrices sum to the plain ones") {
    for (double h : {1.0, 0.25, 3.5}) {
      stt::Local1D loc = stt::local_matrices(h);
      CHECK(stt::max_abs_diff(loc.weighted_mass[0] + loc.weighted_mass[1], loc.mass) <= 1e-15 * h);
      CHECK(stt::max_abs_diff(loc.weighted_stiffness[0] + loc.weighted_stiffness[1],
                              loc.stiffness) <= 1e-15 / h);
      CHECK(stt::max_abs_diff(loc.weighted_derivative[0] + loc.weighted_derivative[1],
                              loc.time_derivative) <= 1e-15);
    }
  }

  TEST_CASE("constant-coefficient weighted assembly reduces to the plain global matrix") {
    for (int n : {1, 2, 3, 6}) {
      double h = 1.0 / n;
      stt::Local1D loc = stt::local_matrices(h);
      stt::Matrix b = stt::assembly_binary(n);
      std::vector<double> ones(n + 1, 1.0);
      for (auto kind :
           {stt::FactorKind::mass, stt::FactorKind::stiffness, stt::FactorKind::derivative}) {
        const stt::Matrix* pair = weighted_pair(loc, kind);
        stt::Matrix sum;
        for (int p = 0; p < 2; ++p) {
          stt::Matrix part = stt::assemble_weighted_global_1d(
              pair[p], stt::coefficient_element_diagonals(ones, p), b);
          sum = p ? sum + part : part;
        }
        stt::Matrix plain = stt::assemble_global_1d(plain_local(loc, kind), n);
        CHECK(stt::max_abs_diff(sum, plain) <= 1e-14 * (1.0 + stt::frob_norm(plain)));
      }
    }
  }

  TEST_CASE("node weight matrices sum to the plain global matrix") {
    for (int n : {1, 2, 5}) {
      double h = 0.7 / n;
      stt::Local1D loc = stt::local_matrices(h);
      for (auto kind :
           {stt::FactorKind::mass, stt::FactorKind::stiffness, stt::FactorKind::derivative}) {
        auto w = stt::node_weight_matrices(kind, n, h);
        stt::Matrix sum(n + 1, n + 1);
        for (const auto& m : w) sum = sum + m;
        stt::Matrix plain = stt::assemble_global_1d(plain_local(loc, kind), n);
        CHECK(stt::max_abs_diff(sum, plain) <= 1e-14 * (1.0 + stt::frob_norm(plain)));
      }
    }
  }

  TEST_CASE("constant trains contract to tensor-product operators") {
    stt::Grid grid(3);
    stt::TTVector one = stt::tt_ones({4, 4, 4});
    stt::TTMatrix op = stt::contract_coefficient_operator(
        one, {stt::FactorKind::mass, stt::FactorKind::stiffness, stt::FactorKind::mass}, grid);
    stt::Local1D loc = stt::local_matrices(grid.space_spacing);
    stt::Matrix m = stt::assemble_global_1d(loc.mass, 3);
    stt::Matrix s = stt::assemble_global_1d(loc.stiffness, 3);
    CHECK(rel_frob_gap(stt::ttmat_to_dense(op), stt::kron(m, stt::kron(s, m))) <= 1e-14);

    stt::Grid fine(2, 1.0, 2.0);
    stt::TTVector one4 = stt::tt_ones({3, 3, 3, 3});
    stt::TTMatrix time_term = stt::contract_coefficient_operator(
        one4,
        {stt::FactorKind::derivative, stt::FactorKind::mass, stt::FactorKind::mass,
         stt::FactorKind::mass},
        fine);
    stt::Local1D time_loc = stt::local_matrices(fine.time_spacing);
    stt::Local1D space_loc = stt::local_matrices(fine.space_spacing);
    stt::Matrix d = stt::assemble_global_1d(time_loc.time_derivative, 2);
    stt::Matrix ms = stt::assemble_global_1d(space_loc.mass, 2);
    stt::Matrix want = stt::kron(d, stt::kron(ms, stt::kron(ms, ms)));
    CHECK(rel_frob_gap(stt::ttmat_to_dense(time_term), want) <= 1e-14);
  }
}

TEST_CASE("local element matrices match exact integration") {
  stt::Local1D unit = stt::local_matrices(1.0);
  CHECK(stt::max_abs_diff(unit.mass, {{1.0 / 3, 1.0 / 6}, {1.0 / 6, 1.0 / 3}}) <= 1e-16);
  CHECK(stt::max_abs_diff(unit.stiffness, {{1.0, -1.0}, {-1.0, 1.0}}) <= 1e-16);
  CHECK(stt::max_abs_diff(unit.time_derivative, {{-0.5, 0.5}, {-0.5, 0.5}}) <= 1e-16);
  CHECK(stt::max_abs_diff(unit.weighted_mass[0], {{0.25, 1.0 / 12}, {1.0 / 12, 1.0 / 12}}) <=
        1e-16);
  CHECK(stt::max_abs_diff(unit.weighted_mass[1], {{1.0 / 12, 1.0 / 12}, {1.0 / 12, 0.25}}) <=
        1e-16);
  CHECK(stt::max_abs_diff(unit.weighted_stiffness[0], {{0.5, -0.5}, {-0.5, 0.5}}) <= 1e-16);
  CHECK(stt::max_abs_diff(unit.weighted_stiffness[1], unit.weighted_stiffness[0]) <= 1e-16);
  CHECK(stt::max_abs_diff(unit.weighted_derivative[0],
                          {{-1.0 / 3, 1.0 / 3}, {-1.0 / 6, 1.0 / 6}}) <= 1e-16);
  CHECK(stt::max_abs_diff(unit.weighted_derivative[1],
                          {{-1.0 / 6, 1.0 / 6}, {-1.0 / 3, 1.0 / 3}}) <= 1e-16);

  double h = 0.25;
  stt::Local1D scaled = stt::local_matrices(h);
  CHECK(stt::max_abs_diff(scaled.mass, h * unit.mass) <= 1e-16);
  CHECK(stt::max_abs_diff(scaled.stiffness, (1.0 / h) * unit.stiffness) <= 1e-12);
  CHECK(stt::max_abs_diff(scaled.time_derivative, unit.time_derivative) <= 1e-16);
  CHECK(stt::max_abs_diff(scaled.weighted_derivative[1], unit.weighted_derivative[1]) <= 1e-16);

  // mass SPD, stiffness symmetric PSD with zero row sums
  CHECK(scaled.mass(0, 1) == scaled.mass(1, 0));
  CHECK(scaled.mass(0, 0) * scaled.mass(1, 1) - scaled.mass(0, 1) * scaled.mass(1, 0) > 0.0);
  CHECK(scaled.stiffness(0, 0) + scaled.stiffness(0, 1) == 0.0);
  CHECK(scaled.stiffness(1, 0) + scaled.stiffness(1, 1) == 0.0);
  CHECK_THROWS_AS(stt::local_matrices(0.0), std::invalid_argument);
  CHECK_THROWS_AS(stt::local_matrices(-1.0), std::invalid_argument);
}

TEST_CASE("assembly binary gathers element node pairs") {
  CHECK(stt::max_abs_diff(stt::assembly_binary(2),
                          {{1, 0, 0, 0}, {0, 1, 1, 0}, {0, 0, 0, 1}}) == 0.0);
  CHECK(stt::max_abs_diff(stt::assembly_binary(1), stt::Matrix::identity(2)) == 0.0);
  for (int n : {1, 2, 5, 8}) {
    stt::Matrix b = stt::assembly_binary(n);
    stt::Matrix bbt = stt::matmul_nt(b, b);
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        double want = i == j ? (i == 0 || i == n ? 1.0 : 2.0) : 0.0;
        CHECK(bbt(i, j) == want);
      }
  }
  CHECK_THROWS_AS(stt::assembly_binary(0), std::invalid_argument);
}

TEST_CASE("global assembly matches the block product and the element loop") {
  stt::Local1D unit = stt::local_matrices(1.0);
  stt::Matrix mass2 = stt::assemble_global_1d(unit.mass, 2);
  CHECK(stt::max_abs_diff(mass2, {{1.0 / 3, 1.0 / 6, 0.0},
                                  {1.0 / 6, 2.0 / 3, 1.0 / 6},
                                  {0.0, 1.0 / 6, 1.0 / 3}}) <= 1e-16);

  stt::Matrix counts = stt::assemble_global_1d(stt::Matrix::identity(2), 5);
  for (int i = 0; i <= 5; ++i)
    for (int j = 0; j <= 5; ++j)
      CHECK(counts(i, j) == (i == j ? (i == 0 || i == 5 ? 1.0 : 2.0) : 0.0));

  for (int n : {1, 3, 16}) {
    double h = 1.0 / n;
    stt::Local1D loc = stt::local_matrices(h);
    for (auto kind :
         {stt::FactorKind::mass, stt::FactorKind::stiffness, stt::FactorKind::derivative}) {
      stt::Matrix global = stt::assemble_global_1d(plain_local(loc, kind), n);
      stt::Matrix loop = element_loop_weighted(kind, std::vector<double>(n + 1, 1.0), h);
      CHECK(stt::max_abs_diff(global, loop) <= 1e-13);
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
          if (std::abs(i - j) > 1) CHECK(global(i, j) == 0.0);
    }
  }
}

TEST_CASE("staggered coefficient blocks follow the shifted node pattern") {
  std::vector<double> vals{2.0, 5.0, -1.0};
  stt::Matrix c0 = stt::coefficient_staggered_diagonals(vals, 0);
  stt::Matrix c1 = stt::coefficient_staggered_diagonals(vals, 1);
  CHECK(c0.rows == 4);
  double want0[4] = {2.0, 5.0, 5.0, -1.0};
  double want1[4] = {5.0, -1.0, -1.0, -1.0};  // shifted window clamps at the last node
  for (int i = 0; i < 4; ++i) {
    CHECK(c0(i, i) == want0[i]);
    CHECK(c1(i, i) == want1[i]);
    for (int j = 0; j < 4; ++j)
      if (i != j) {
        CHECK(c0(i, j) == 0.0);
        CHECK(c1(i, j) == 0.0);
      }
  }
  std::vector<double> constant(6, 3.25);
  for (int p = 0; p < 2; ++p) {
    stt::Matrix c = stt::coefficient_staggered_diagonals(constant, p);
    CHECK(stt::max_abs_diff(c, 3.25 * stt::Matrix::identity(10)) == 0.0);
  }
  CHECK_THROWS_AS(stt::coefficient_staggered_diagonals({1.0}, 0), std::invalid_argument);
  CHECK_THROWS_AS(stt::coefficient_staggered_diagonals(vals, 2), std::invalid_argument);
}

TEST_CASE("element coefficient blocks hold one value per element") {
  std::vector<double> vals{2.0, 5.0, -1.0};
  stt::Matrix c0 = stt::coefficient_element_diagonals(vals, 0);
  stt::Matrix c1 = stt::coefficient_element_diagonals(vals, 1);
  double want0[4] = {2.0, 2.0, 5.0, 5.0};
  double want1[4] = {5.0, 5.0, -1.0, -1.0};
  for (int i = 0; i < 4; ++i) {
    CHECK(c0(i, i) == want0[i]);
    CHECK(c1(i, i) == want1[i]);
  }
  std::vector<double> constant(4, -0.5);
  for (int p = 0; p < 2; ++p)
    CHECK(stt::max_abs_diff(stt::coefficient_element_diagonals(constant, p),
                            -0.5 * stt::Matrix::identity(6)) == 0.0);
  CHECK_THROWS_AS(stt::coefficient_element_diagonals({1.0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(stt::coefficient_element_diagonals(vals, -1), std::invalid_argument);
}

TEST_CASE("weighted assembly with identity blocks reduces to the plain one") {
  int n = 4;
  stt::Matrix b = stt::assembly_binary(n);
  stt::Local1D loc = stt::local_matrices(1.0 / n);
  stt::Matrix eye = stt::Matrix::identity(2 * n);
  for (int p = 0; p < 2; ++p) {
    stt::Matrix reduced = stt::assemble_weighted_global_1d(loc.weighted_mass[p], eye, b);
    CHECK(stt::max_abs_diff(reduced, stt::assemble_global_1d(loc.weighted_mass[p], n)) <= 1e-16);
  }
  CHECK_THROWS_AS(stt::assemble_weighted_global_1d(loc.mass, stt::Matrix::identity(6), b),
                  std::invalid_argument);
}

TEST_CASE("weighted assembly matches the interpolated-coefficient element loop") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unif(0.5, 2.0);
  for (int n : {4, 7}) {
    double h = 1.0 / n;
    stt::Matrix b = stt::assembly_binary(n);
    stt::Local1D loc = stt::local_matrices(h);
    std::vector<double> nodal(n + 1);
    for (auto& v : nodal) v = unif(rng);
    for (auto kind :
         {stt::FactorKind::mass, stt::FactorKind::stiffness, stt::FactorKind::derivative}) {
      const stt::Matrix* pair = weighted_pair(loc, kind);
      stt::Matrix sum;
      for (int p = 0; p < 2; ++p) {
        stt::Matrix part = stt::assemble_weighted_global_1d(
            pair[p], stt::coefficient_element_diagonals(nodal, p), b);
        sum = p ? sum + part : part;
      }
      CHECK(stt::max_abs_diff(sum, element_loop_weighted(kind, nodal, h)) <= 1e-13);
    }
  }
}

TEST_CASE("node weight matrices differentiate the weighted assembly") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> unif(-1.0, 2.0);
  int n = 5;
  double h = 0.3;
  std::vector<double> nodal(n + 1);
  for (auto& v : nodal) v = unif(rng);
  for (auto kind :
       {stt::FactorKind::mass, stt::FactorKind::stiffness, stt::FactorKind::derivative}) {
    auto w = stt::node_weight_matrices(kind, n, h);
    REQUIRE(w.size() == static_cast<size_t>(n + 1));
    stt::Matrix combo(n + 1, n + 1);
    for (int j = 0; j <= n; ++j)
      for (size_t i = 0; i < combo.a.size(); ++i) combo.a[i] += nodal[j] * w[j].a[i];
    CHECK(stt::max_abs_diff(combo, element_loop_weighted(kind, nodal, h)) <= 1e-13);
  }
}

TEST_CASE("coefficient contraction matches the dense multilinear sum") {
  stt::Grid grid(3);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  stt::TTVector coeff;
  coeff.cores.emplace_back(1, 4, 2);
  coeff.cores.emplace_back(2, 4, 2);
  coeff.cores.emplace_back(2, 4, 1);
  for (auto& core : coeff.cores)
    for (auto& v : core.a) v = unif(rng);

  std::vector<stt::FactorKind> kinds{stt::FactorKind::stiffness, stt::FactorKind::mass,
                                     stt::FactorKind::derivative};
  stt::Matrix got = stt::ttmat_to_dense(stt::contract_coefficient_operator(coeff, kinds, grid));

  stt::DenseTensor nodal = stt::tt_to_dense(coeff);
  stt::Matrix want = dense_operator_oracle(nodal, kinds, grid);
  CHECK(rel_frob_gap(got, want) <= 1e-13);

  CHECK_THROWS_AS(stt::contract_coefficient_operator(coeff, {stt::FactorKind::mass}, grid),
                  std::invalid_argument);
  stt::Grid mismatched(5);
  CHECK_THROWS_AS(stt::contract_coefficient_operator(coeff, kinds, mismatched),
                  std::invalid_argument);
}

TEST_CASE("grids store uniform nodes and unknown windows") {
  stt::Grid grid(8, 2.0, 0.5);
  CHECK(grid.node_count() == 9);
  CHECK(grid.space_spacing == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(grid.time_spacing == doctest::Approx(0.0625).epsilon(1e-15));
  for (int i = 0; i < 8; ++i) {
    CHECK(grid.space_nodes[i + 1] - grid.space_nodes[i] ==
          doctest::Approx(grid.space_spacing).epsilon(1e-12));
    CHECK(grid.time_nodes[i + 1] - grid.time_nodes[i] ==
          doctest::Approx(grid.time_spacing).epsilon(1e-12));
  }
  CHECK(grid.interior_time().begin == 1);
  CHECK(grid.interior_time().end == 9);
  CHECK(grid.interior_space().begin == 1);
  CHECK(grid.interior_space().end == 8);
  CHECK_THROWS_AS(stt::Grid(0), std::invalid_argument);
  CHECK_THROWS_AS(stt::Grid(4, -1.0), std::invalid_argument);
}

TEST_CASE("interpolated fields reproduce node values") {
  stt::Grid grid(3);
  stt::AssemblyOptions opts = tight_options();
  stt::FieldFn f = [](double t, double x, double y, double z) {
    return 1.0 + t + 2.0 * x - y * z;
  };
  stt::TTVector dense_path = stt::interpolate_field_tt(f, grid, true, 1e-12, opts);
  stt::AssemblyOptions crossed = opts;
  crossed.force_cross = true;
  stt::TTVector cross_path = stt::interpolate_field_tt(f, grid, true, 1e-10, crossed);
  for (std::vector<int> idx : {std::vector<int>{0, 0, 0, 0}, {3, 1, 2, 0}, {2, 3, 3, 1}}) {
    double want = f(grid.time_nodes[idx[0]], grid.space_nodes[idx[1]], grid.space_nodes[idx[2]],
                    grid.space_nodes[idx[3]]);
    CHECK(dense_path.element(idx) == doctest::Approx(want).epsilon(1e-12));
    CHECK(cross_path.element(idx) == doctest::Approx(want).epsilon(1e-8));
  }

  stt::FieldFn separable = [](double, double x, double y, double z) {
    return std::sin(kPi * x) * std::sin(kPi * y) * std::sin(kPi * z);
  };
  stt::TTVector product = stt::interpolate_field_tt(separable, grid, false, 1e-10, opts);
  CHECK(product.ranks() == std::vector<int>{1, 1});
  CHECK_THROWS_AS(stt::interpolate_field_tt(stt::FieldFn{}, grid, false, 1e-10, opts),
                  std::invalid_argument);
}

TEST_CASE("stationary assembly matches the restricted tensor-product system") {
  stt::Grid grid(4);
  stt::ProblemSpec problem;
  problem.name = "plain-diffusion";
  problem.kind = stt::ProblemKind::stationary_diffusion;
  stt::AssemblyOptions opts = tight_options();
  stt::TTMatrix op = stt::build_operator_tt(problem, grid, opts);

  stt::Local1D loc = stt::local_matrices(grid.space_spacing);
  stt::Matrix m = stt::assemble_global_1d(loc.mass, 4);
  stt::Matrix s = stt::assemble_global_1d(loc.stiffness, 4);
  stt::Matrix full = stt::kron(s, stt::kron(m, m));
  {
    stt::Matrix t2 = stt::kron(m, stt::kron(s, m));
    stt::Matrix t3 = stt::kron(m, stt::kron(m, s));
    for (size_t i = 0; i < full.a.size(); ++i) full.a[i] += t2.a[i] + t3.a[i];
  }
  auto rows = window_indices(unknown_windows(grid, false), grid.node_count());
  auto cols = window_indices(full_windows(grid, 3), grid.node_count());
  CHECK(rel_frob_gap(stt::ttmat_to_dense(op), submatrix(full, rows, cols)) <= 1e-12);

  stt::TTMatrix square = stt::restrict_columns(op, grid);
  CHECK(square.row_sizes() == std::vector<int>{3, 3, 3});
  CHECK(square.col_sizes() == std::vector<int>{3, 3, 3});
  CHECK(rel_frob_gap(stt::ttmat_to_dense(square), submatrix(full, rows, rows)) <= 1e-12);
}

TEST_CASE("space-time assembly matches the dense weak form") {
  stt::Grid grid(2, 1.0, 1.5);
  stt::ProblemSpec problem;
  problem.name = "dense-oracle-cdr";
  problem.kind = stt::ProblemKind::linear_cdr;
  problem.kappa = [](double t, double x, double, double) { return 1.0 + 0.5 * t * x; };
  problem.b1 = [](double, double, double y, double) { return 1.0 + y; };
  problem.b2 = [](double, double, double, double) { return 0.5; };
  problem.b3 = [](double, double x, double, double z) { return x * z; };
  problem.c = [](double t, double, double y, double) { return 0.7 + t * y; };
  stt::AssemblyOptions opts = tight_options();

  stt::TTMatrix op = stt::build_operator_tt(problem, grid, opts);
  CHECK(op.row_sizes() == std::vector<int>{2, 1, 1, 1});
  CHECK(op.col_sizes() == std::vector<int>{3, 3, 3, 3});

  stt::Matrix full = dense_weak_form(problem, grid);
  auto rows = window_indices(unknown_windows(grid, true), grid.node_count());
  auto cols = window_indices(full_windows(grid, 4), grid.node_count());
  CHECK(rel_frob_gap(stt::ttmat_to_dense(op), submatrix(full, rows, cols)) <= 1e-12);

  stt::ProblemSpec bad = problem;
  bad.kind = stt::ProblemKind::semilinear;
  CHECK_THROWS_AS(stt::build_operator_tt(bad, grid, opts), std::invalid_argument);
}

TEST_CASE("rounding once or per term assembles the same operator") {
  stt::Grid grid(3);
  stt::ProblemSpec problem;
  problem.name = "round-knob";
  problem.kind = stt::ProblemKind::linear_cdr;
  problem.kappa = [](double, double x, double y, double z) { return 1.0 + x * y * z; };
  problem.b1 = [](double, double x, double, double) { return x; };
  problem.c = [](double, double, double y, double) { return std::exp(-y); };
  stt::AssemblyOptions opts = tight_options();
  stt::TTMatrix once = stt::build_operator_tt(problem, grid, opts);
  opts.round_each_term = true;
  stt::TTMatrix per_term = stt::build_operator_tt(problem, grid, opts);
  CHECK(rel_frob_gap(stt::ttmat_to_dense(per_term), stt::ttmat_to_dense(once)) <= 1e-11);
}

TEST_CASE("diffusion operator ranks reproduce the coefficient rank table") {
  struct Row {
    stt::FieldFn kappa;
    double tol;
    std::vector<int> coefficient_ranks;
    std::vector<int> operator_ranks;
    std::vector<int> grids;
  };
  std::vector<Row> rows;
  rows.push_back({stt::FieldFn{}, 1e-6, {1, 1}, {2, 2}, {17, 33, 65}});
  rows.push_back({[](double, double x, double y, double z) { return 1.0 + x * y * z; },
                  1e-6,
                  {2, 2},
                  {4, 4},
                  {17, 33}});
  rows.push_back({[](double, double x, double y, double z) {
                    return 1.0 + std::cos(kPi * (x + y)) * std::cos(kPi * z);
                  },
                  1e-6,
                  {3, 2},
                  {6, 4},
                  {17, 33, 65}});
  rows.push_back({[](double, double x, double y, double z) { return 1.0 / (1.0 + x + y + z); },
                  1e-6,
                  {5, 5},
                  {8, 8},
                  {17, 33}});
  rows.push_back({[](double, double x, double y, double z) { return 1.0 / (1.0 + x + y + z); },
                  1e-12,
                  {9, 9},
                  {15, 15},
                  {17}});

  for (const auto& row : rows) {
    for (int n : row.grids) {
      stt::Grid grid(n);
      stt::AssemblyOptions opts;
      opts.tt_tol = row.tol;
      opts.coefficient_tol = row.tol;
      opts.force_cross = true;
      if (row.kappa) {
        stt::TTVector coeff = stt::interpolate_field_tt(row.kappa, grid, false, row.tol, opts);
        CHECK(coeff.ranks() == row.coefficient_ranks);
      }
      stt::ProblemSpec problem;
      problem.name = "rank-table";
      problem.kind = stt::ProblemKind::stationary_diffusion;
      problem.kappa = row.kappa;
      stt::TTMatrix square =
          stt::restrict_columns(stt::build_operator_tt(problem, grid, opts), grid);
      CHECK(square.ranks() == row.operator_ranks);
      for (size_t k = 0; k < row.operator_ranks.size(); ++k)
        CHECK(row.operator_ranks[k] <= 2 * row.coefficient_ranks[k]);
    }
  }
}

TEST_CASE("forcing loads match the dense mass application") {
  stt::Grid grid(4);
  stt::AssemblyOptions opts = tight_options();
  stt::ProblemSpec problem;
  problem.name = "unit-load";
  problem.kind = stt::ProblemKind::stationary_diffusion;
  problem.forcing = [](double, double, double, double) { return 1.0; };

  stt::TTVector load = stt::build_load_tt(problem, grid, opts);
  stt::DenseTensor got = stt::tt_to_dense(load);

  stt::DenseTensor ones(std::vector<int>(3, grid.node_count()));
  for (auto& v : ones.a) v = 1.0;
  stt::Matrix mass = dense_operator_oracle(
      ones, std::vector<stt::FactorKind>(3, stt::FactorKind::mass), grid);
  auto rows = window_indices(unknown_windows(grid, false), grid.node_count());
  double worst = 0.0;
  for (size_t i = 0; i < rows.size(); ++i) {
    double want = 0.0;
    for (int j = 0; j < mass.cols; ++j) want += mass(rows[i], j);
    worst = std::max(worst, std::abs(got.a[i] - want));
  }
  CHECK(worst <= 1e-13);

  stt::ProblemSpec quiet = problem;
  quiet.forcing = nullptr;
  stt::TTVector zero = stt::build_load_tt(quiet, grid, opts);
  CHECK(zero.mode_sizes() == std::vector<int>{3, 3, 3});
  CHECK(stt::tt_norm(zero) == 0.0);

  stt::ProblemSpec waves = problem;
  waves.forcing = [](double, double x, double y, double z) {
    return std::sin(kPi * x) * std::sin(kPi * y) * std::sin(kPi * z);
  };
  CHECK(stt::build_load_tt(waves, grid, opts).ranks() == std::vector<int>{1, 1});
}

TEST_CASE("boundary transfer reproduces dense known-value elimination") {
  stt::AssemblyOptions opts = tight_options();

  SUBCASE("stationary") {
    stt::Grid grid(4);
    stt::ProblemSpec problem;
    problem.name = "dirichlet-lift";
    problem.kind = stt::ProblemKind::stationary_diffusion;
    problem.boundary = [](double, double x, double y, double z) { return 1.0 + x + y * y - z; };

    stt::TTMatrix op = stt::build_operator_tt(problem, grid, opts);
    stt::TTVector term = stt::build_boundary_term_tt(problem, grid, opts, &op);

    stt::Matrix full = dense_weak_form(problem, grid);
    auto rows = window_indices(unknown_windows(grid, false), grid.node_count());
    std::vector<double> g = known_values(problem, grid);
    stt::DenseTensor got = stt::tt_to_dense(term);
    double worst = 0.0;
    for (size_t i = 0; i < rows.size(); ++i) {
      double want = 0.0;
      for (int j = 0; j < full.cols; ++j) want += full(rows[i], j) * g[j];
      worst = std::max(worst, std::abs(got.a[i] - want));
    }
    CHECK(worst <= 1e-12);
  }

  SUBCASE("space-time") {
    stt::Grid grid(2);
    stt::ProblemSpec problem;
    problem.name = "known-values";
    problem.kind = stt::ProblemKind::linear_cdr;
    problem.kappa = [](double, double x, double, double) { return 1.0 + x; };
    problem.boundary = [](double t, double x, double y, double z) {
      return std::exp(-t) * (1.0 + x * y + z);
    };
    problem.initial = [](double, double x, double y, double z) { return 1.0 + x * y + z; };

    stt::TTMatrix op = stt::build_operator_tt(problem, grid, opts);
    stt::TTVector term = stt::build_boundary_term_tt(problem, grid, opts, &op);

    stt::Matrix full = dense_weak_form(problem, grid);
    auto rows = window_indices(unknown_windows(grid, true), grid.node_count());
    std::vector<double> g = known_values(problem, grid);
    stt::DenseTensor got = stt::tt_to_dense(term);
    double worst = 0.0;
    for (size_t i = 0; i < rows.size(); ++i) {
      double want = 0.0;
      for (int j = 0; j < full.cols; ++j) want += full(rows[i], j) * g[j];
      worst = std::max(worst, std::abs(got.a[i] - want));
    }
    CHECK(worst <= 1e-12);
  }

  SUBCASE("homogeneous data gives the zero train") {
    stt::Grid grid(3);
    stt::ProblemSpec problem;
    problem.name = "quiet";
    problem.kind = stt::ProblemKind::linear_cdr;
    stt::TTVector term = stt::build_boundary_term_tt(problem, grid, opts);
    CHECK(term.mode_sizes() == std::vector<int>{3, 2, 2, 2});
    CHECK(stt::tt_norm(term) == 0.0);
  }
}

TEST_CASE("linear solutions pass through the discrete system exactly") {
  // u(t,x,y,z) = x solves the homogeneous problem with matching data, and the
  // hat-function space contains it, so the reduced system must reproduce it.
  stt::AssemblyOptions opts = tight_options();
  stt::Grid grid(3);
  stt::ProblemSpec problem;
  problem.name = "linear-exactness";
  problem.kind = stt::ProblemKind::linear_cdr;
  problem.boundary = [](double, double x, double, double) { return x; };
  problem.initial = [](double, double x, double, double) { return x; };

  stt::TTMatrix op = stt::build_operator_tt(problem, grid, opts);
  stt::TTVector rhs = stt::tt_scale(-1.0, stt::build_boundary_term_tt(problem, grid, opts, &op));
  stt::Matrix a = stt::ttmat_to_dense(stt::restrict_columns(op, grid));
  stt::DenseTensor b = stt::tt_to_dense(rhs);
  std::vector<double> u = stt::solve_dense(a, b.a);

  auto windows = unknown_windows(grid, true);
  int modes = 4;
  std::vector<int> idx{windows[0].begin, windows[1].begin, windows[2].begin, windows[3].begin};
  for (double value : u) {
    CHECK(value == doctest::Approx(grid.space_nodes[idx[1]]).epsilon(1e-10));
    for (int k = modes - 1; k >= 0; --k) {
      if (++idx[k] < windows[k].end) break;
      idx[k] = windows[k].begin;
    }
  }
}

TEST_CASE("mass operator restricts the tensor-product mass") {
  stt::Grid grid(2, 1.0, 2.0);
  stt::AssemblyOptions opts = tight_options();
  stt::TTMatrix mass = stt::build_mass_tt(grid, true, opts);
  CHECK(mass.row_sizes() == std::vector<int>{2, 1, 1, 1});
  CHECK(mass.col_sizes() == std::vector<int>{2, 1, 1, 1});

  stt::Local1D time_loc = stt::local_matrices(grid.time_spacing);
  stt::Local1D space_loc = stt::local_matrices(grid.space_spacing);
  stt::Matrix mt = stt::assemble_global_1d(time_loc.mass, 2);
  stt::Matrix ms = stt::assemble_global_1d(space_loc.mass, 2);
  stt::Matrix full = stt::kron(mt, stt::kron(ms, stt::kron(ms, ms)));
  auto rows = window_indices(unknown_windows(grid, true), grid.node_count());
  CHECK(rel_frob_gap(stt::ttmat_to_dense(mass), submatrix(full, rows, rows)) <= 1e-13);
}

TEST_CASE("assembled operators cache to disk and reload") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "stt-sem-cache-test";
  fs::remove_all(dir);

  stt::Grid grid(3);
  stt::ProblemSpec problem;
  problem.name = "cache-roundtrip";
  problem.kind = stt::ProblemKind::stationary_diffusion;
  problem.kappa = [](double, double x, double y, double) { return 1.0 + x + y; };
  stt::AssemblyOptions opts = tight_options();
  opts.cache_dir = dir.string();

  stt::TTMatrix first = stt::build_operator_tt(problem, grid, opts);
  bool wrote = false;
  for (const auto& entry : fs::directory_iterator(dir)) wrote = wrote || entry.is_regular_file();
  CHECK(wrote);
  stt::TTMatrix second = stt::build_operator_tt(problem, grid, opts);
  CHECK(rel_frob_gap(stt::ttmat_to_dense(second), stt::ttmat_to_dense(first)) == 0.0);
  fs::remove_all(dir);
}
