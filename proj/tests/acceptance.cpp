// Acceptance gate: seven end-to-end checks, one per command-line argument.
// Each prints a single PASS/FAIL line with its measured numbers; tolerances
// are pinned here, in code.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "stt/cli.hpp"
#include "stt/driver.hpp"
#include "stt/qtt.hpp"
#include "stt/reference.hpp"
#include "stt/sem.hpp"
#include "stt/tt.hpp"
#include "stt/tt_solver.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string ranks_text(const std::vector<int>& ranks) {
  std::string out = "[";
  for (size_t i = 0; i < ranks.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ranks[i]);
  }
  return out + "]";
}

// --- 1: the diffusion-operator rank table ---------------------------------

int check_rank_table() {
  const auto start = Clock::now();
  struct Expected {
    const char* label;
    double tol;
    std::vector<int> coefficient_ranks;
    std::vector<int> operator_ranks;
  };
  const std::vector<Expected> table = {
      {"1", 1e-12, {1, 1}, {2, 2}},
      {"1 + xyz", 1e-12, {2, 2}, {4, 4}},
      {"1 + cos(pi(x+y))cos(pi z)", 1e-12, {3, 2}, {6, 4}},
      {"1/(1 + x+y+z)", 1e-6, {5, 5}, {8, 8}},
      {"1/(1 + x+y+z)", 1e-12, {9, 9}, {15, 15}},
  };
  const std::vector<int> grids{17, 33};
  stt::AssemblyOptions base;
  std::vector<stt::RankStudyRow> rows =
      stt::rank_study(stt::rank_study_catalog(), grids, base);

  bool ok = rows.size() == table.size();
  std::string detail;
  for (size_t i = 0; ok && i < rows.size(); ++i) {
    if (rows[i].coefficient_ranks != table[i].coefficient_ranks) ok = false;
    for (const auto& ranks : rows[i].operator_ranks)
      if (ranks != table[i].operator_ranks) ok = false;
    if (!ok)
      detail = std::string(" first mismatch at '") + table[i].label + "' got " +
               ranks_text(rows[i].coefficient_ranks) + " -> " +
               ranks_text(rows[i].operator_ranks.front());
  }
  double secs = seconds_since(start);
  ok = ok && secs <= 120.0;
  std::printf("%s criterion 1: rank table at N in {17,33} reproduced exactly%s (%.1fs)\n",
              ok ? "PASS" : "FAIL", detail.c_str(), secs);
  return ok ? 0 : 1;
}

// --- 2: stationary diffusion convergence, full vs train -------------------

int check_poisson() {
  const auto start = Clock::now();
  stt::ProblemSpec problem = stt::catalog_problem("poisson");
  stt::RunOptions opts;
  opts.tt_tol = 1e-10;
  opts.solver_tol = 1e-8;
  const std::vector<int> grids{8, 16, 32};

  opts.format = stt::SolveFormat::full;
  stt::ConvergenceStudy full = stt::convergence_study(problem, grids, opts);
  opts.format = stt::SolveFormat::tt;
  stt::ConvergenceStudy tt = stt::convergence_study(problem, grids, opts);

  bool order_ok = std::abs(full.fitted_order - 2.0) <= 0.2 &&
                  std::abs(tt.fitted_order - 2.0) <= 0.2;
  double worst_gap = 0.0;
  for (size_t i = 0; i < grids.size(); ++i) {
    if (full.rows[i].elements > 16) continue;
    double gap = std::abs(tt.rows[i].l2_error - full.rows[i].l2_error) /
                 full.rows[i].l2_error;
    worst_gap = std::max(worst_gap, gap);
  }
  bool gap_ok = worst_gap <= 5.0 * opts.solver_tol;
  double secs = seconds_since(start);
  bool ok = order_ok && gap_ok && secs <= 300.0;
  std::printf("%s criterion 2: orders full=%.3f tt=%.3f (want 2.0+-0.2), "
              "format gap %.2e <= %.0e (%.1fs)\n",
              ok ? "PASS" : "FAIL", full.fitted_order, tt.fitted_order, worst_gap,
              5.0 * opts.solver_tol, secs);
  return ok ? 0 : 1;
}

// --- 3: space-time convection-diffusion-reaction convergence --------------

int check_cdr() {
  const auto start = Clock::now();
  stt::ProblemSpec problem = stt::catalog_problem("cdr");
  stt::RunOptions opts;
  opts.format = stt::SolveFormat::tt;
  opts.tt_tol = 1e-10;
  opts.solver_tol = 1e-7;
  stt::ConvergenceStudy study = stt::convergence_study(problem, {8, 16, 32}, opts);
  double secs = seconds_since(start);
  bool converged = true;
  for (const auto& row : study.rows) converged = converged && row.converged;
  bool ok = converged && std::abs(study.fitted_order - 2.0) <= 0.25 && secs <= 900.0;
  std::printf("%s criterion 3: space-time order %.3f (want 2.0+-0.25) over {8,16,32} (%.1fs)\n",
              ok ? "PASS" : "FAIL", study.fitted_order, secs);
  return ok ? 0 : 1;
}

// --- 4: cubic-reaction outer iteration and Jacobian consistency -----------

int check_semilinear() {
  const auto start = Clock::now();
  stt::ProblemSpec problem = stt::catalog_problem("semilinear");
  stt::RunOptions opts;
  opts.format = stt::SolveFormat::tt;
  opts.tt_tol = 1e-10;
  opts.solver_tol = 1e-7;
  stt::ConvergenceStudy study = stt::convergence_study(problem, {8, 16, 32}, opts);
  int worst_newton = 0;
  for (const auto& row : study.rows)
    if (row.elements <= 16) worst_newton = std::max(worst_newton, row.newton_iterations);
  bool newton_ok = worst_newton <= 10;
  bool order_ok = std::abs(study.fitted_order - 2.0) <= 0.25;

  // directional-derivative check of the train-format Jacobian at N = 4:
  // (L(u+eps v) - L(u-eps v)) / (2 eps) must match J(u) v.
  stt::Grid grid(4);
  stt::AssemblyOptions aopts;
  aopts.tt_tol = 1e-12;
  stt::TTMatrix map = stt::build_operator_tt(problem, grid, aopts);
  stt::TTMatrix a = stt::restrict_columns(map, grid);
  stt::TTMatrix m = stt::build_mass_tt(grid, true, aopts);
  stt::TTVector f = stt::build_load_tt(problem, grid, aopts);
  stt::SemilinearSystem sys{a, m, f};

  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  auto random_train = [&]() {
    // sum of two random separable trains: a generic rank-2 point/direction
    stt::TTVector t1 = stt::tt_ones(a.col_sizes());
    stt::TTVector t2 = stt::tt_ones(a.col_sizes());
    for (auto* t : {&t1, &t2})
      for (auto& core : t->cores)
        for (auto& v : core.a) v = gauss(rng);
    stt::TTVector t = stt::tt_axpy(1.0, t1, t2);
    return stt::tt_scale(1.0 / stt::tt_norm(t), t);
  };
  stt::TTVector u = random_train();
  stt::TTVector v = random_train();
  const double eps = 1e-6;
  stt::TTVector up = stt::tt_axpy(eps, v, u);
  stt::TTVector um = stt::tt_axpy(-eps, v, u);
  stt::TTVector lp = stt::semilinear_loss(sys, up, 1e-13);
  stt::TTVector lm = stt::semilinear_loss(sys, um, 1e-13);
  stt::TTVector fd = stt::tt_scale(1.0 / (2.0 * eps), stt::tt_axpy(-1.0, lm, lp));
  stt::TTVector jv = stt::ttmat_apply(stt::semilinear_jacobian(sys, u, 1e-13), v);
  double gap = stt::tt_norm(stt::tt_axpy(-1.0, jv, fd)) / stt::tt_norm(jv);
  bool jac_ok = gap <= 1e-5;

  double secs = seconds_since(start);
  bool ok = newton_ok && order_ok && jac_ok && secs <= 900.0;
  std::printf("%s criterion 4: newton<=%d (want <=10), order %.3f (want 2.0+-0.25), "
              "jacobian gap %.2e <= 1e-5 (%.1fs)\n",
              ok ? "PASS" : "FAIL", worst_newton, study.fitted_order, gap, secs);
  return ok ? 0 : 1;
}

// --- 5: train-built operators equal the element-loop reference ------------

int check_oracle_equivalence() {
  const auto start = Clock::now();
  bool ok = true;
  double worst_op = 0.0, worst_rhs = 0.0;
  std::string detail;

  struct Case {
    const char* name;
    std::vector<int> grids;
  };
  const std::vector<Case> cases = {{"poisson", {4, 6, 8}},
                                   {"cdr", {2, 4, 8}},
                                   {"semilinear", {2, 4}},
                                   {"trivial", {3, 5}}};
  for (const Case& c : cases) {
    stt::ProblemSpec problem = stt::catalog_problem(c.name);
    for (int n : c.grids) {
      stt::Grid grid(n);
      stt::AssemblyOptions aopts;
      aopts.tt_tol = 1e-13;
      aopts.coefficient_tol = 1e-14;
      stt::TTMatrix map = stt::build_operator_tt(problem, grid, aopts);
      stt::TTMatrix a = stt::restrict_columns(map, grid);
      stt::TTVector rhs = stt::build_load_tt(problem, grid, aopts);
      stt::TTVector lift = stt::build_boundary_term_tt(problem, grid, aopts, &map);

      stt::SparseSystem sys = stt::assemble_full_system(problem, grid);
      const int dim = sys.dimension;
      std::vector<double> dense(size_t(dim) * dim, 0.0);
      for (const auto& t : sys.triplets) dense[size_t(t.row) * dim + t.col] += t.value;

      stt::DenseTensor da = stt::tt_to_dense_matrix(a);
      double num = 0.0, den = 0.0;
      for (size_t i = 0; i < dense.size(); ++i) {
        double d = da.data[i] - dense[i];
        num += d * d;
        den += dense[i] * dense[i];
      }
      double op_gap = std::sqrt(num / den);
      worst_op = std::max(worst_op, op_gap);

      stt::DenseTensor dload = stt::tt_to_dense(rhs);
      stt::DenseTensor dlift = stt::tt_to_dense(lift);
      double rnum = 0.0, rden = 0.0;
      for (int i = 0; i < dim; ++i) {
        double want = sys.rhs[size_t(i)];
        double got = dload.data[size_t(i)] - dlift.data[size_t(i)];
        rnum += (got - want) * (got - want);
        rden += want * want;
      }
      double rhs_gap = rden > 0.0 ? std::sqrt(rnum / rden) : std::sqrt(rnum);
      worst_rhs = std::max(worst_rhs, rhs_gap);
      if ((op_gap > 1e-12 || rhs_gap > 1e-12) && detail.empty())
        detail = std::string(" first failure: ") + c.name + " N=" + std::to_string(n);
    }
  }
  ok = worst_op <= 1e-12 && worst_rhs <= 1e-12;
  double secs = seconds_since(start);
  ok = ok && secs <= 600.0;
  std::printf("%s criterion 5: operator gap %.2e, boundary-transfer rhs gap %.2e "
              "(want <=1e-12)%s (%.1fs)\n",
              ok ? "PASS" : "FAIL", worst_op, worst_rhs, detail.c_str(), secs);
  return ok ? 0 : 1;
}

// --- 6: digit-split compression advantage grows with the grid -------------

int check_qtt_compression() {
  const auto start = Clock::now();
  stt::ProblemSpec problem = stt::catalog_problem("poisson");
  std::vector<double> tt_comp, qtt_comp, ratio;
  std::string table;
  for (int n : {16, 32, 64, 128}) {
    stt::Grid grid(n);
    stt::AssemblyOptions aopts;
    aopts.tt_tol = 1e-10;
    stt::TTMatrix a = stt::restrict_columns(stt::build_operator_tt(problem, grid, aopts), grid);
    double dense = 1.0;
    for (const auto& core : a.cores) dense *= double(core.m) * double(core.n);
    double tt = dense / a.parameter_count();
    stt::TTMatrix q = stt::quantize(stt::embed_pow2(a, true), aopts.tt_tol);
    double qtt = dense / q.parameter_count();
    tt_comp.push_back(tt);
    qtt_comp.push_back(qtt);
    ratio.push_back(qtt / tt);
    char buf[96];
    std::snprintf(buf, sizeof buf, " N=%d tt=%.3g qtt=%.3g", n, tt, qtt);
    table += buf;
  }
  bool monotone = true;
  for (size_t i = 1; i < ratio.size(); ++i) monotone = monotone && ratio[i] > ratio[i - 1];
  bool exceeds = qtt_comp[2] > tt_comp[2] && qtt_comp[3] > tt_comp[3];  // N = 64, 128
  double secs = seconds_since(start);
  bool ok = monotone && exceeds && secs <= 600.0;
  std::printf("%s criterion 6: digit-split advantage monotone (ratios %.3g %.3g %.3g %.3g), "
              "qtt > tt from N=64;%s (%.1fs)\n",
              ok ? "PASS" : "FAIL", ratio[0], ratio[1], ratio[2], ratio[3], table.c_str(),
              secs);
  return ok ? 0 : 1;
}

// --- 7: the five property suites, each under a minute ---------------------

int check_property_suites(const char* self) {
  const char* suites[] = {"tt-roundtrip", "kron-law", "maxvol-dominance",
                          "partition-of-unity", "cross-exactness"};
  std::string dir(self);
  size_t cut = dir.find_last_of('/');
  dir = cut == std::string::npos ? std::string(".") : dir.substr(0, cut);
  bool ok = true;
  std::string detail;
  for (const char* suite : suites) {
    const auto start = Clock::now();
    std::string cmd = dir + "/stt_tests -ts=" + suite + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    double secs = seconds_since(start);
    char buf[96];
    std::snprintf(buf, sizeof buf, " %s=%s(%.1fs)", suite,
                  status == 0 && secs <= 60.0 ? "ok" : "FAIL", secs);
    detail += buf;
    ok = ok && status == 0 && secs <= 60.0;
  }
  std::printf("%s criterion 7: property suites%s\n", ok ? "PASS" : "FAIL", detail.c_str());
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: stt_acceptance <criterion 1..7>\n");
    return 2;
  }
  switch (std::atoi(argv[1])) {
    case 1: return check_rank_table();
    case 2: return check_poisson();
    case 3: return check_cdr();
    case 4: return check_semilinear();
    case 5: return check_oracle_equivalence();
    case 6: return check_qtt_compression();
    case 7: return check_property_suites(argv[0]);
    default:
      std::fprintf(stderr, "usage: stt_acceptance <criterion 1..7>\n");
      return 2;
  }
}
