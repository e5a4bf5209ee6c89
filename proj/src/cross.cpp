#include "stt/cross.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>

#include "stt/la.hpp"

namespace stt {

GridFunction grid_function_from_axes(std::vector<std::vector<double>> axes,
                                     std::function<double(const std::vector<double>&)> f) {
  GridFunction g;
  g.shape.reserve(axes.size());
  for (const auto& ax : axes) {
    if (ax.empty()) throw std::invalid_argument("grid axis has no nodes");
    g.shape.push_back(static_cast<int>(ax.size()));
  }
  g.evaluator = [axes = std::move(axes), f = std::move(f)](const std::vector<int>& idx) {
    std::vector<double> coords(axes.size());
    for (size_t k = 0; k < axes.size(); ++k) coords[k] = axes[k][idx[k]];
    return f(coords);
  };
  return g;
}

namespace {

// partial multi-index over a contiguous run of modes
using Partial = std::vector<int>;

double eval_full(const GridFunction& f, const Partial& left, int mid, const Partial& right,
                 std::vector<int>& scratch) {
  scratch.clear();
  scratch.insert(scratch.end(), left.begin(), left.end());
  scratch.push_back(mid);
  scratch.insert(scratch.end(), right.begin(), right.end());
  return f.evaluator(scratch);
}

// Sample the fiber matrix at mode k: rows run over (left set) x (mode index)
// with the left set slowest, columns over the right set.
Matrix sample_block(const GridFunction& f, const std::vector<Partial>& left, int k,
                    const std::vector<Partial>& right) {
  int n = f.shape[k];
  Matrix a(static_cast<int>(left.size()) * n, static_cast<int>(right.size()));
  std::vector<int> scratch;
  for (size_t li = 0; li < left.size(); ++li)
    for (int j = 0; j < n; ++j)
      for (size_t rj = 0; rj < right.size(); ++rj)
        a(static_cast<int>(li) * n + j, static_cast<int>(rj)) =
            eval_full(f, left[li], j, right[rj], scratch);
  return a;
}

Matrix select_rows(const Matrix& a, const std::vector<int>& rows) {
  Matrix s(static_cast<int>(rows.size()), a.cols);
  for (size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < a.cols; ++j) s(static_cast<int>(i), j) = a(rows[i], j);
  return s;
}

// Stabilized interpolation core: q * inv(q[sel]), computed row by row via
// the transposed LU solve.
Matrix interpolation_factor(const Matrix& q, const std::vector<int>& sel) {
  LuFactors lu = lu_factor(select_rows(q, sel));
  Matrix core(q.rows, q.cols);
  std::vector<double> row(q.cols);
  for (int i = 0; i < q.rows; ++i) {
    for (int j = 0; j < q.cols; ++j) row[j] = q(i, j);
    std::vector<double> x = lu_solve_transposed(lu, row);
    for (int j = 0; j < q.cols; ++j) core(i, j) = x[j];
  }
  return core;
}

Partial random_partial(const std::vector<int>& shape, int from, std::mt19937_64& rng) {
  Partial p;
  p.reserve(shape.size() - from);
  for (size_t m = from; m < shape.size(); ++m) {
    std::uniform_int_distribution<int> pick(0, shape[m] - 1);
    p.push_back(pick(rng));
  }
  return p;
}

long long capped_product(const std::vector<int>& shape, int begin, int end, long long cap) {
  long long p = 1;
  for (int m = begin; m < end; ++m) {
    p *= shape[m];
    if (p >= cap) return cap;
  }
  return p;
}

}  // namespace

CrossResult cross_interpolate(const GridFunction& f, const CrossOptions& opts) {
  const int d = static_cast<int>(f.shape.size());
  if (d < 1) throw std::invalid_argument("cross interpolation needs at least one mode");
  for (int n : f.shape)
    if (n < 1) throw std::invalid_argument("cross interpolation mode sizes must be positive");
  if (!(opts.tol > 0)) throw std::invalid_argument("cross interpolation tolerance must be positive");

  CrossResult res;
  res.seed = opts.seed;

  // One mode: the fiber itself is the exact train.
  if (d == 1) {
    TTCore core(1, f.shape[0], 1);
    std::vector<int> idx(1);
    for (int j = 0; j < f.shape[0]; ++j) {
      idx[0] = j;
      core.a[j] = f.evaluator(idx);
    }
    res.values.cores.push_back(std::move(core));
    res.values = tt_round(res.values, opts.tol * 0.1, opts.rmax);
    res.converged = true;
    res.sweeps = 1;
    return res;
  }

  std::mt19937_64 rng(opts.seed);

  // bond ranks r[0..d], boundaries pinned to 1, interior capped by the
  // unfolding sizes and rmax
  std::vector<long long> caps(d + 1, 1);
  for (int k = 1; k < d; ++k)
    caps[k] = std::min({capped_product(f.shape, 0, k, 1 << 30),
                        capped_product(f.shape, k, d, 1 << 30),
                        static_cast<long long>(opts.rmax)});
  std::vector<int> r(d + 1, 1);
  for (int k = 1; k < d; ++k) r[k] = static_cast<int>(std::min<long long>(opts.initial_rank, caps[k]));

  // J[k]: pivot partial indices over modes k+1..d-1 for bond k
  std::vector<std::vector<Partial>> J(d - 1);
  for (int k = 0; k + 1 < d; ++k)
    for (int c = 0; c < r[k + 1]; ++c) J[k].push_back(random_partial(f.shape, k + 1, rng));

  // held-out validation set: exhaustive when the box is small enough
  long long total = capped_product(f.shape, 0, d, 1LL << 62);
  std::vector<std::vector<int>> val_idx;
  if (total <= opts.sample_count) {
    std::vector<int> idx(d, 0);
    for (long long c = 0; c < total; ++c) {
      val_idx.push_back(idx);
      for (int m = d - 1; m >= 0; --m) {
        if (++idx[m] < f.shape[m]) break;
        idx[m] = 0;
      }
    }
  } else {
    val_idx.reserve(opts.sample_count);
    for (int s = 0; s < opts.sample_count; ++s) {
      std::vector<int> idx(d);
      for (int m = 0; m < d; ++m) {
        std::uniform_int_distribution<int> pick(0, f.shape[m] - 1);
        idx[m] = pick(rng);
      }
      val_idx.push_back(std::move(idx));
    }
  }
  std::vector<double> fval(val_idx.size());
  double fscale = 0.0;
  for (size_t s = 0; s < val_idx.size(); ++s) {
    fval[s] = f.evaluator(val_idx[s]);
    fscale = std::max(fscale, std::fabs(fval[s]));
  }
  if (fscale == 0.0) {
    // zero on the whole validation set: report the zero train
    res.values = tt_zero(f.shape);
    res.converged = true;
    res.sweeps = 0;
    return res;
  }

  const std::vector<Partial> empty_set{Partial{}};
  TTVector best;

  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    // left-to-right: re-select left pivot sets I from the current J
    std::vector<std::vector<Partial>> I(d - 1);
    for (int k = 0; k + 1 < d; ++k) {
      const std::vector<Partial>& left = (k > 0) ? I[k - 1] : empty_set;
      Matrix a = sample_block(f, left, k, J[k]);
      Matrix q = qr_decompose(a).orthonormal;
      std::vector<int> sel = maxvol(q).rows;
      I[k].reserve(sel.size());
      for (int row : sel) {
        Partial p = left[row / f.shape[k]];
        p.push_back(row % f.shape[k]);
        I[k].push_back(std::move(p));
      }
    }

    // right-to-left: re-select right pivot sets J from the fresh I
    for (int k = d - 2; k >= 0; --k) {
      const std::vector<Partial>& right = (k + 2 < d) ? J[k + 1] : empty_set;
      // rows run over (mode k+1 index) x (right set), mode slowest
      int n = f.shape[k + 1];
      Matrix a(n * static_cast<int>(right.size()), static_cast<int>(I[k].size()));
      std::vector<int> scratch;
      std::vector<Partial> cols;
      cols.reserve(static_cast<size_t>(n) * right.size());
      for (int j = 0; j < n; ++j)
        for (const Partial& rp : right) {
          Partial p;
          p.reserve(rp.size() + 1);
          p.push_back(j);
          p.insert(p.end(), rp.begin(), rp.end());
          cols.push_back(std::move(p));
        }
      for (size_t c = 0; c < cols.size(); ++c)
        for (size_t i = 0; i < I[k].size(); ++i)
          a(static_cast<int>(c), static_cast<int>(i)) =
              eval_full(f, I[k][i], cols[c].front(),
                        Partial(cols[c].begin() + 1, cols[c].end()), scratch);
      Matrix q = qr_decompose(a).orthonormal;
      std::vector<int> sel = maxvol(q).rows;
      J[k].clear();
      for (int row : sel) J[k].push_back(cols[row]);
    }

    // build the train left-to-right in stabilized form
    TTVector x;
    x.cores.reserve(d);
    std::vector<Partial> cur = empty_set;
    for (int k = 0; k < d; ++k) {
      const std::vector<Partial>& right = (k + 1 < d) ? J[k] : empty_set;
      Matrix a = sample_block(f, cur, k, right);
      if (k + 1 < d) {
        Matrix q = qr_decompose(a).orthonormal;
        std::vector<int> sel = maxvol(q).rows;
        Matrix core = interpolation_factor(q, sel);
        std::vector<Partial> next;
        next.reserve(sel.size());
        for (int row : sel) {
          Partial p = cur[row / f.shape[k]];
          p.push_back(row % f.shape[k]);
          next.push_back(std::move(p));
        }
        TTCore c(static_cast<int>(cur.size()), f.shape[k], static_cast<int>(sel.size()));
        c.a.assign(core.a.begin(), core.a.end());
        x.cores.push_back(std::move(c));
        cur = std::move(next);
      } else {
        TTCore c(static_cast<int>(cur.size()), f.shape[k], 1);
        c.a.assign(a.a.begin(), a.a.end());
        x.cores.push_back(std::move(c));
      }
    }

    double err = 0.0;
    for (size_t s = 0; s < val_idx.size(); ++s)
      err = std::max(err, std::fabs(x.element(val_idx[s]) - fval[s]));
    err /= fscale;
    res.sample_error = err;
    res.sweeps = sweep;
    best = std::move(x);
    if (err <= opts.tol) {
      res.converged = true;
      break;
    }

    // grow bond ranks and top up J with fresh random pivots
    for (int k = 1; k < d; ++k)
      r[k] = static_cast<int>(std::min<long long>(r[k] + opts.rank_step, caps[k]));
    for (int k = 0; k + 1 < d; ++k)
      while (static_cast<int>(J[k].size()) < r[k + 1])
        J[k].push_back(random_partial(f.shape, k + 1, rng));
  }

  res.values = tt_round(best, opts.tol * 0.1, opts.rmax);
  return res;
}

CrossResult cross_interpolate(const GridFunction& f, double tol, int rmax, int max_sweeps) {
  CrossOptions opts;
  opts.tol = tol;
  opts.rmax = rmax;
  opts.max_sweeps = max_sweeps;
  return cross_interpolate(f, opts);
}

}  // namespace stt
