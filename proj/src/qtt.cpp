#include <algorithm>
#include <stdexcept>
#include <utility>

#include "stt/la.hpp"
#include "stt/qtt.hpp"

namespace stt {

namespace {

Matrix wrap(const std::vector<double>& data, int rows, int cols) {
  if (static_cast<size_t>(rows) * cols != data.size())
    throw std::logic_error("quantize reshape size mismatch");
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.a.begin());
  return m;
}

// Exact split of one core [r0, n, r1] into a chain of digit cores via QR;
// radix products must equal n. No truncation happens here.
std::vector<TTCore> split_core(const TTCore& c, const std::vector<int>& radices) {
  std::vector<TTCore> out;
  if (radices.size() == 1) {
    out.push_back(c);
    return out;
  }
  long long rest = c.n;
  Matrix cur = wrap(c.a, c.r0 * radices[0], static_cast<int>(rest / radices[0]) * c.r1);
  int rprev = c.r0;
  for (size_t k = 0; k + 1 < radices.size(); ++k) {
    QrResult f = qr_decompose(cur);
    TTCore digit(rprev, radices[k], f.orthonormal.cols);
    digit.a.assign(f.orthonormal.a.begin(), f.orthonormal.a.end());
    out.push_back(std::move(digit));
    rprev = f.orthonormal.cols;
    rest /= radices[k];
    if (k + 2 < radices.size()) {
      cur = wrap(f.triangular.a, rprev * radices[k + 1],
                 static_cast<int>(rest / radices[k + 1]) * c.r1);
    } else {
      TTCore last(rprev, radices[k + 1], c.r1);
      last.a = f.triangular.a;
      out.push_back(std::move(last));
    }
  }
  return out;
}

// Interleave row and column digits of an operator core: [r0, m, n, r1] with
// row radices p_k and col radices q_k becomes a chain-ready layout
// [r0, p1*q1, ..., pS*qS, r1], digit pair k holding d_k*q_k + e_k.
TTCore interleave_digits(const TTMatCore& c, const std::vector<int>& prad,
                         const std::vector<int>& qrad) {
  const int s = static_cast<int>(prad.size());
  TTCore out(c.r0, c.m * c.n, c.r1);
  std::vector<int> d(s), e(s);
  for (int i = 0; i < c.m; ++i) {
    int rem = i;
    for (int k = s - 1; k >= 0; --k) {
      d[k] = rem % prad[k];
      rem /= prad[k];
    }
    for (int j = 0; j < c.n; ++j) {
      rem = j;
      for (int k = s - 1; k >= 0; --k) {
        e[k] = rem % qrad[k];
        rem /= qrad[k];
      }
      long long mode = 0;
      for (int k = 0; k < s; ++k) mode = mode * (prad[k] * qrad[k]) + (d[k] * qrad[k] + e[k]);
      for (int a = 0; a < c.r0; ++a)
        for (int b = 0; b < c.r1; ++b)
          out.at(a, static_cast<int>(mode), b) = c.at(a, i, j, b);
    }
  }
  return out;
}

// Contract a chain of cores back into a single core [r0, prod(n_k), r1].
TTCore contract_group(const std::vector<TTCore>& cores, size_t begin, size_t end) {
  const TTCore& first = cores[begin];
  Matrix cur = wrap(first.a, first.r0 * first.n, first.r1);
  long long mode = first.n;
  for (size_t k = begin + 1; k < end; ++k) {
    const TTCore& c = cores[k];
    Matrix prod = matmul(cur, wrap(c.a, c.r0, c.n * c.r1));
    cur = wrap(prod.a, prod.rows * c.n, c.r1);
    mode *= c.n;
  }
  TTCore out(first.r0, static_cast<int>(mode), cores[end - 1].r1);
  out.a = std::move(cur.a);
  return out;
}

void check_radices(const std::vector<int>& radices, int n, const char* what) {
  long long prod = 1;
  for (int r : radices) {
    if (r < 1) throw std::invalid_argument("factorization radices must be positive");
    prod *= r;
  }
  if (prod != n)
    throw std::invalid_argument(std::string("factorization does not match the ") + what +
                                " mode size");
}

}  // namespace

std::vector<int> factor_mode(int n) {
  if (n < 1) throw std::invalid_argument("mode size must be positive");
  if (n == 1) return {1};
  std::vector<int> out;
  while (n % 2 == 0) {
    out.push_back(2);
    n /= 2;
  }
  for (int p = 3; static_cast<long long>(p) * p <= n; p += 2) {
    while (n % p == 0) {
      out.push_back(p);
      n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

TTVector quantize(const TTVector& t, double tol, std::vector<std::vector<int>>* fact_out) {
  t.validate();
  TTVector q;
  std::vector<std::vector<int>> fact;
  for (const TTCore& c : t.cores) {
    fact.push_back(factor_mode(c.n));
    std::vector<TTCore> digits = split_core(c, fact.back());
    for (TTCore& d : digits) q.cores.push_back(std::move(d));
  }
  if (fact_out) *fact_out = fact;
  return tt_round(q, tol);
}

TTMatrix quantize(const TTMatrix& t, double tol, std::vector<std::vector<int>>* row_fact_out,
                  std::vector<std::vector<int>>* col_fact_out) {
  t.validate();
  TTMatrix q;
  std::vector<std::vector<int>> row_fact, col_fact;
  for (const TTMatCore& c : t.cores) {
    std::vector<int> prad = factor_mode(c.m), qrad = factor_mode(c.n);
    if (prad.size() != qrad.size())
      throw std::invalid_argument(
          "operator mode has mismatched row/col radix counts; digits cannot be paired");
    TTCore merged = interleave_digits(c, prad, qrad);
    std::vector<int> pair_sizes(prad.size());
    for (size_t k = 0; k < prad.size(); ++k) pair_sizes[k] = prad[k] * qrad[k];
    std::vector<TTCore> digits = split_core(merged, pair_sizes);
    for (size_t k = 0; k < digits.size(); ++k) {
      TTMatCore mc(digits[k].r0, prad[k], qrad[k], digits[k].r1);
      mc.a = std::move(digits[k].a);
      q.cores.push_back(std::move(mc));
    }
    row_fact.push_back(std::move(prad));
    col_fact.push_back(std::move(qrad));
  }
  if (row_fact_out) *row_fact_out = row_fact;
  if (col_fact_out) *col_fact_out = col_fact;
  return tt_round(q, tol);
}

TTVector dequantize(const TTVector& q, const std::vector<std::vector<int>>& fact) {
  q.validate();
  size_t total = 0;
  for (const auto& radices : fact) total += radices.size();
  if (total != static_cast<size_t>(q.order()))
    throw std::invalid_argument("factorization core count does not match the quantized train");
  TTVector out;
  size_t pos = 0;
  for (const auto& radices : fact) {
    for (size_t k = 0; k < radices.size(); ++k)
      if (q.cores[pos + k].n != radices[k])
        throw std::invalid_argument("quantized mode sizes disagree with the factorization");
    out.cores.push_back(contract_group(q.cores, pos, pos + radices.size()));
    pos += radices.size();
  }
  out.validate();
  return out;
}

TTMatrix dequantize(const TTMatrix& q, const std::vector<std::vector<int>>& row_fact,
                    const std::vector<std::vector<int>>& col_fact) {
  q.validate();
  if (row_fact.size() != col_fact.size())
    throw std::invalid_argument("row and col factorizations must pair up");
  size_t total = 0;
  for (const auto& radices : row_fact) total += radices.size();
  if (total != static_cast<size_t>(q.order()))
    throw std::invalid_argument("factorization core count does not match the quantized train");

  TTMatrix out;
  size_t pos = 0;
  for (size_t g = 0; g < row_fact.size(); ++g) {
    const std::vector<int>& prad = row_fact[g];
    const std::vector<int>& qrad = col_fact[g];
    if (prad.size() != qrad.size())
      throw std::invalid_argument("row and col factorizations must pair up");
    const int s = static_cast<int>(prad.size());
    std::vector<TTCore> merged;
    int m = 1, n = 1;
    for (int k = 0; k < s; ++k) {
      const TTMatCore& c = q.cores[pos + k];
      if (c.m != prad[k] || c.n != qrad[k])
        throw std::invalid_argument("quantized mode sizes disagree with the factorization");
      TTCore v(c.r0, c.m * c.n, c.r1);
      v.a = c.a;
      merged.push_back(std::move(v));
      m *= prad[k];
      n *= qrad[k];
    }
    TTCore grouped = contract_group(merged, 0, merged.size());
    // un-interleave (d1,e1,...,dS,eS) into (d1..dS, e1..eS)
    TTMatCore mc(grouped.r0, m, n, grouped.r1);
    std::vector<int> d(s), e(s);
    for (int mode = 0; mode < grouped.n; ++mode) {
      int rem = mode;
      for (int k = s - 1; k >= 0; --k) {
        const int pq = prad[k] * qrad[k];
        const int pair = rem % pq;
        rem /= pq;
        d[k] = pair / qrad[k];
        e[k] = pair % qrad[k];
      }
      int i = 0, j = 0;
      for (int k = 0; k < s; ++k) {
        i = i * prad[k] + d[k];
        j = j * qrad[k] + e[k];
      }
      for (int a = 0; a < grouped.r0; ++a)
        for (int b = 0; b < grouped.r1; ++b) mc.at(a, i, j, b) = grouped.at(a, mode, b);
    }
    out.cores.push_back(std::move(mc));
    pos += s;
  }
  out.validate();
  return out;
}

double compression_ratio(const TTVector& t) {
  t.validate();
  double full = 1.0;
  for (int n : t.mode_sizes()) full *= n;
  return full / static_cast<double>(t.parameter_count());
}

double compression_ratio(const TTMatrix& t) {
  t.validate();
  double full = 1.0;
  for (const TTMatCore& c : t.cores) full *= static_cast<double>(c.m) * c.n;
  return full / static_cast<double>(t.parameter_count());
}

int next_pow2(int n) {
  if (n < 1) throw std::invalid_argument("next_pow2 needs a positive size");
  int p = 1;
  while (p < n) p *= 2;
  return p;
}

TTVector embed_pow2(const TTVector& x) {
  x.validate();
  TTVector out;
  out.cores.reserve(x.cores.size());
  for (const TTCore& core : x.cores) {
    TTCore padded(core.r0, next_pow2(core.n), core.r1);
    for (int i = 0; i < core.r0; ++i)
      for (int j = 0; j < core.n; ++j)
        for (int k = 0; k < core.r1; ++k) padded.at(i, j, k) = core.at(i, j, k);
    out.cores.push_back(std::move(padded));
  }
  out.validate();
  return out;
}

TTMatrix embed_pow2(const TTMatrix& a, bool identity_complement) {
  a.validate();
  TTMatrix out;
  out.cores.reserve(a.cores.size());
  for (const TTMatCore& core : a.cores) {
    if (identity_complement && core.m != core.n)
      throw std::invalid_argument("identity completion needs square operator modes");
    TTMatCore padded(core.r0, next_pow2(core.m), next_pow2(core.n), core.r1);
    for (int i = 0; i < core.r0; ++i)
      for (int p = 0; p < core.m; ++p)
        for (int q = 0; q < core.n; ++q)
          for (int k = 0; k < core.r1; ++k) padded.at(i, p, q, k) = core.at(i, p, q, k);
    out.cores.push_back(std::move(padded));
  }
  out.validate();
  if (identity_complement) {
    // identity everywhere minus identity on the original block leaves the
    // complement diagonal, which the padded operator then completes
    std::vector<int> orig = a.row_sizes();
    std::vector<int> padded_sizes = out.row_sizes();
    std::vector<Matrix> partial;
    partial.reserve(orig.size());
    for (size_t k = 0; k < orig.size(); ++k) {
      Matrix d(padded_sizes[k], padded_sizes[k]);
      for (int i = 0; i < orig[k]; ++i) d(i, i) = 1.0;
      partial.push_back(std::move(d));
    }
    TTMatrix complement =
        ttmat_axpy(-1.0, ttmat_from_factors(partial), ttmat_identity(padded_sizes));
    out = ttmat_axpy(1.0, complement, out);
  }
  return out;
}

}  // namespace stt
