#pragma once

#include <vector>

#include "stt/tt.hpp"

namespace stt {

// Prime radices of a mode size, 2s first, then odd primes ascending.
// n = 1 passes through as the identity radix [1].
std::vector<int> factor_mode(int n);

// Split every mode into its radix chain (first radix carries the slowest
// digit) and truncate the result at tol relative to the train norm. The
// factorizations used are reported through the optional out-parameters.
TTVector quantize(const TTVector& t, double tol,
                  std::vector<std::vector<int>>* fact_out = nullptr);
// Operator modes split row and column jointly: digit k of the row index is
// paired with digit k of the column index, so both factorizations must have
// the same length for every mode.
TTMatrix quantize(const TTMatrix& t, double tol,
                  std::vector<std::vector<int>>* row_fact_out = nullptr,
                  std::vector<std::vector<int>>* col_fact_out = nullptr);

TTVector dequantize(const TTVector& q, const std::vector<std::vector<int>>& fact);
TTMatrix dequantize(const TTMatrix& q, const std::vector<std::vector<int>>& row_fact,
                    const std::vector<std::vector<int>>& col_fact);

// Elements of the represented tensor (rows x cols for operators) divided by
// the number of stored core entries.
double compression_ratio(const TTVector& t);
double compression_ratio(const TTMatrix& t);

int next_pow2(int n);

// Zero-extend every mode to the next power of two, so sizes like 15 or 31
// split into clean binary digit chains. Operators may additionally complete
// the new diagonal entries with ones, which keeps an embedded square system
// nonsingular while leaving the added unknowns decoupled (their right-hand
// side stays zero). The original content is recovered with restrict_modes.
TTVector embed_pow2(const TTVector& x);
TTMatrix embed_pow2(const TTMatrix& a, bool identity_complement);

}  // namespace stt
