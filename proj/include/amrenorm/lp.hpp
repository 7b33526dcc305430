#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "amrenorm/rational.hpp"

namespace amrenorm {

/// Exact rational simplex for maximize c.x subject to A x <= b, x >= 0 with
/// b >= 0 (the origin is feasible, so no phase 1 is needed). Bland's rule
/// guarantees termination. Problem sizes here are tiny, so the dense tableau
/// is plenty.
struct LpResult {
  enum class Status { Optimal, Unbounded };
  Status status = Status::Optimal;
  Rat value;
  std::vector<Rat> x;
};

inline LpResult lp_maximize(const std::vector<std::vector<Rat>>& A, const std::vector<Rat>& b,
                            const std::vector<Rat>& c) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  for (const auto& row : A)
    if (row.size() != n) throw std::invalid_argument("lp_maximize: ragged constraint matrix");
  if (b.size() != m) throw std::invalid_argument("lp_maximize: rhs size mismatch");
  for (const auto& v : b)
    if (v < 0) throw std::invalid_argument("lp_maximize: requires b >= 0");

  // Tableau: m rows of [A | I | b]; objective row holds reduced costs.
  const std::size_t cols = n + m + 1;
  std::vector<std::vector<Rat>> tab(m, std::vector<Rat>(cols));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) tab[i][j] = A[i][j];
    tab[i][n + i] = 1;
    tab[i][cols - 1] = b[i];
    basis[i] = n + i;
  }
  std::vector<Rat> obj(cols);  // -reduced cost per column; obj[cols-1] = objective value
  for (std::size_t j = 0; j < n; ++j) obj[j] = c[j];

  for (;;) {
    // Bland: entering variable = smallest column index with positive obj coeff.
    std::size_t enter = cols;
    for (std::size_t j = 0; j + 1 < cols; ++j) {
      if (obj[j] > 0) {
        enter = j;
        break;
      }
    }
    if (enter == cols) break;

    std::size_t leave = m;
    Rat best_ratio;
    for (std::size_t i = 0; i < m; ++i) {
      if (tab[i][enter] <= 0) continue;
      const Rat ratio = tab[i][cols - 1] / tab[i][enter];
      if (leave == m || ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == m) return LpResult{LpResult::Status::Unbounded, Rat(0), {}};

    const Rat pivot = tab[leave][enter];
    for (auto& v : tab[leave]) v /= pivot;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || tab[i][enter] == 0) continue;
      const Rat f = tab[i][enter];
      for (std::size_t j = 0; j < cols; ++j) tab[i][j] -= f * tab[leave][j];
    }
    if (obj[enter] != 0) {
      const Rat f = obj[enter];
      for (std::size_t j = 0; j < cols; ++j) obj[j] -= f * tab[leave][j];
    }
    basis[leave] = enter;
  }

  LpResult out;
  out.status = LpResult::Status::Optimal;
  out.value = -obj[cols - 1];
  out.x.assign(n, Rat(0));
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) out.x[basis[i]] = tab[i][cols - 1];
  return out;
}

}  // namespace amrenorm
