#include "convkit/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace convkit::lp {

namespace {

constexpr double kEps = 1e-9;

struct Tableau {
  int m = 0, n = 0;                 // rows, structural + artificial columns
  std::vector<std::vector<double>> t;  // m rows of n+1 (rhs last)
  std::vector<double> cost;            // n+1, reduced costs + objective
  std::vector<int> basis;
  std::vector<bool> blocked;           // columns barred from entering

  void pivot(int row, int col) {
    const double piv = t[row][col];
    for (int j = 0; j <= n; ++j) t[row][j] /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == row) continue;
      const double f = t[i][col];
      if (f == 0.0) continue;
      for (int j = 0; j <= n; ++j) t[i][j] -= f * t[row][j];
    }
    const double f = cost[col];
    if (f != 0.0)
      for (int j = 0; j <= n; ++j) cost[j] -= f * t[row][j];
    basis[row] = col;
  }

  // Bland: entering = lowest-index negative reduced cost; leaving = min
  // ratio, ties by lowest basic variable index.  Returns false on
  // unboundedness.
  bool iterate(int& iters, int max_iters) {
    while (iters < max_iters) {
      int col = -1;
      for (int j = 0; j < n; ++j) {
        if (blocked[j]) continue;
        if (cost[j] < -kEps) {
          col = j;
          break;
        }
      }
      if (col < 0) return true;  // optimal
      int row = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        if (t[i][col] > kEps) {
          const double ratio = t[i][n] / t[i][col];
          if (ratio < best_ratio - kEps ||
              (ratio < best_ratio + kEps && (row < 0 || basis[i] < basis[row]))) {
            best_ratio = ratio;
            row = i;
          }
        }
      }
      if (row < 0) return false;  // unbounded
      pivot(row, col);
      ++iters;
    }
    throw std::runtime_error("simplex: iteration limit reached");
  }
};

}  // namespace

SimplexResult simplex_solve(const std::vector<std::vector<double>>& A,
                            const std::vector<double>& b,
                            const std::vector<double>& c) {
  const int m = static_cast<int>(A.size());
  const int n = static_cast<int>(c.size());
  if (static_cast<int>(b.size()) != m)
    throw std::invalid_argument("simplex_solve: b size mismatch");
  for (const auto& row : A)
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("simplex_solve: A row size mismatch");

  Tableau tb;
  tb.m = m;
  tb.n = n + m;  // structural + artificials
  tb.t.assign(m, std::vector<double>(tb.n + 1, 0.0));
  tb.basis.resize(m);
  tb.blocked.assign(tb.n, false);
  for (int i = 0; i < m; ++i) {
    const double sign = b[i] < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) tb.t[i][j] = sign * A[i][j];
    tb.t[i][n + i] = 1.0;
    tb.t[i][tb.n] = sign * b[i];
    tb.basis[i] = n + i;
  }

  SimplexResult res;

  // Phase 1: minimize the artificial sum.
  tb.cost.assign(tb.n + 1, 0.0);
  for (int j = n; j < tb.n; ++j) tb.cost[j] = 1.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= tb.n; ++j) tb.cost[j] -= tb.t[i][j];
  if (!tb.iterate(res.iterations, 50000 + 50 * tb.n))
    throw std::runtime_error("simplex: phase 1 unbounded");
  if (-tb.cost[tb.n] > 1e-7) {
    res.status = Status::infeasible;
    return res;
  }
  // Drive leftover artificials out of the basis where possible.
  for (int i = 0; i < m; ++i) {
    if (tb.basis[i] < n) continue;
    int col = -1;
    for (int j = 0; j < n; ++j)
      if (std::fabs(tb.t[i][j]) > kEps) {
        col = j;
        break;
      }
    if (col >= 0) tb.pivot(i, col);
  }
  for (int j = n; j < tb.n; ++j) tb.blocked[j] = true;

  // Phase 2.
  tb.cost.assign(tb.n + 1, 0.0);
  for (int j = 0; j < n; ++j) tb.cost[j] = c[j];
  for (int i = 0; i < m; ++i) {
    if (tb.basis[i] >= n) continue;
    const double f = tb.cost[tb.basis[i]];
    if (f == 0.0) continue;
    for (int j = 0; j <= tb.n; ++j) tb.cost[j] -= f * tb.t[i][j];
  }
  if (!tb.iterate(res.iterations, 50000 + 50 * tb.n)) {
    res.status = Status::unbounded;
    return res;
  }

  res.x.assign(n, 0.0);
  for (int i = 0; i < m; ++i)
    if (tb.basis[i] < n) res.x[tb.basis[i]] = tb.t[i][tb.n];
  res.objective = 0.0;
  for (int j = 0; j < n; ++j) res.objective += c[j] * res.x[j];
  res.basis = tb.basis;
  return res;
}

InequalityResult solve_min_inequality(const std::vector<double>& c,
                                      const std::vector<std::vector<double>>& G,
                                      const std::vector<double>& h) {
  const int k = static_cast<int>(c.size());
  const int M = static_cast<int>(G.size());
  if (static_cast<int>(h.size()) != M)
    throw std::invalid_argument("solve_min_inequality: h size mismatch");

  // Dual: min (-h)'y  s.t.  G' y = c,  y >= 0.
  std::vector<std::vector<double>> A(k, std::vector<double>(M));
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < k; ++j) A[j][i] = G[i][j];
  std::vector<double> negh(M);
  for (int i = 0; i < M; ++i) negh[i] = -h[i];

  const auto dual = simplex_solve(A, c, negh);
  InequalityResult res;
  res.iterations = dual.iterations;
  if (dual.status == Status::infeasible) {
    res.status = Status::unbounded;  // dual infeasible => primal unbounded (given feasibility)
    return res;
  }
  if (dual.status == Status::unbounded) {
    res.status = Status::infeasible;
    return res;
  }
  res.objective = -dual.objective;  // max h'y

  // Recover the primal point from the k active rows of the dual basis.
  res.active_rows.clear();
  for (int idx : dual.basis)
    if (idx < M) res.active_rows.push_back(idx);
  std::sort(res.active_rows.begin(), res.active_rows.end());
  const int r = static_cast<int>(res.active_rows.size());
  if (r < k) throw std::runtime_error("solve_min_inequality: degenerate dual basis");

  // Gaussian elimination on the k x k active system G_B a = h_B.
  std::vector<std::vector<double>> S(r, std::vector<double>(k + 1));
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < k; ++j) S[i][j] = G[res.active_rows[i]][j];
    S[i][k] = h[res.active_rows[i]];
  }
  std::vector<double> a(k, 0.0);
  int row = 0;
  std::vector<int> pivot_col;
  for (int col = 0; col < k && row < r; ++col) {
    int best = row;
    for (int i = row + 1; i < r; ++i)
      if (std::fabs(S[i][col]) > std::fabs(S[best][col])) best = i;
    if (std::fabs(S[best][col]) < 1e-12) continue;
    std::swap(S[best], S[row]);
    for (int i = 0; i < r; ++i) {
      if (i == row) continue;
      const double f = S[i][col] / S[row][col];
      if (f == 0.0) continue;
      for (int j = col; j <= k; ++j) S[i][j] -= f * S[row][j];
    }
    pivot_col.push_back(col);
    ++row;
  }
  for (int i = 0; i < static_cast<int>(pivot_col.size()); ++i)
    a[pivot_col[i]] = S[i][k] / S[i][pivot_col[i]];

  // Sanity: the recovered point must reproduce the duality objective and be
  // feasible.  Tolerances scale with the data.
  double obj = 0.0, scale = 1.0;
  for (int j = 0; j < k; ++j) {
    obj += c[j] * a[j];
    scale = std::max(scale, std::fabs(a[j]));
  }
  if (std::fabs(obj - res.objective) > 1e-6 * (1.0 + std::fabs(res.objective)))
    throw std::runtime_error("solve_min_inequality: primal recovery mismatch");
  for (int i = 0; i < M; ++i) {
    double lhs = 0.0;
    for (int j = 0; j < k; ++j) lhs += G[i][j] * a[j];
    if (lhs < h[i] - 1e-6 * scale)
      throw std::runtime_error("solve_min_inequality: recovered point infeasible");
  }
  res.a = std::move(a);
  return res;
}

}  // namespace convkit::lp
