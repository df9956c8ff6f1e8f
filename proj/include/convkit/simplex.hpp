#pragma once

#include <vector>

namespace convkit::lp {

enum class Status { optimal, infeasible, unbounded };

struct SimplexResult {
  Status status = Status::optimal;
  double objective = 0.0;
  std::vector<double> x;
  std::vector<int> basis;  // basic variable per row
  int iterations = 0;
};

// Two-phase dense simplex with Bland's rule (anti-cycling):
//   min c'x  s.t.  A x = b,  x >= 0.
// A is m x n, row-major.  Vertex solutions: at most m entries of x are
// nonzero.
SimplexResult simplex_solve(const std::vector<std::vector<double>>& A,
                            const std::vector<double>& b,
                            const std::vector<double>& c);

struct InequalityResult {
  Status status = Status::optimal;
  double objective = 0.0;
  std::vector<double> a;        // free variables
  std::vector<int> active_rows; // tight constraints at the optimum
  int iterations = 0;
};

// min c'a  s.t.  G a >= h  with a free.  Solved through the LP dual
// (max h'y, G'y = c, y >= 0), which keeps the tableau k x M for k variables
// and M constraints; the primal point is recovered from the active rows.
InequalityResult solve_min_inequality(const std::vector<double>& c,
                                      const std::vector<std::vector<double>>& G,
                                      const std::vector<double>& h);

}  // namespace convkit::lp
