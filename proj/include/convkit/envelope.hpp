#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace convkit::envelope {

using json = nlohmann::json;

// Scalar function sampled on a strictly increasing knot set.
struct GridFunction1D {
  std::vector<double> knots;
  std::vector<double> values;

  void validate() const;
  size_t size() const { return knots.size(); }
  // piecewise-linear interpolation; linear extension outside the knot range
  double value_at(double x) const;

  static GridFunction1D sample(const std::function<double(double)>& f, double lo,
                               double hi, int n);

  void to_csv(std::ostream& os) const;
  static GridFunction1D from_csv(std::istream& is);
  json to_json() const;
  static GridFunction1D from_json(const json& j);
};

// Scalar function on a rectangular grid; values[i][j] = f(xs[i], ys[j]).
struct GridFunction2D {
  std::vector<double> xs, ys;
  std::vector<std::vector<double>> values;

  void validate() const;
  static GridFunction2D sample(const std::function<double(double, double)>& f,
                               double xlo, double xhi, int nx, double ylo,
                               double yhi, int ny);

  void to_csv(std::ostream& os) const;  // long format x,y,value
  json to_json() const;
  static GridFunction2D from_json(const json& j);
};

// Indices of the lower convex hull vertices (Andrew monotone chain over the
// epigraph points).  Interior collinear knots are dropped at cross-product
// tolerance 1e-12; endpoints always survive.
std::vector<size_t> lower_hull_indices(const GridFunction1D& f);

// Greatest convex minorant on the knot set, reported on the same knots.
GridFunction1D lower_convex_hull_1d(const GridFunction1D& f);

// Discrete Legendre conjugate f*(s) = max_i (s x_i - f(x_i)) on a slope grid.
// An empty grid requests the default: uniform over the secant-slope range
// (plus hull slopes, so the 1-d biconjugate is exact on the knots).  A given
// grid is extended when it does not cover the secant range.
GridFunction1D legendre_conjugate(const GridFunction1D& f,
                                  std::vector<double> slopes = {});
GridFunction2D legendre_conjugate(const GridFunction2D& f,
                                  std::vector<double> sx = {},
                                  std::vector<double> sy = {});

// Conjugate twice; lands back on the original knots.
GridFunction1D biconjugate(const GridFunction1D& f);
GridFunction2D biconjugate(const GridFunction2D& f);

// Greatest convex nondecreasing minorant of a profile sampled on [0, R]:
// convex hull, then flattened left of its minimum.
GridFunction1D radial_envelope(const GridFunction1D& phi);

struct EnvelopeCertificate {
  std::vector<double> point;  // query x
  double value = 0.0;         // sum lambda_i f(x_i)
  // (lambda_i, grid point) with lambda_i > 0; at most n+1 entries
  std::vector<std::pair<double, std::vector<double>>> combination;

  json to_json() const;
};

// Pointwise envelope through the Caratheodory linear program
//   min sum lambda_j f(x_j)  s.t.  sum lambda_j x_j = x, sum lambda_j = 1,
//   lambda >= 0
// over all grid points.  Vertex solutions carry at most n+1 support points.
// Returns nullopt when x lies outside the grid's convex hull (infeasible).
std::optional<EnvelopeCertificate> caratheodory_envelope_at(const GridFunction1D& f,
                                                            double x);
std::optional<EnvelopeCertificate> caratheodory_envelope_at(const GridFunction2D& f,
                                                            double x, double y);

// max |second difference slope drop| helpers used by the tests
bool is_convex_grid(const GridFunction1D& f, double tol = 1e-12);

// Cross-method agreement tolerance at knot i: 4 * spacing * local Lipschitz.
double grid_tolerance(const GridFunction1D& f, size_t i);

}  // namespace convkit::envelope
