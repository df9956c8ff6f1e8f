#include "convkit/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "convkit/simplex.hpp"

namespace convkit::envelope {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void write_double(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

// Secant slopes of consecutive knots.
std::vector<double> secant_slopes(const std::vector<double>& xs,
                                  const std::vector<double>& vs) {
  std::vector<double> s;
  s.reserve(xs.size());
  for (size_t i = 0; i + 1 < xs.size(); ++i)
    s.push_back((vs[i + 1] - vs[i]) / (xs[i + 1] - xs[i]));
  return s;
}

// f*(s) for every s in ascending `slopes`, using the monotone argmax along
// the hull vertices.  O(n + |slopes|).
std::vector<double> conjugate_values(const std::vector<double>& xs,
                                     const std::vector<double>& vs,
                                     const std::vector<size_t>& hull,
                                     const std::vector<double>& slopes) {
  std::vector<double> out(slopes.size());
  size_t j = 0;
  for (size_t k = 0; k < slopes.size(); ++k) {
    const double s = slopes[k];
    while (j + 1 < hull.size()) {
      const size_t a = hull[j], b = hull[j + 1];
      const double seg = (vs[b] - vs[a]) / (xs[b] - xs[a]);
      if (s >= seg)
        ++j;
      else
        break;
    }
    out[k] = s * xs[hull[j]] - vs[hull[j]];
  }
  return out;
}

// tol > 0 additionally prunes (near-)collinear interior vertices, giving the
// canonical hull output; the conjugate sweeps use tol = 0, where dropping is
// value-exact.
std::vector<size_t> hull_of(const std::vector<double>& xs,
                            const std::vector<double>& vs, double tol) {
  std::vector<size_t> h;
  for (size_t i = 0; i < xs.size(); ++i) {
    while (h.size() >= 2) {
      const size_t a = h[h.size() - 2], b = h[h.size() - 1];
      const double cross = (xs[b] - xs[a]) * (vs[i] - vs[a]) -
                           (vs[b] - vs[a]) * (xs[i] - xs[a]);
      if (cross <= tol)
        h.pop_back();
      else
        break;
    }
    h.push_back(i);
  }
  return h;
}

std::vector<double> default_slopes(const std::vector<double>& xs,
                                   const std::vector<double>& vs,
                                   const std::vector<size_t>& hull) {
  const auto sec = secant_slopes(xs, vs);
  double lo = *std::min_element(sec.begin(), sec.end());
  double hi = *std::max_element(sec.begin(), sec.end());
  const double margin = 0.05 * (hi - lo) + 1e-9;
  lo -= margin;
  hi += margin;
  std::vector<double> s;
  const int n = std::max<int>(65, static_cast<int>(xs.size()));
  s.reserve(n + hull.size() + 1);
  for (int k = 0; k < n; ++k) s.push_back(lo + (hi - lo) * k / (n - 1));
  s.push_back(0.0);
  for (size_t j = 0; j + 1 < hull.size(); ++j) {
    const size_t a = hull[j], b = hull[j + 1];
    s.push_back((vs[b] - vs[a]) / (xs[b] - xs[a]));
  }
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end(),
                      [](double a, double b) { return std::fabs(a - b) < 1e-15; }),
          s.end());
  return s;
}

std::vector<double> cover_range(std::vector<double> slopes,
                                const std::vector<double>& xs,
                                const std::vector<double>& vs) {
  const auto sec = secant_slopes(xs, vs);
  const double lo = *std::min_element(sec.begin(), sec.end());
  const double hi = *std::max_element(sec.begin(), sec.end());
  std::sort(slopes.begin(), slopes.end());
  if (slopes.empty() || slopes.front() > lo) slopes.insert(slopes.begin(), lo - 1e-9);
  if (slopes.back() < hi) slopes.push_back(hi + 1e-9);
  slopes.erase(std::unique(slopes.begin(), slopes.end(),
                           [](double a, double b) { return std::fabs(a - b) < 1e-15; }),
               slopes.end());
  return slopes;
}

}  // namespace

// ---------------------------------------------------------------------------
// GridFunction1D

void GridFunction1D::validate() const {
  require(knots.size() == values.size(), "GridFunction1D: size mismatch");
  require(!knots.empty(), "GridFunction1D: empty grid");
  for (size_t i = 0; i + 1 < knots.size(); ++i)
    require(knots[i] < knots[i + 1], "GridFunction1D: knots must increase strictly");
  for (double v : values)
    require(std::isfinite(v), "GridFunction1D: values must be finite");
}

double GridFunction1D::value_at(double x) const {
  const size_t n = knots.size();
  if (n == 1) return values[0];
  size_t i;
  if (x <= knots.front())
    i = 0;
  else if (x >= knots.back())
    i = n - 2;
  else
    i = std::upper_bound(knots.begin(), knots.end(), x) - knots.begin() - 1;
  const double w = (x - knots[i]) / (knots[i + 1] - knots[i]);
  return values[i] * (1.0 - w) + values[i + 1] * w;
}

GridFunction1D GridFunction1D::sample(const std::function<double(double)>& f,
                                      double lo, double hi, int n) {
  require(n >= 2 && hi > lo, "GridFunction1D::sample: bad window");
  GridFunction1D g;
  g.knots.resize(n);
  g.values.resize(n);
  for (int i = 0; i < n; ++i) {
    g.knots[i] = lo + (hi - lo) * i / (n - 1);
    g.values[i] = f(g.knots[i]);
  }
  g.validate();
  return g;
}

void GridFunction1D::to_csv(std::ostream& os) const {
  os << "x,value\n";
  for (size_t i = 0; i < knots.size(); ++i) {
    write_double(os, knots[i]);
    os << ',';
    write_double(os, values[i]);
    os << '\n';
  }
}

GridFunction1D GridFunction1D::from_csv(std::istream& is) {
  GridFunction1D g;
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    require(comma != std::string::npos, "GridFunction1D::from_csv: bad row");
    g.knots.push_back(std::stod(line.substr(0, comma)));
    g.values.push_back(std::stod(line.substr(comma + 1)));
  }
  g.validate();
  return g;
}

json GridFunction1D::to_json() const {
  return json{{"knots", knots}, {"values", values}};
}

GridFunction1D GridFunction1D::from_json(const json& j) {
  GridFunction1D g;
  g.knots = j.at("knots").get<std::vector<double>>();
  g.values = j.at("values").get<std::vector<double>>();
  g.validate();
  return g;
}

// ---------------------------------------------------------------------------
// GridFunction2D

void GridFunction2D::validate() const {
  require(!xs.empty() && !ys.empty(), "GridFunction2D: empty grid");
  require(values.size() == xs.size(), "GridFunction2D: row count mismatch");
  for (const auto& row : values) {
    require(row.size() == ys.size(), "GridFunction2D: column count mismatch");
    for (double v : row) require(std::isfinite(v), "GridFunction2D: non-finite value");
  }
  for (size_t i = 0; i + 1 < xs.size(); ++i)
    require(xs[i] < xs[i + 1], "GridFunction2D: x knots must increase");
  for (size_t j = 0; j + 1 < ys.size(); ++j)
    require(ys[j] < ys[j + 1], "GridFunction2D: y knots must increase");
}

GridFunction2D GridFunction2D::sample(const std::function<double(double, double)>& f,
                                      double xlo, double xhi, int nx, double ylo,
                                      double yhi, int ny) {
  require(nx >= 2 && ny >= 2 && xhi > xlo && yhi > ylo,
          "GridFunction2D::sample: bad window");
  GridFunction2D g;
  g.xs.resize(nx);
  g.ys.resize(ny);
  for (int i = 0; i < nx; ++i) g.xs[i] = xlo + (xhi - xlo) * i / (nx - 1);
  for (int j = 0; j < ny; ++j) g.ys[j] = ylo + (yhi - ylo) * j / (ny - 1);
  g.values.assign(nx, std::vector<double>(ny));
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) g.values[i][j] = f(g.xs[i], g.ys[j]);
  g.validate();
  return g;
}

void GridFunction2D::to_csv(std::ostream& os) const {
  os << "x,y,value\n";
  for (size_t i = 0; i < xs.size(); ++i)
    for (size_t j = 0; j < ys.size(); ++j) {
      write_double(os, xs[i]);
      os << ',';
      write_double(os, ys[j]);
      os << ',';
      write_double(os, values[i][j]);
      os << '\n';
    }
}

json GridFunction2D::to_json() const {
  return json{{"xs", xs}, {"ys", ys}, {"values", values}};
}

GridFunction2D GridFunction2D::from_json(const json& j) {
  GridFunction2D g;
  g.xs = j.at("xs").get<std::vector<double>>();
  g.ys = j.at("ys").get<std::vector<double>>();
  g.values = j.at("values").get<std::vector<std::vector<double>>>();
  g.validate();
  return g;
}

// ---------------------------------------------------------------------------
// Hull and conjugates

std::vector<size_t> lower_hull_indices(const GridFunction1D& f) {
  f.validate();
  require(f.size() >= 2, "lower_hull_indices: need at least 2 knots");
  return hull_of(f.knots, f.values, 1e-12);
}

GridFunction1D lower_convex_hull_1d(const GridFunction1D& f) {
  const auto hull = lower_hull_indices(f);
  GridFunction1D out;
  out.knots = f.knots;
  out.values.resize(f.size());
  size_t seg = 0;
  for (size_t i = 0; i < f.size(); ++i) {
    while (seg + 1 < hull.size() && f.knots[hull[seg + 1]] <= f.knots[i]) ++seg;
    if (hull[seg] == i) {
      out.values[i] = f.values[i];
    } else {
      const size_t a = hull[seg], b = hull[seg + 1];
      const double w = (f.knots[i] - f.knots[a]) / (f.knots[b] - f.knots[a]);
      out.values[i] = f.values[a] * (1.0 - w) + f.values[b] * w;
    }
  }
  return out;
}

GridFunction1D legendre_conjugate(const GridFunction1D& f, std::vector<double> slopes) {
  f.validate();
  require(f.size() >= 2, "legendre_conjugate: need at least 2 knots");
  const auto hull = hull_of(f.knots, f.values, 0.0);
  if (slopes.empty())
    slopes = default_slopes(f.knots, f.values, hull);
  else
    slopes = cover_range(std::move(slopes), f.knots, f.values);
  GridFunction1D out;
  out.values = conjugate_values(f.knots, f.values, hull, slopes);
  out.knots = std::move(slopes);
  return out;
}

GridFunction2D legendre_conjugate(const GridFunction2D& f, std::vector<double> sx,
                                  std::vector<double> sy) {
  f.validate();
  const size_t nx = f.xs.size(), ny = f.ys.size();
  require(nx >= 2 && ny >= 2, "legendre_conjugate: need a 2x2 grid at least");

  // default slope grids: secant range over all fibers, plus 0
  auto fiber_range = [&](bool along_y) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    if (along_y) {
      for (size_t i = 0; i < nx; ++i)
        for (size_t j = 0; j + 1 < ny; ++j) {
          const double s = (f.values[i][j + 1] - f.values[i][j]) / (f.ys[j + 1] - f.ys[j]);
          lo = std::min(lo, s);
          hi = std::max(hi, s);
        }
    } else {
      for (size_t j = 0; j < ny; ++j)
        for (size_t i = 0; i + 1 < nx; ++i) {
          const double s = (f.values[i + 1][j] - f.values[i][j]) / (f.xs[i + 1] - f.xs[i]);
          lo = std::min(lo, s);
          hi = std::max(hi, s);
        }
    }
    return std::pair{lo, hi};
  };
  auto make_grid = [&](std::pair<double, double> range, size_t count) {
    const double margin = 0.05 * (range.second - range.first) + 1e-9;
    const double lo = range.first - margin, hi = range.second + margin;
    std::vector<double> s;
    const int n = std::max<size_t>(65, count);
    for (int k = 0; k < n; ++k) s.push_back(lo + (hi - lo) * k / (n - 1));
    s.push_back(0.0);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end(),
                        [](double a, double b) { return std::fabs(a - b) < 1e-15; }),
            s.end());
    return s;
  };
  if (sy.empty()) sy = make_grid(fiber_range(true), ny);
  if (sx.empty()) sx = make_grid(fiber_range(false), nx);
  std::sort(sx.begin(), sx.end());
  std::sort(sy.begin(), sy.end());

  // pass 1: conjugate in y for each x fiber
  std::vector<std::vector<double>> hy(nx, std::vector<double>(sy.size()));
  for (size_t i = 0; i < nx; ++i) {
    const auto hull = hull_of(f.ys, f.values[i], 0.0);
    hy[i] = conjugate_values(f.ys, f.values[i], hull, sy);
  }
  // pass 2: conjugate in x of x -> -hy(x, t) for each t fiber
  GridFunction2D out;
  out.xs = sx;
  out.ys = sy;
  out.values.assign(sx.size(), std::vector<double>(sy.size()));
  std::vector<double> fiber(nx);
  for (size_t t = 0; t < sy.size(); ++t) {
    for (size_t i = 0; i < nx; ++i) fiber[i] = -hy[i][t];
    const auto hull = hull_of(f.xs, fiber, 0.0);
    const auto vals = conjugate_values(f.xs, fiber, hull, sx);
    for (size_t s = 0; s < sx.size(); ++s) out.values[s][t] = vals[s];
  }
  return out;
}

GridFunction1D biconjugate(const GridFunction1D& f) {
  const auto star = legendre_conjugate(f);
  auto out = legendre_conjugate(star, f.knots);
  // restrict to the original knots (cover_range may have padded the ends)
  if (out.knots.size() != f.knots.size()) {
    GridFunction1D trimmed;
    for (size_t i = 0, j = 0; i < f.knots.size(); ++i) {
      while (j < out.knots.size() && out.knots[j] < f.knots[i] - 1e-15) ++j;
      trimmed.knots.push_back(f.knots[i]);
      trimmed.values.push_back(out.values[j]);
    }
    return trimmed;
  }
  return out;
}

GridFunction2D biconjugate(const GridFunction2D& f) {
  const auto star = legendre_conjugate(f);
  auto out = legendre_conjugate(star, f.xs, f.ys);
  GridFunction2D trimmed;
  trimmed.xs = f.xs;
  trimmed.ys = f.ys;
  trimmed.values.assign(f.xs.size(), std::vector<double>(f.ys.size()));
  size_t ii = 0;
  for (size_t i = 0; i < f.xs.size(); ++i) {
    while (ii < out.xs.size() && out.xs[ii] < f.xs[i] - 1e-15) ++ii;
    size_t jj = 0;
    for (size_t j = 0; j < f.ys.size(); ++j) {
      while (jj < out.ys.size() && out.ys[jj] < f.ys[j] - 1e-15) ++jj;
      trimmed.values[i][j] = out.values[ii][jj];
    }
  }
  return trimmed;
}

GridFunction1D radial_envelope(const GridFunction1D& phi) {
  phi.validate();
  require(std::fabs(phi.knots.front()) <= 1e-12, "radial_envelope: domain must start at 0");
  auto hull = lower_convex_hull_1d(phi);
  size_t arg = 0;
  for (size_t i = 1; i < hull.size(); ++i)
    if (hull.values[i] < hull.values[arg]) arg = i;
  for (size_t i = 0; i < arg; ++i) hull.values[i] = hull.values[arg];
  return hull;
}

// ---------------------------------------------------------------------------
// Caratheodory LP

json EnvelopeCertificate::to_json() const {
  json combo = json::array();
  for (const auto& [lambda, pt] : combination)
    combo.push_back({{"lambda", lambda}, {"x", pt}});
  return json{{"point", point}, {"value", value}, {"combination", combo}};
}

namespace {

std::optional<EnvelopeCertificate> run_caratheodory(
    const std::vector<std::vector<double>>& points, const std::vector<double>& costs,
    const std::vector<double>& query) {
  const int n = static_cast<int>(query.size());
  const int cols = static_cast<int>(points.size());
  std::vector<std::vector<double>> A(n + 1, std::vector<double>(cols));
  std::vector<double> b(n + 1);
  for (int r = 0; r < n; ++r) {
    for (int j = 0; j < cols; ++j) A[r][j] = points[j][r];
    b[r] = query[r];
  }
  for (int j = 0; j < cols; ++j) A[n][j] = 1.0;
  b[n] = 1.0;

  const auto res = lp::simplex_solve(A, b, costs);
  if (res.status != lp::Status::optimal) return std::nullopt;

  EnvelopeCertificate cert;
  cert.point = query;
  cert.value = res.objective;
  for (int j = 0; j < cols; ++j)
    if (res.x[j] > 1e-11) cert.combination.emplace_back(res.x[j], points[j]);
  return cert;
}

}  // namespace

std::optional<EnvelopeCertificate> caratheodory_envelope_at(const GridFunction1D& f,
                                                            double x) {
  f.validate();
  if (x < f.knots.front() - 1e-12 || x > f.knots.back() + 1e-12) return std::nullopt;
  std::vector<std::vector<double>> pts(f.size());
  for (size_t i = 0; i < f.size(); ++i) pts[i] = {f.knots[i]};
  return run_caratheodory(pts, f.values, {x});
}

std::optional<EnvelopeCertificate> caratheodory_envelope_at(const GridFunction2D& f,
                                                            double x, double y) {
  f.validate();
  std::vector<std::vector<double>> pts;
  std::vector<double> costs;
  pts.reserve(f.xs.size() * f.ys.size());
  for (size_t i = 0; i < f.xs.size(); ++i)
    for (size_t j = 0; j < f.ys.size(); ++j) {
      pts.push_back({f.xs[i], f.ys[j]});
      costs.push_back(f.values[i][j]);
    }
  return run_caratheodory(pts, costs, {x, y});
}

// ---------------------------------------------------------------------------
// Helpers

bool is_convex_grid(const GridFunction1D& f, double tol) {
  const auto s = secant_slopes(f.knots, f.values);
  for (size_t i = 0; i + 1 < s.size(); ++i)
    if (s[i + 1] - s[i] < -tol) return false;
  return true;
}

double grid_tolerance(const GridFunction1D& f, size_t i) {
  const size_t n = f.size();
  const size_t lo = i > 0 ? i - 1 : 0;
  const size_t hi = i + 1 < n ? i + 1 : n - 1;
  double lipschitz = 1.0, spacing = 0.0;
  for (size_t k = lo; k < hi; ++k) {
    const double dx = f.knots[k + 1] - f.knots[k];
    spacing = std::max(spacing, dx);
    lipschitz = std::max(lipschitz, std::fabs(f.values[k + 1] - f.values[k]) / dx);
  }
  return 4.0 * spacing * lipschitz;
}

}  // namespace convkit::envelope
