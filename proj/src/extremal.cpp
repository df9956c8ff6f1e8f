#include "convkit/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "convkit/simplex.hpp"

namespace convkit::extremal {

namespace {

constexpr double kLead = 2.0;  // pinned leading coefficient a_N

std::vector<double> chebyshev_lobatto(int count, double lo, double hi) {
  std::vector<double> pts(count);
  for (int k = 0; k < count; ++k) {
    const double c = std::cos(M_PI * k / (count - 1));
    pts[count - 1 - k] = lo + (hi - lo) * 0.5 * (1.0 - c);
  }
  return pts;
}

// scan + golden polish for the global minimum of g on [0, T]
std::pair<double, double> scan_min(const std::function<double(double)>& g, double T,
                                   int points) {
  double best_t = 0.0, best_v = g(0.0);
  for (int i = 1; i <= points; ++i) {
    const double t = T * i / points;
    const double v = g(t);
    if (v < best_v) {
      best_v = v;
      best_t = t;
    }
  }
  const double step = T / points;
  const double lo = std::max(0.0, best_t - step);
  const double hi = std::min(T, best_t + step);
  const double t = convkit::golden_min(g, lo, hi, 80);
  const double v = g(t);
  return v < best_v ? std::pair{t, v} : std::pair{best_t, best_v};
}

}  // namespace

EvenPolynomial::EvenPolynomial(int N, std::vector<double> a)
    : degree(N), coeffs(std::move(a)) {
  if (N < 2 || N % 2 != 0)
    throw std::invalid_argument("EvenPolynomial: degree must be a positive even integer");
  if (static_cast<int>(coeffs.size()) != N / 2)
    throw std::invalid_argument("EvenPolynomial: need N/2 coefficients a_2..a_N");
}

double EvenPolynomial::operator()(double t) const {
  const double u = t * t;
  double acc = 0.0;
  for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k)
    acc = acc * u + coeffs[k];
  return acc * u;
}

double EvenPolynomial::second_derivative(double t) const {
  double acc = 0.0;
  for (size_t k = 0; k < coeffs.size(); ++k) {
    const int i = 2 * static_cast<int>(k) + 2;
    acc += coeffs[k] * i * (i - 1) * std::pow(t, i - 2);
  }
  return acc;
}

double EvenPolynomial::max_abs_coeff() const {
  double m = 0.0;
  for (double c : coeffs) m = std::max(m, std::fabs(c));
  return m;
}

EvenPolynomial ExtremalResult::polynomial() const {
  std::vector<double> a = coefficients;
  a.push_back(kLead);
  return EvenPolynomial(N, std::move(a));
}

json ExtremalResult::to_json() const {
  json coeff = json::object();
  for (size_t k = 0; k < coefficients.size(); ++k)
    coeff["a" + std::to_string(2 * k + 2)] = coefficients[k];
  coeff["a" + std::to_string(N)] = kLead;
  return json{{"N", N},
              {"t0", t0},
              {"q", q},
              {"K", K},
              {"coefficients", coeff},
              {"grid", {{"T", T}, {"density", grid_density}}},
              {"diagnostics", diagnostics}};
}

ExtremalResult solve_extremal(const ExtremalProblem& problem) {
  if (problem.N < 4 || problem.N % 2 != 0)
    throw std::invalid_argument("solve_extremal: N must be an even integer >= 4");
  if (!(problem.t0 > 0.0)) throw std::invalid_argument("solve_extremal: t0 must be positive");

  const int N = problem.N;
  const double t0 = problem.t0;
  const int k = N / 2 - 1;  // free coefficients a_2..a_{N-2}
  std::vector<int> powers(k);
  for (int i = 0; i < k; ++i) powers[i] = 2 * i + 2;

  std::vector<double> c(k);
  for (int i = 0; i < k; ++i) c[i] = std::pow(t0, powers[i]);

  double T = std::max({2.0, 2.0 * t0});
  std::set<double> extra;  // exchange points
  std::vector<double> a(k, 0.0);
  int rounds = 0, lp_iterations = 0, exchange_points = 0;
  std::vector<int> active;

  auto value_at = [&](double t) {
    double p = kLead * std::pow(t, N);
    for (int i = 0; i < k; ++i) p += a[i] * std::pow(t, powers[i]);
    return p;
  };
  auto second_at = [&](double t) {
    double p = kLead * N * (N - 1) * std::pow(t, N - 2);
    for (int i = 0; i < k; ++i)
      p += a[i] * powers[i] * (powers[i] - 1) * std::pow(t, powers[i] - 2);
    return p;
  };

  while (rounds < problem.max_rounds) {
    ++rounds;
    std::vector<double> grid = chebyshev_lobatto(problem.grid_density, 0.0, T);
    grid.push_back(t0);
    for (double t : extra) grid.push_back(t);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double x, double y) { return std::fabs(x - y) < 1e-13; }),
               grid.end());

    std::vector<std::vector<double>> G;
    std::vector<double> h;
    std::vector<std::pair<char, double>> row_info;  // ('p'|'c', t)
    for (double t : grid) {
      std::vector<double> row(k);
      bool nonzero = false;
      for (int i = 0; i < k; ++i) {
        row[i] = std::pow(t, powers[i]);
        nonzero = nonzero || row[i] != 0.0;
      }
      if (nonzero) {  // p(t) >= 0  <=>  sum a_i t^i >= -2 t^N
        G.push_back(row);
        h.push_back(-kLead * std::pow(t, N));
        row_info.emplace_back('p', t);
      }
      std::vector<double> row2(k);
      nonzero = false;
      for (int i = 0; i < k; ++i) {
        row2[i] = powers[i] * (powers[i] - 1) * std::pow(t, powers[i] - 2);
        nonzero = nonzero || row2[i] != 0.0;
      }
      if (nonzero) {  // p''(t) >= 0
        G.push_back(row2);
        h.push_back(-kLead * N * (N - 1) * std::pow(t, N - 2));
        row_info.emplace_back('c', t);
      }
    }

    const auto lp = lp::solve_min_inequality(c, G, h);
    // a = 0 is always feasible and the objective is bounded below by
    // -2 t0^N (p(t0) >= 0 is among the constraints), so the LP must land on
    // an optimum.
    if (lp.status != lp::Status::optimal)
      throw std::logic_error("solve_extremal: LP did not reach an optimum");
    a = lp.a;
    lp_iterations += lp.iterations;
    active.clear();
    for (int r : lp.active_rows) active.push_back(r);

    // grow the window if the root bound moved past it
    double max_a = 0.0;
    for (double v : a) max_a = std::max(max_a, std::fabs(v));
    const double bound = 1.0 + max_a / kLead;
    if (bound > T * (1.0 + 1e-12)) {
      T = std::max(bound, 1.5 * T);
      continue;
    }

    if (!problem.exchange) {
      // report the binding grid points
      ExtremalResult res;
      res.N = N;
      res.t0 = t0;
      res.coefficients = a;
      res.q = value_at(t0);
      res.K = kLead * std::pow(t0, N) / res.q;
      res.T = T;
      res.grid_density = problem.grid_density;
      for (int r : active) res.active_ts.push_back(row_info[r].second);
      res.diagnostics = json{{"rounds", rounds},
                             {"lp_iterations", lp_iterations},
                             {"exchange_points", exchange_points},
                             {"exchange", false}};
      if (!(res.q > 1e-6))
        throw std::logic_error("solve_extremal: optimal value lost strict positivity");
      return res;
    }

    // exchange: hunt for interior violations of p >= 0 and p'' >= 0
    const int scan = 8 * problem.grid_density;
    const auto [tp, vp] = scan_min(value_at, T, scan);
    const auto [tc, vc] = scan_min(second_at, T, scan);
    const double scale = 1.0 + max_a;
    bool added = false;
    if (vp < -1e-11 * scale) {
      extra.insert(tp);
      added = true;
      ++exchange_points;
    }
    if (vc < -1e-11 * scale) {
      extra.insert(tc);
      added = true;
      ++exchange_points;
    }
    if (!added) {
      ExtremalResult res;
      res.N = N;
      res.t0 = t0;
      res.coefficients = a;
      res.q = value_at(t0);
      res.K = kLead * std::pow(t0, N) / res.q;
      res.T = T;
      res.grid_density = problem.grid_density;
      for (int r : active) res.active_ts.push_back(row_info[r].second);
      res.diagnostics = json{{"rounds", rounds},
                             {"lp_iterations", lp_iterations},
                             {"exchange_points", exchange_points},
                             {"exchange", true}};
      if (!(res.q > 1e-6))
        throw std::logic_error("solve_extremal: optimal value lost strict positivity");
      return res;
    }
  }
  throw std::runtime_error("solve_extremal: exchange did not settle");
}

MembershipReport membership_check(const EvenPolynomial& p) {
  MembershipReport rep;
  const double lead = p.leading();
  double T;
  if (lead > 0.0) {
    T = 1.0 + p.max_abs_coeff() / lead;  // Cauchy bound for p and p''
  } else if (p.max_abs_coeff() == 0.0) {
    rep.member = true;  // zero polynomial
    return rep;
  } else {
    T = 1.0 + p.max_abs_coeff();  // negative/zero leading: scan far enough
    T *= 4.0;
  }

  auto val = [&](double t) { return p(t); };
  auto second = [&](double t) { return p.second_derivative(t); };
  std::tie(rep.argmin_p, rep.min_p) = scan_min(val, T, 65536);
  std::tie(rep.argmin_pp, rep.min_pp) = scan_min(second, T, 65536);

  rep.member = rep.min_p >= -1e-9 && rep.min_pp >= -1e-9;
  if (rep.min_p < -1e-9) {
    rep.violation = "nonnegative";
    rep.witness_t = rep.argmin_p;
  } else if (rep.min_pp < -1e-9) {
    rep.violation = "convex";
    rep.witness_t = rep.argmin_pp;
  }
  return rep;
}

json ScaleReport::to_json() const {
  return json{{"N", N},
              {"t0", t0s},
              {"q", qs},
              {"q_over_t0_pow_N", normalized},
              {"max_rel_dev", max_rel_dev}};
}

ScaleReport scale_invariance_check(int N, const std::vector<double>& t0s,
                                   int grid_density) {
  if (t0s.empty()) throw std::invalid_argument("scale_invariance_check: empty t0 list");
  ScaleReport rep;
  rep.N = N;
  for (double t0 : t0s) {
    ExtremalProblem prob;
    prob.N = N;
    prob.t0 = t0;
    prob.grid_density = grid_density;
    const auto res = solve_extremal(prob);
    rep.t0s.push_back(t0);
    rep.qs.push_back(res.q);
    rep.normalized.push_back(res.q / std::pow(t0, N));
  }
  double lo = rep.normalized.front(), hi = lo;
  for (double v : rep.normalized) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  rep.max_rel_dev = (hi - lo) / std::max(std::fabs(hi), 1e-300);
  return rep;
}

json GapReport::to_json() const {
  return json{{"q", q},
              {"min_gap", min_gap},
              {"witness_z", witness_z},
              {"witness_h", witness_h},
              {"sound", sound},
              {"samples", samples}};
}

GapReport gap_witness(const normcore::NormDescriptor& poly_norm, double t0,
                      const SamplerConfig& cfg) {
  if (poly_norm.kind() != normcore::NormDescriptor::Kind::poly)
    throw std::invalid_argument("gap_witness: need a certified polynomial norm");
  const auto& form = poly_norm.form();
  const int d = form.dimension();
  const int N = form.degree();

  ExtremalProblem prob;
  prob.N = N;
  prob.t0 = t0;
  const double q = solve_extremal(prob).q;

  GapReport rep;
  rep.q = q;
  rep.min_gap = std::numeric_limits<double>::infinity();

  const double radii[] = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> zp(d), zm(d);
  int used = 0;
  for (int kk = 0; kk < cfg.samples; ++kk) {
    const auto raw = gaussian_ld_point(kk, 2 * d, cfg.seed);
    std::vector<double> z(raw.begin(), raw.begin() + d);
    std::vector<double> h(raw.begin() + d, raw.end());
    const double hn = std::pow(form.eval_diagonal(h), 1.0 / N);
    if (!(hn > 1e-12)) continue;
    for (auto& v : h) v /= hn;  // |h| = 1 in the polynomial norm
    const double rz = radii[kk % (sizeof(radii) / sizeof(double))];
    for (auto& v : z) v *= rz;
    for (int i = 0; i < d; ++i) {
      zp[i] = z[i] + t0 * h[i];
      zm[i] = z[i] - t0 * h[i];
    }
    const double gap = form.eval_diagonal(zp) + form.eval_diagonal(zm) -
                       2.0 * form.eval_diagonal(z);
    ++used;
    if (gap < rep.min_gap) {
      rep.min_gap = gap;
      rep.witness_z = z;
      rep.witness_h = h;
    }
  }
  rep.samples = used;
  rep.sound = rep.min_gap >= q - 1e-9;
  return rep;
}

}  // namespace convkit::extremal
