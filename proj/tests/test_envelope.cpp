#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "convkit/envelope.hpp"
#include "convkit/simplex.hpp"
#include "test_util.hpp"

using namespace convkit;
using namespace convkit::envelope;

namespace {

double double_well(double x) { return (x * x - 1.0) * (x * x - 1.0); }

GridFunction1D add_bumps(const GridFunction1D& f, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 0.5);
  GridFunction1D g = f;
  for (auto& v : g.values) v += U(rng);
  return g;
}

}  // namespace

TEST_CASE("lower hull of the double well") {
  const auto f = GridFunction1D::sample(double_well, -2.0, 2.0, 801);
  const auto hull = lower_convex_hull_1d(f);
  REQUIRE(hull.size() == f.size());
  // zero on [-1, 1], equal to f outside
  for (size_t i = 0; i < f.size(); ++i) {
    const double x = f.knots[i];
    if (std::fabs(x) <= 1.0)
      CHECK(std::fabs(hull.values[i]) <= 1e-12);
    else
      CHECK(hull.values[i] == doctest::Approx(f.values[i]).epsilon(1e-12));
  }
  CHECK(hull.values.back() == doctest::Approx(9.0));
  CHECK(is_convex_grid(hull));
}

TEST_CASE("hull of convex and affine data is the data") {
  const auto parabola = GridFunction1D::sample([](double x) { return x * x; },
                                               -1.0, 1.0, 101);
  const auto h1 = lower_convex_hull_1d(parabola);
  for (size_t i = 0; i < parabola.size(); ++i)
    CHECK(h1.values[i] == doctest::Approx(parabola.values[i]).epsilon(1e-13));

  const auto line = GridFunction1D::sample([](double x) { return -x; }, 0.0, 1.0, 11);
  const auto h2 = lower_convex_hull_1d(line);
  for (size_t i = 0; i < line.size(); ++i)
    CHECK(h2.values[i] == doctest::Approx(line.values[i]));

  GridFunction1D tiny;
  tiny.knots = {0.0};
  tiny.values = {1.0};
  CHECK_THROWS(lower_convex_hull_1d(tiny));
}

TEST_CASE("legendre conjugate closed forms") {
  const auto f = GridFunction1D::sample([](double x) { return 0.5 * x * x; },
                                        -3.0, 3.0, 601);
  const auto star = legendre_conjugate(f);
  for (size_t i = 0; i < star.size(); ++i) {
    const double s = star.knots[i];
    if (std::fabs(s) <= 2.0)
      CHECK(std::fabs(star.values[i] - 0.5 * s * s) <= 1e-4);
  }

  const auto absf = GridFunction1D::sample([](double x) { return std::fabs(x); },
                                           -2.0, 2.0, 401);
  const auto astar = legendre_conjugate(absf);
  for (size_t i = 0; i < astar.size(); ++i) {
    const double s = astar.knots[i];
    if (std::fabs(s) <= 1.0 - 1e-9)
      CHECK(std::fabs(astar.values[i]) <= 1e-12);
    if (s > 1.05) CHECK(astar.values[i] > 0.0);  // grows once past the slope range
  }

  // conjugates are maxima of affine maps, hence convex grid functions
  CHECK(is_convex_grid(star, 1e-9));
  CHECK(is_convex_grid(astar, 1e-9));

  GridFunction1D empty;
  CHECK_THROWS(legendre_conjugate(empty));
}

TEST_CASE("biconjugate equals the hull in one dimension") {
  const auto f = GridFunction1D::sample(double_well, -2.0, 2.0, 801);
  const auto hull = lower_convex_hull_1d(f);
  const auto bicj = biconjugate(f);
  REQUIRE(bicj.size() == f.size());
  double worst = 0.0;
  for (size_t i = 0; i < f.size(); ++i)
    worst = std::max(worst, std::fabs(hull.values[i] - bicj.values[i]));
  CHECK(worst <= 2e-3);   // the cited grid tolerance
  CHECK(worst <= 1e-10);  // the hull-slope grid makes it exact here

  const auto two_wells = GridFunction1D::sample(
      [](double x) { return std::min(x * x, (x - 2.0) * (x - 2.0)); }, -1.0, 3.0, 401);
  const auto h = lower_convex_hull_1d(two_wells);
  const auto b = biconjugate(two_wells);
  for (size_t i = 0; i < two_wells.size(); ++i) {
    CHECK(std::fabs(h.values[i] - b.values[i]) <= 1e-10);
    const double x = two_wells.knots[i];
    if (x >= 0.0 && x <= 2.0) CHECK(std::fabs(b.values[i]) <= 1e-12);  // zero bridge
  }
}

TEST_CASE("biconjugate of a convex bowl is the bowl") {
  const auto bowl = GridFunction2D::sample(
      [](double x, double y) { return x * x + y * y; }, -2.0, 2.0, 81, -2.0, 2.0, 81);
  const auto env = biconjugate(bowl);
  double worst = 0.0;
  for (size_t i = 0; i < bowl.xs.size(); ++i)
    for (size_t j = 0; j < bowl.ys.size(); ++j)
      worst = std::max(worst, std::fabs(env.values[i][j] - bowl.values[i][j]));
  CHECK(worst <= 2e-2);  // one-sided grid slack only
  for (size_t i = 0; i < bowl.xs.size(); ++i)
    for (size_t j = 0; j < bowl.ys.size(); ++j)
      CHECK(env.values[i][j] <= bowl.values[i][j] + 1e-12);
}

TEST_CASE("2-d envelope is convex along every grid line") {
  const auto f = GridFunction2D::sample(
      [](double x, double y) {
        return std::cos(3.0 * x + y) + 0.2 * x * x + 0.4 * y * y;
      },
      -2.0, 2.0, 51, -2.0, 2.0, 51);
  const auto env = biconjugate(f);
  auto convex_line = [](const std::vector<double>& ks, const std::vector<double>& vs) {
    for (size_t i = 0; i + 2 < ks.size(); ++i) {
      const double s0 = (vs[i + 1] - vs[i]) / (ks[i + 1] - ks[i]);
      const double s1 = (vs[i + 2] - vs[i + 1]) / (ks[i + 2] - ks[i + 1]);
      if (s1 - s0 < -1e-9) return false;
    }
    return true;
  };
  for (size_t i = 0; i < env.xs.size(); ++i) CHECK(convex_line(env.ys, env.values[i]));
  for (size_t j = 0; j < env.ys.size(); ++j) {
    std::vector<double> col(env.xs.size());
    for (size_t i = 0; i < env.xs.size(); ++i) col[i] = env.values[i][j];
    CHECK(convex_line(env.xs, col));
  }
}

TEST_CASE("2-d envelope is midpoint convex along random segments") {
  const auto f = GridFunction2D::sample(
      [](double x, double y) {
        return std::sin(2.0 * x) * std::cos(y) + 0.3 * (x * x + y * y);
      },
      -2.0, 2.0, 61, -2.0, 2.0, 61);
  const auto env = biconjugate(f);
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> idx(0, 30);
  for (int rep = 0; rep < 300; ++rep) {
    const int i1 = 2 * idx(rng), j1 = 2 * idx(rng);
    const int i2 = 2 * idx(rng), j2 = 2 * idx(rng);
    const int im = (i1 + i2) / 2, jm = (j1 + j2) / 2;
    CHECK(env.values[im][jm] <=
          0.5 * (env.values[i1][j1] + env.values[i2][j2]) + 1e-9);
  }
}

TEST_CASE("envelope invariants on random data") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    const double a = U(rng), b = U(rng), c = 2.0 * U(rng);
    auto fn = [&](double x) {
      return std::sin(3.0 * x + a) + b * x * x + c * std::fabs(x - 0.3);
    };
    const auto f = GridFunction1D::sample(fn, -2.0, 2.0, 301);
    const auto env = lower_convex_hull_1d(f);
    // below f, convex, idempotent
    for (size_t i = 0; i < f.size(); ++i)
      CHECK(env.values[i] <= f.values[i] + 1e-12);
    CHECK(is_convex_grid(env));
    const auto env2 = lower_convex_hull_1d(env);
    for (size_t i = 0; i < f.size(); ++i)
      CHECK(std::fabs(env2.values[i] - env.values[i]) <= 1e-10);
    // biconjugate fixed point
    const auto bicj = biconjugate(f);
    const auto bicj2 = biconjugate(bicj);
    for (size_t i = 0; i < f.size(); ++i)
      CHECK(std::fabs(bicj2.values[i] - bicj.values[i]) <= 1e-10);
    // monotonicity: f <= g implies env f <= env g
    const auto g = add_bumps(f, rng);
    const auto envg = lower_convex_hull_1d(g);
    for (size_t i = 0; i < f.size(); ++i)
      CHECK(env.values[i] <= envg.values[i] + 1e-12);
    // order-reversing conjugation on a shared slope grid
    std::vector<double> slopes;
    for (int k = -40; k <= 40; ++k) slopes.push_back(0.25 * k);
    const auto fstar = legendre_conjugate(f, slopes);
    const auto gstar = legendre_conjugate(g, slopes);
    for (size_t i = 0; i < fstar.size(); ++i) {
      // padded end slopes may differ between the two; compare shared knots
      if (i < gstar.size() && fstar.knots[i] == gstar.knots[i])
        CHECK(fstar.values[i] >= gstar.values[i] - 1e-12);
    }
  }
}

TEST_CASE("translation equivariance of the hull") {
  const auto f = GridFunction1D::sample(double_well, -2.0, 2.0, 201);
  const double shift = 0.7;
  GridFunction1D g = f;
  for (auto& k : g.knots) k += shift;
  const auto envf = lower_convex_hull_1d(f);
  const auto envg = lower_convex_hull_1d(g);
  for (size_t i = 0; i < f.size(); ++i)
    CHECK(envg.values[i] == doctest::Approx(envf.values[i]).epsilon(1e-12));
}

TEST_CASE("caratheodory certificates") {
  const auto f = GridFunction1D::sample(double_well, -2.0, 2.0, 401);
  const auto cert = caratheodory_envelope_at(f, 0.0);
  REQUIRE(cert.has_value());
  CHECK(std::fabs(cert->value) <= 1e-9);
  REQUIRE(cert->combination.size() == 2);
  double lsum = 0.0, xsum = 0.0, fsum = 0.0;
  for (const auto& [lambda, pt] : cert->combination) {
    CHECK(lambda >= -1e-12);
    CHECK(std::fabs(std::fabs(pt[0]) - 1.0) <= 1e-9);  // supported at +-1
    lsum += lambda;
    xsum += lambda * pt[0];
    fsum += lambda * f.value_at(pt[0]);
  }
  CHECK(lsum == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::fabs(xsum) <= 1e-9);
  CHECK(std::fabs(fsum - cert->value) <= 1e-9);

  // convex function at a knot: single support point, value f(x)
  const auto bowl = GridFunction1D::sample([](double x) { return x * x; },
                                           -1.0, 1.0, 101);
  const auto single = caratheodory_envelope_at(bowl, bowl.knots[30]);
  REQUIRE(single.has_value());
  CHECK(single->combination.size() == 1);
  CHECK(single->value == doctest::Approx(bowl.values[30]).epsilon(1e-9));

  // outside the hull of the grid: infeasible
  CHECK(!caratheodory_envelope_at(bowl, 3.0).has_value());
}

TEST_CASE("caratheodory on the 2-d counterexample window") {
  const auto f = GridFunction2D::sample(
      [](double x, double y) { return std::sqrt(x * x + std::exp(-y * y)); }, -2.0,
      2.0, 41, -16.0, 16.0, 81);
  const auto cert = caratheodory_envelope_at(f, 0.0, 0.0);
  REQUIRE(cert.has_value());
  CHECK(cert->value <= 1e-8);  // well under the window-16 bound of 0.15
  CHECK(cert->combination.size() <= 3);
  for (const auto& [lambda, pt] : cert->combination) {
    CHECK(std::fabs(pt[0]) <= 0.2);  // support hugs the x = 0 axis
    // far out along y; the simplex stops once reduced costs drop under its
    // pivot tolerance, which the profile reaches near |y| ~ 6.4
    CHECK(std::fabs(pt[1]) >= 6.0);
  }
}

TEST_CASE("radial envelope profiles") {
  const auto shifted = GridFunction1D::sample(
      [](double r) { return (r - 1.0) * (r - 1.0); }, 0.0, 3.0, 301);
  const auto psi = radial_envelope(shifted);
  for (size_t i = 0; i < psi.size(); ++i) {
    const double r = psi.knots[i];
    if (r <= 1.0)
      CHECK(std::fabs(psi.values[i]) <= 1e-12);
    else
      CHECK(psi.values[i] == doctest::Approx(shifted.values[i]).epsilon(1e-12));
  }

  const auto line = GridFunction1D::sample([](double r) { return r; }, 0.0, 2.0, 51);
  const auto psi2 = radial_envelope(line);
  for (size_t i = 0; i < psi2.size(); ++i)
    CHECK(psi2.values[i] == doctest::Approx(line.values[i]));

  const auto well = GridFunction1D::sample(double_well, 0.0, 2.0, 201);
  const auto psi3 = radial_envelope(well);
  for (size_t i = 0; i < psi3.size(); ++i) {
    const double r = psi3.knots[i];
    if (r <= 1.0)
      CHECK(std::fabs(psi3.values[i]) <= 1e-12);
    else
      CHECK(psi3.values[i] == doctest::Approx(well.values[i]).epsilon(1e-12));
    if (i > 0) CHECK(psi3.values[i] >= psi3.values[i - 1] - 1e-12);  // nondecreasing
  }
  CHECK(is_convex_grid(psi3));
}

TEST_CASE("grid io round-trips") {
  const auto f = GridFunction1D::sample(double_well, -1.0, 1.0, 21);
  std::stringstream csv;
  f.to_csv(csv);
  const auto back = GridFunction1D::from_csv(csv);
  REQUIRE(back.size() == f.size());
  for (size_t i = 0; i < f.size(); ++i) {
    CHECK(back.knots[i] == f.knots[i]);
    CHECK(back.values[i] == f.values[i]);
  }
  const auto jf = GridFunction1D::from_json(f.to_json());
  CHECK(jf.values == f.values);

  const auto g = GridFunction2D::sample(
      [](double x, double y) { return x + y; }, 0.0, 1.0, 4, 0.0, 1.0, 5);
  const auto jg = GridFunction2D::from_json(g.to_json());
  CHECK(jg.values == g.values);
}

TEST_CASE("dense simplex basics") {
  // max x + y st x <= 2, y <= 3  ==  min -x - y with slacks
  const std::vector<std::vector<double>> A = {{1, 0, 1, 0}, {0, 1, 0, 1}};
  const auto res = lp::simplex_solve(A, {2, 3}, {-1, -1, 0, 0});
  CHECK(res.status == lp::Status::optimal);
  CHECK(res.objective == doctest::Approx(-5.0));
  CHECK(res.x[0] == doctest::Approx(2.0));
  CHECK(res.x[1] == doctest::Approx(3.0));

  // infeasible: x1 + x2 = -1 with x >= 0
  const auto bad = lp::simplex_solve({{1, 1}}, {-1}, {1, 1});
  CHECK(bad.status == lp::Status::infeasible);

  // unbounded: min -x st x - y = 0
  const auto unb = lp::simplex_solve({{1, -1}}, {0}, {-1, 0});
  CHECK(unb.status == lp::Status::unbounded);

  // inequality wrapper: min a st a >= 3, a >= -1
  const auto ineq = lp::solve_min_inequality({1.0}, {{1.0}, {1.0}}, {3.0, -1.0});
  CHECK(ineq.status == lp::Status::optimal);
  CHECK(ineq.objective == doctest::Approx(3.0));
  CHECK(ineq.a[0] == doctest::Approx(3.0));
}
