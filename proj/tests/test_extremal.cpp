#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "convkit/extremal.hpp"
#include "convkit/normcore.hpp"

using namespace convkit;
using namespace convkit::extremal;

TEST_CASE("degree-4 problem collapses to the vertex a2 = 0") {
  ExtremalProblem prob;
  prob.N = 4;
  prob.t0 = 1.0;
  const auto res = solve_extremal(prob);
  CHECK(res.q == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::fabs(res.coefficients[0]) <= 1e-9);  // LP vertex, exactly zero
  CHECK(res.K == doctest::Approx(1.0).epsilon(1e-9));

  prob.t0 = 2.0;
  const auto scaled = solve_extremal(prob);
  CHECK(scaled.q == doctest::Approx(32.0).epsilon(1e-9));
}

TEST_CASE("degree-6 problem reproduces the tangency optimum") {
  ExtremalProblem prob;
  prob.N = 6;
  prob.t0 = 1.0;
  const auto res = solve_extremal(prob);
  CHECK(res.q == doctest::Approx(7.0 / 6.0).epsilon(2e-3 * 6 / 7));
  CHECK(res.K == doctest::Approx(12.0 / 7.0).epsilon(3e-3 * 7 / 12));
  CHECK(res.coefficients[1] == doctest::Approx(-5.0 / 3.0).epsilon(5e-3 * 3 / 5));
  CHECK(res.coefficients[0] == doctest::Approx(5.0 / 6.0).epsilon(5e-3 * 6 / 5));
  CHECK(res.q > 1e-6);

  // the optimum binds p'' tangentially at t = 1/sqrt(6)
  const auto poly = res.polynomial();
  const double tstar = 1.0 / std::sqrt(6.0);
  CHECK(std::fabs(poly.second_derivative(tstar)) <= 1e-3);

  // exchange rounds only shrink the feasible set: q may only move up
  ExtremalProblem coarse = prob;
  coarse.exchange = false;
  const auto base = solve_extremal(coarse);
  CHECK(res.q >= base.q - 1e-12);
  CHECK(std::fabs(res.q - base.q) <= 1e-4);  // and the base grid is converged

  ExtremalProblem dense = coarse;
  dense.grid_density = 2 * coarse.grid_density;
  const auto fine = solve_extremal(dense);
  CHECK(std::fabs(fine.q - base.q) <= 1e-4);
}

TEST_CASE("scale invariance of the normalized value") {
  for (int N : {4, 6}) {
    const auto rep = scale_invariance_check(N, {0.5, 1.0, 2.0});
    CHECK(rep.max_rel_dev <= 1e-6);
    const double ref = N == 4 ? 2.0 : 7.0 / 6.0;
    for (double v : rep.normalized) CHECK(v == doctest::Approx(ref).epsilon(1e-4));
  }
  const auto single = scale_invariance_check(4, {0.7});
  CHECK(single.max_rel_dev == 0.0);

  CHECK_THROWS(solve_extremal({.N = 5, .t0 = 1.0}));
  CHECK_THROWS(solve_extremal({.N = 4, .t0 = -1.0}));
}

TEST_CASE("membership in the convex nonnegative class") {
  CHECK(membership_check(EvenPolynomial(4, {0.0, 2.0})).member);

  const auto touch = membership_check(EvenPolynomial(6, {5.0 / 6.0, -5.0 / 3.0, 2.0}));
  CHECK(touch.member);
  CHECK(touch.min_pp >= -1e-9);
  CHECK(touch.min_pp <= 1e-6);  // p'' touches zero at the binding optimum
  CHECK(touch.argmin_pp == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-3));

  const auto bad = membership_check(EvenPolynomial(4, {-3.0, 1.0}));
  CHECK(!bad.member);
  CHECK(bad.violation == "nonnegative");
  EvenPolynomial bp(4, {-3.0, 1.0});
  CHECK(bp(bad.witness_t) < 0.0);
  CHECK(bp(1.0) == doctest::Approx(-2.0));

  // closed under convex combination
  EvenPolynomial m1(6, {5.0 / 6.0, -5.0 / 3.0, 2.0}), m2(6, {0.0, 0.0, 2.0});
  for (double lam : {0.25, 0.5, 0.75}) {
    std::vector<double> mix(3);
    for (int i = 0; i < 3; ++i)
      mix[i] = lam * m1.coeffs[i] + (1.0 - lam) * m2.coeffs[i];
    CHECK(membership_check(EvenPolynomial(6, mix)).member);
  }
}

TEST_CASE("sampled gaps never undercut the relaxation value") {
  SamplerConfig cfg;
  cfg.samples = 2000;
  {
    const auto norm = normcore::NormDescriptor::poly(normcore::sum_of_even_powers_form(4, 3));
    const auto rep = gap_witness(norm, 1.0, cfg);
    CHECK(rep.sound);
    CHECK(rep.q == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(rep.min_gap >= 2.0 - 1e-9);
    CHECK(rep.min_gap <= 2.0 + 1e-6);  // equality approached at z = 0
    CHECK(normcore::NormDescriptor::lp(2.0, 3).eval(rep.witness_z) <= 1e-6);
  }
  {
    const auto norm = normcore::NormDescriptor::poly(normcore::sum_of_even_powers_form(6, 3));
    const auto rep = gap_witness(norm, 1.0, cfg);
    CHECK(rep.sound);
    CHECK(rep.q == doctest::Approx(7.0 / 6.0).epsilon(2e-3));
    // the true minimum over this norm is 2, strictly above the relaxation
    CHECK(rep.min_gap >= 2.0 - 1e-9);
  }
}

TEST_CASE("extremal results serialize") {
  ExtremalProblem prob;
  prob.N = 6;
  prob.t0 = 1.0;
  const auto res = solve_extremal(prob);
  const auto j = res.to_json();
  CHECK(j.at("N") == 6);
  CHECK(j.at("coefficients").at("a6") == 2.0);
  CHECK(j.at("grid").at("density") == 2048);
  CHECK(j.at("q").get<double>() > 0.0);
}
