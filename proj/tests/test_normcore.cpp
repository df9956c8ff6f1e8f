#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "convkit/normcore.hpp"
#include "test_util.hpp"

using namespace convkit;
using namespace convkit::normcore;
using testutil::close_rel;
using testutil::random_vec;

namespace {

SymmetricForm random_quartic(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::map<std::vector<int>, double> monos;
  // all exponent vectors of total degree 4 over d variables
  std::function<void(std::vector<int>&, int, int)> gen = [&](std::vector<int>& e,
                                                             int i, int left) {
    if (i == d - 1) {
      e[i] = left;
      monos[e] = U(rng);
      return;
    }
    for (int k = 0; k <= left; ++k) {
      e[i] = k;
      gen(e, i + 1, left - k);
    }
  };
  std::vector<int> e(d);
  gen(e, 0, 4);
  return polarize(monos, 4, d);
}

}  // namespace

TEST_CASE("lp, sup and polynomial norms evaluate the cited values") {
  const auto l4 = NormDescriptor::lp(4.0, 2);
  CHECK(l4.eval({1.0, 1.0}) == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-12));

  const auto sup = NormDescriptor::sup(2);
  CHECK(sup.eval({0.3, -0.9}) == doctest::Approx(0.9));

  const auto poly = NormDescriptor::poly(sum_of_even_powers_form(4, 2));
  CHECK(poly.eval({1.0, 1.0}) ==
        doctest::Approx(l4.eval({1.0, 1.0})).epsilon(1e-12));

  CHECK(l4.eval({0.0, 0.0}) == 0.0);
  CHECK_THROWS(l4.eval({1.0, 2.0, 3.0}));  // dimension mismatch
  CHECK_THROWS(NormDescriptor::lp(0.5, 2));
}

TEST_CASE("multilinear evaluation matches the hand-computed cases") {
  // P(x) = x^2 on R: A(u, v) = uv
  SymmetricForm sq(2, 1);
  sq.set_term({0, 0}, 1.0);
  std::vector<std::vector<double>> args = {{1.0}, {1.0}};
  CHECK(sq.eval(args) == doctest::Approx(1.0));

  // P = sum x_i^4: A(x,x,h,h) = sum x_i^2 h_i^2
  const auto quartic = sum_of_even_powers_form(4, 2);
  CHECK(quartic.eval_mixed({1.0, 0.0}, {0.0, 1.0}, 2) == doctest::Approx(0.0));
  CHECK(quartic.eval_mixed({1.0, 1.0}, {1.0, 1.0}, 2) == doctest::Approx(2.0));

  std::vector<std::vector<double>> four = {
      {1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {0.0, 1.0}};
  CHECK(quartic.eval(four) == doctest::Approx(0.0));

  CHECK_THROWS(quartic.eval(args));  // wrong argument count
}

TEST_CASE("polarization reconstructs the polynomial") {
  // P(x) = x^2
  const auto sq = polarize({{{2}, 1.0}}, 2, 1);
  std::vector<std::vector<double>> uv = {{3.0}, {5.0}};
  CHECK(sq.eval(uv) == doctest::Approx(15.0));

  // P(x) = x1^2 x2^2: A_{1122} = 1/6, diagonal P(1,2) = 4
  const auto cross = polarize({{{2, 2}, 1.0}}, 4, 2);
  CHECK(cross.terms().at({0, 0, 1, 1}) == doctest::Approx(1.0 / 6.0));
  CHECK(cross.eval_diagonal({1.0, 2.0}) == doctest::Approx(4.0));

  // P = sum x_i^4: A(x,x,h,h) = sum x_i^2 h_i^2
  const auto quartic = polarize({{{4, 0}, 1.0}, {{0, 4}, 1.0}}, 4, 2);
  CHECK(quartic.eval_mixed({1.0, 2.0}, {3.0, -1.0}, 2) ==
        doctest::Approx(1.0 * 9.0 + 4.0 * 1.0));

  CHECK_THROWS(polarize({{{3, 0}, 1.0}}, 4, 2));  // not 4-homogeneous
}

TEST_CASE("polarization round-trip on random quartics") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 5; ++rep) {
    const int d = 2 + rep % 2;
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::map<std::vector<int>, double> monos;
    std::function<void(std::vector<int>&, int, int)> gen =
        [&](std::vector<int>& e, int i, int left) {
          if (i == d - 1) {
            e[i] = left;
            monos[e] = U(rng);
            return;
          }
          for (int k = 0; k <= left; ++k) {
            e[i] = k;
            gen(e, i + 1, left - k);
          }
        };
    std::vector<int> e(d);
    gen(e, 0, 4);
    const auto form = polarize(monos, 4, d);
    for (int pt = 0; pt < 100; ++pt) {
      const auto x = random_vec(rng, d);
      double direct = 0.0;
      for (const auto& [expo, coeff] : monos) {
        double term = coeff;
        for (int i = 0; i < d; ++i)
          for (int k = 0; k < expo[i]; ++k) term *= x[i];
        direct += term;
      }
      CHECK(close_rel(form.eval_diagonal(x), direct, 1e-9));
    }
  }
}

TEST_CASE("permutation invariance of the generic evaluation") {
  std::mt19937_64 rng(11);
  const auto form = random_quartic(rng, 3);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<std::vector<double>> args;
    for (int k = 0; k < 4; ++k) args.push_back(random_vec(rng, 3));
    const double base = form.eval(args);
    auto shuffled = args;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(close_rel(form.eval(shuffled), base, 1e-12));
  }
  // generic path agrees with the mixed-slot path
  for (int rep = 0; rep < 10; ++rep) {
    const auto x = random_vec(rng, 3), h = random_vec(rng, 3);
    std::vector<std::vector<double>> args = {x, x, h, h};
    CHECK(close_rel(form.eval(args), form.eval_mixed(x, h, 2), 1e-11));
  }
}

TEST_CASE("binomial expansion of P(x + t h)") {
  SymmetricForm pow4(4, 1);
  pow4.set_term({0, 0, 0, 0}, 1.0);
  const auto c = pow4.binomial_coefficients({1.0}, {1.0});
  REQUIRE(c.size() == 5);
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] == doctest::Approx(4.0));
  CHECK(c[2] == doctest::Approx(6.0));
  CHECK(c[3] == doctest::Approx(4.0));
  CHECK(c[4] == doctest::Approx(1.0));

  const auto quartic = sum_of_even_powers_form(4, 2);
  const auto cx = quartic.binomial_coefficients({1.0, 0.0}, {0.0, 1.0});
  CHECK(cx[0] == doctest::Approx(1.0));
  CHECK(cx[1] == doctest::Approx(0.0));
  CHECK(cx[2] == doctest::Approx(0.0));
  CHECK(cx[3] == doctest::Approx(0.0));
  CHECK(cx[4] == doctest::Approx(1.0));

  const auto cc = quartic.binomial_coefficients({1.0, 0.0}, {1.0, 0.0});
  CHECK(cc[1] == doctest::Approx(4.0));
  CHECK(cc[2] == doctest::Approx(6.0));

  // consistency: sum c_i t^i reproduces P(x + t h)
  std::mt19937_64 rng(13);
  const auto form = random_quartic(rng, 2);
  for (int rep = 0; rep < 5; ++rep) {
    const auto x = random_vec(rng, 2), h = random_vec(rng, 2);
    const auto coeffs = form.binomial_coefficients(x, h);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int k = 0; k < 20; ++k) {
      const double t = U(rng);
      std::vector<double> pt(2);
      for (int i = 0; i < 2; ++i) pt[i] = x[i] + t * h[i];
      double horner = 0.0;
      for (int i = 4; i >= 0; --i) horner = horner * t + coeffs[i];
      CHECK(close_rel(horner, form.eval_diagonal(pt), 1e-9));
    }
  }
}

TEST_CASE("homogeneous expansion terms at a base point") {
  const auto form = sum_of_even_powers_form(4, 2);
  std::mt19937_64 rng(17);
  const std::vector<double> x = {1.0, 0.0};  // unit in its own norm
  // P(x + t h) = 1 + t^N + sum_i t^i P_{i,x}(h) at unit x, h
  std::vector<HomogeneousTerm> terms;
  for (int i = 1; i < 4; ++i) terms.emplace_back(form, x, i);
  for (int rep = 0; rep < 10; ++rep) {
    auto h = random_vec(rng, 2);
    const double hn = std::pow(form.eval_diagonal(h), 0.25);
    for (auto& v : h) v /= hn;
    std::uniform_real_distribution<double> T(-1.5, 1.5);
    const double t = T(rng);
    std::vector<double> pt = {x[0] + t * h[0], x[1] + t * h[1]};
    double series = 1.0 + std::pow(t, 4);
    for (int i = 1; i < 4; ++i) series += std::pow(t, i) * terms[i - 1](h);
    CHECK(close_rel(series, form.eval_diagonal(pt), 1e-10));
    // degree-i homogeneity
    std::uniform_real_distribution<double> S(0.25, 3.0);
    const double s = S(rng);
    std::vector<double> sh = {s * h[0], s * h[1]};
    for (int i = 1; i < 4; ++i)
      CHECK(close_rel(terms[i - 1](sh), std::pow(s, i) * terms[i - 1](h), 1e-12));
  }
  CHECK_THROWS(HomogeneousTerm(form, x, 0));
  CHECK_THROWS(HomogeneousTerm(form, x, 4));
}

TEST_CASE("separation witness on the euclidean sphere") {
  const auto quartic = sum_of_even_powers_form(4, 2);
  const auto l2 = NormDescriptor::lp(2.0, 2);
  const auto rep = is_separating(quartic, l2);
  CHECK(rep.separating);
  // min of x^4 + y^4 on the circle is 1/2 at (1/sqrt2, 1/sqrt2)
  CHECK(rep.alpha >= 0.5 - 1e-12);
  CHECK(rep.alpha <= 0.5 + 1e-6);
  CHECK(std::fabs(std::fabs(rep.witness[0]) - 1.0 / std::sqrt(2.0)) < 1e-3);

  // P = x1^4 vanishes on the sphere at (0, 1)
  SymmetricForm degenerate(4, 2);
  degenerate.set_term({0, 0, 0, 0}, 1.0);
  const auto bad = is_separating(degenerate, l2);
  CHECK(!bad.separating);
  CHECK(std::fabs(degenerate.eval_diagonal(bad.witness)) < 1e-9);

  // on its own sphere, P = |x|_4^4 is identically 1
  const auto l4 = NormDescriptor::lp(4.0, 2);
  const auto self = is_separating(quartic, l4);
  CHECK(self.separating);
  CHECK(self.alpha == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("convexity screening") {
  CHECK(check_convexity(sum_of_even_powers_form(4, 2)).convex);
  CHECK(check_convexity(sum_of_even_powers_form(2, 3)).convex);

  // x1^4 - 6 x1^2 x2^2 + x2^4 fails; A(e1,e1,e2,e2) = -1
  const auto bad =
      polarize({{{4, 0}, 1.0}, {{2, 2}, -6.0}, {{0, 4}, 1.0}}, 4, 2);
  CHECK(bad.eval_mixed({1.0, 0.0}, {0.0, 1.0}, 2) == doctest::Approx(-1.0));
  const auto rep = check_convexity(bad);
  CHECK(!rep.convex);
  CHECK(rep.value < 0.0);
  CHECK_THROWS(NormDescriptor::poly(bad));
}

TEST_CASE("minkowski functional of a certified form") {
  const auto poly = NormDescriptor::poly(sum_of_even_powers_form(4, 2));
  CHECK(minkowski_norm(poly, {1.0, 1.0}) ==
        doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-12));
  CHECK(minkowski_norm(poly, {0.0, 0.0}) == 0.0);
  CHECK(minkowski_norm(poly, {3.0, 0.0}) == doctest::Approx(3.0));

  // bisection oracle agrees with the closed form
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const auto x = random_vec(rng, 2, 2.0);
    if (std::fabs(x[0]) + std::fabs(x[1]) < 1e-9) continue;
    CHECK(close_rel(minkowski_norm_bisect(poly.form(), x), minkowski_norm(poly, x),
                    1e-9));
  }

  // sandwich alpha |x|^N <= P(x) <= maxP |x|^N against the euclidean norm
  const auto l2 = NormDescriptor::lp(2.0, 2);
  const double alpha = poly.separation_alpha();
  for (int rep = 0; rep < 50; ++rep) {
    const auto x = random_vec(rng, 2, 3.0);
    const double e = l2.eval(x);
    const double p = poly.form().eval_diagonal(x);
    CHECK(p >= alpha * std::pow(e, 4) - 1e-6 * std::max(1.0, p));
    CHECK(p <= 1.0 * std::pow(e, 4) + 1e-6 * std::max(1.0, p));  // sup on sphere is 1
  }

  // homogeneity and triangle inequality on random triples
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (int rep = 0; rep < 50; ++rep) {
    const auto x = random_vec(rng, 2), y = random_vec(rng, 2), z = random_vec(rng, 2);
    const double s = U(rng);
    std::vector<double> sx = {s * x[0], s * x[1]};
    CHECK(close_rel(minkowski_norm(poly, sx), std::fabs(s) * minkowski_norm(poly, x),
                    1e-12));
    std::vector<double> sum = {x[0] + y[0], x[1] + y[1]};
    CHECK(minkowski_norm(poly, sum) <=
          minkowski_norm(poly, x) + minkowski_norm(poly, y) + 1e-9);
    std::vector<double> sum3 = {x[0] + y[0] + z[0], x[1] + y[1] + z[1]};
    CHECK(minkowski_norm(poly, sum3) <= minkowski_norm(poly, x) +
                                            minkowski_norm(poly, y) +
                                            minkowski_norm(poly, z) + 1e-9);
  }
}

TEST_CASE("norm homogeneity across descriptor kinds") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> U(-4.0, 4.0);
  const auto norms = {NormDescriptor::lp(1.0, 3), NormDescriptor::lp(3.0, 3),
                      NormDescriptor::sup(3)};
  for (const auto& norm : norms) {
    for (int rep = 0; rep < 30; ++rep) {
      const auto x = random_vec(rng, 3);
      const double s = U(rng);
      std::vector<double> sx(3);
      for (int i = 0; i < 3; ++i) sx[i] = s * x[i];
      CHECK(close_rel(norm.eval(sx), std::fabs(s) * norm.eval(x), 1e-12));
    }
  }
}

TEST_CASE("grid2d gauge") {
  // all radii 1: the euclidean norm
  const auto gauge = NormDescriptor::grid2d(std::vector<double>(64, 1.0));
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    const auto x = random_vec(rng, 2, 2.0);
    CHECK(gauge.eval(x) == doctest::Approx(std::hypot(x[0], x[1])).epsilon(1e-12));
  }
  CHECK(gauge.eval({0.0, 0.0}) == 0.0);
  // absolute homogeneity holds despite interpolation
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> radii(32);
    std::uniform_real_distribution<double> R(0.5, 2.0);
    for (auto& r : radii) r = R(rng);
    const auto g = NormDescriptor::grid2d(radii);
    const auto x = random_vec(rng, 2);
    std::uniform_real_distribution<double> S(-3.0, 3.0);
    const double s = S(rng);
    std::vector<double> sx = {s * x[0], s * x[1]};
    CHECK(testutil::close_rel(g.eval(sx), std::fabs(s) * g.eval(x), 1e-9));
  }
}

TEST_CASE("sequence norms through the descriptor") {
  SparseSequence x;
  x.set(3, 1.0);
  x.set(20, -1.0);
  CHECK(eval_norm(NormDescriptor::lp(4.0, 1), x) ==
        doctest::Approx(std::pow(2.0, 0.25)));
  CHECK(eval_norm(NormDescriptor::sup(1), x) == doctest::Approx(1.0));
  CHECK_THROWS(eval_norm(NormDescriptor::grid2d(std::vector<double>(8, 1.0)), x));
  x.set(3, 0.0);
  CHECK(x.entries().size() == 1);  // zeros are never stored
}

TEST_CASE("form serialization round-trip") {
  const auto form = sum_of_even_powers_form(4, 3);
  const auto back = SymmetricForm::from_json(form.to_json());
  CHECK(back.terms() == form.terms());
  const auto norm = NormDescriptor::poly(form);
  const auto nback = NormDescriptor::from_json(norm.to_json());
  CHECK(nback.eval({1.0, 2.0, -1.0}) ==
        doctest::Approx(norm.eval({1.0, 2.0, -1.0})).epsilon(1e-15));
}
