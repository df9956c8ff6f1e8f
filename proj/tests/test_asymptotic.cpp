#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "convkit/asymptotic.hpp"
#include "test_util.hpp"

using namespace convkit;
using namespace convkit::asymptotic;
using normcore::SparseSequence;

namespace {

SparseSequence random_unit(const SequenceSpace& space, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 5), index(1, 12);
  SparseSequence x;
  const int k = count(rng);
  for (int i = 0; i < k; ++i) {
    double v = N(rng);
    if (v == 0.0) v = 0.5;
    x.set(index(rng), v);
  }
  return x.scaled(1.0 / space.norm(x));
}

}  // namespace

TEST_CASE("tail moduli closed forms") {
  const auto x = SparseSequence::unit(1);
  for (double p : {1.0, 2.0, 4.0}) {
    const auto space = SequenceSpace::lp(p);
    for (double t : {0.1, 0.5, 1.0}) {
      const double expect = std::pow(1.0 + std::pow(t, p), 1.0 / p) - 1.0;
      CHECK(tail_delta_norm(space, x, t).value == doctest::Approx(expect).epsilon(1e-15));
      CHECK(tail_rho_norm(space, x, t).value == doctest::Approx(expect).epsilon(1e-15));
    }
  }
  CHECK(tail_delta_norm(SequenceSpace::lp(1.0), x, 1.0).value == doctest::Approx(1.0));
  CHECK(tail_rho_norm(SequenceSpace::lp(4.0), x, 1.0).value ==
        doctest::Approx(std::pow(2.0, 0.25) - 1.0));
  for (double t : {0.25, 0.5, 1.0}) {
    CHECK(tail_delta_norm(SequenceSpace::c0(), x, t).value == 0.0);
    CHECK(tail_rho_norm(SequenceSpace::c0(), x, t).value == 0.0);
  }

  SparseSequence not_unit = SparseSequence::unit(2, 0.5);
  CHECK_THROWS(tail_delta_norm(SequenceSpace::lp(2.0), not_unit, 0.5));
  CHECK_THROWS(tail_rho_norm(SequenceSpace::lp(2.0), x, 0.0));
}

TEST_CASE("model exactness: value independent of the point and the tail index") {
  std::mt19937_64 rng(31);
  const auto space = SequenceSpace::lp(3.0);
  const double t = 0.6;
  const double expect = std::pow(1.0 + std::pow(t, 3.0), 1.0 / 3.0) - 1.0;
  for (int rep = 0; rep < 20; ++rep) {
    const auto x = random_unit(space, rng);
    const auto r = tail_delta_norm(space, x, t);
    CHECK(r.value == doctest::Approx(expect).epsilon(1e-12));
    CHECK(r.subspace_index >= x.max_support());
  }
  // sampled path, several tail indices via different supports
  SamplerConfig cfg;
  cfg.tail_directions = 16;
  auto f = [&](const SparseSequence& v) { return space.norm(v); };
  for (int m : {1, 3, 5, 9, 17}) {
    const auto x = SparseSequence::unit(m);
    const double v =
        tail_modulus_fn(f, space, x, t, Mode::rho_bar, true, cfg).value;
    CHECK(v == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("sampled generic path agrees with the analytic path on lp norms") {
  std::mt19937_64 rng(37);
  SamplerConfig cfg;
  cfg.tail_directions = 24;
  for (double p : {1.0, 2.0, 4.0}) {
    const auto space = SequenceSpace::lp(p);
    auto f = [&](const SparseSequence& v) { return space.norm(v); };
    for (double t : {0.2, 0.7, 1.0}) {
      const auto x = random_unit(space, rng);
      const double rho =
          tail_modulus_fn(f, space, x, t, Mode::rho_bar, true, cfg).value;
      const double del =
          tail_modulus_fn(f, space, x, t, Mode::delta_bar, false, cfg).value;
      CHECK(rho == doctest::Approx(tail_rho_norm(space, x, t).value).epsilon(1e-9));
      CHECK(del == doctest::Approx(tail_delta_norm(space, x, t).value).epsilon(1e-9));
      CHECK(rho >= 0.0);
      CHECK(del >= 0.0);
    }
  }
}

TEST_CASE("rho and delta coincide on the lp model") {
  const auto x = SparseSequence::unit(3);
  for (double p : {1.0, 2.0, 4.0}) {
    const auto space = SequenceSpace::lp(p);
    for (double t : {0.1, 0.4, 0.8, 1.0}) {
      CHECK(std::fabs(tail_rho_norm(space, x, t).value -
                      tail_delta_norm(space, x, t).value) <= 1e-12);
    }
  }
}

TEST_CASE("tail moduli are nondecreasing in t") {
  const auto x = SparseSequence::unit(1);
  for (const auto& space : {SequenceSpace::lp(1.5), SequenceSpace::lp(4.0),
                            SequenceSpace::c0()}) {
    double prev_r = -1.0, prev_d = -1.0;
    for (double t = 0.1; t <= 2.0; t += 0.1) {
      const double r = tail_rho_norm(space, x, t).value;
      const double d = tail_delta_norm(space, x, t).value;
      CHECK(r >= prev_r - 1e-15);
      CHECK(d >= prev_d - 1e-15);
      prev_r = r;
      prev_d = d;
    }
  }
}

TEST_CASE("absolute and plain moduli agree for convex functions") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  SamplerConfig cfg;
  cfg.tail_directions = 24;
  for (int rep = 0; rep < 20; ++rep) {
    const auto space = SequenceSpace::lp(1.0 + 3.0 * U(rng));
    const double a = 2.0 * U(rng), c = 2.0 * U(rng), b = 1.5 * U(rng);
    auto f = [&](const SparseSequence& v) {
      const double r = space.norm(v);
      return a * r * r + c * std::max(0.0, r - b);
    };
    const auto x = random_unit(space, rng).scaled(0.3 + 1.7 * U(rng));
    const double t = 0.1 + 0.9 * U(rng);
    const double on = tail_modulus_fn(f, space, x, t, Mode::rho_bar, true, cfg).value;
    const double off = tail_modulus_fn(f, space, x, t, Mode::rho_bar, false, cfg).value;
    CHECK(std::fabs(on - off) <= 1e-12);
  }
}

TEST_CASE("sup norm on the c0 model is asymptotically flat") {
  const auto space = SequenceSpace::c0();
  auto f = [&](const SparseSequence& v) { return space.norm(v); };
  const auto x = SparseSequence::unit(2);  // max attained on the support
  SamplerConfig cfg;
  const auto r = tail_modulus_fn(f, space, x, 0.8, Mode::rho_bar, true, cfg);
  CHECK(r.value == 0.0);

  std::mt19937_64 rng(43);
  std::vector<SparseSequence> S;
  for (int i = 0; i < 10; ++i) S.push_back(random_unit(space, rng));
  const auto rep = flatness_and_power(f, space, S, {0.1, 0.25, 0.5, 0.75, 1.0}, cfg);
  CHECK(rep.flat);
}

TEST_CASE("power detection on lp models") {
  SamplerConfig cfg;
  cfg.tail_directions = 16;
  std::mt19937_64 rng(47);
  std::vector<double> grid;
  for (int i = 0; i < 8; ++i) grid.push_back(0.05 * std::pow(10.0, i / 7.0));

  {
    const auto space = SequenceSpace::lp(4.0);
    auto f = [&](const SparseSequence& v) { return space.norm(v); };
    std::vector<SparseSequence> S;
    for (int i = 0; i < 5; ++i) S.push_back(random_unit(space, rng));
    const auto rep = flatness_and_power(f, space, S, grid, cfg);
    CHECK(!rep.flat);
    CHECK(rep.fit.exponent >= 3.8);
    CHECK(rep.fit.exponent <= 4.2);
  }
  {
    const auto space = SequenceSpace::lp(1.0);
    auto f = [&](const SparseSequence& v) { return space.norm(v); };
    std::vector<SparseSequence> S;
    for (int i = 0; i < 5; ++i) S.push_back(random_unit(space, rng));
    const auto rep = flatness_and_power(f, space, S, grid, cfg);
    CHECK(!rep.flat);
    CHECK(rep.fit.exponent >= 0.95);
    CHECK(rep.fit.exponent <= 1.05);
  }
  CHECK_THROWS(flatness_and_power([](const SparseSequence&) { return 0.0; },
                                  SequenceSpace::lp(2.0), {}, {0.5}, cfg));
}

TEST_CASE("envelope transfer demo on the double-well profile") {
  const auto phi = envelope::GridFunction1D::sample(
      [](double r) { return (r * r - 1.0) * (r * r - 1.0); }, 0.0, 4.0, 801);
  const std::vector<double> radii = {0.5, 0.6, 0.75, 0.85, 1.15,
                                     1.3, 1.5, 1.7,  1.85, 2.0};
  const auto space = SequenceSpace::lp(4.0);
  const auto S = model_points(space, radii, 10, 42);
  SamplerConfig cfg;
  cfg.tail_directions = 24;
  std::vector<double> grid;
  for (int i = 0; i < 8; ++i)
    grid.push_back(std::exp(std::log(0.05) + (std::log(0.4) - std::log(0.05)) * i / 7.0));
  const auto rep = envelope_preserves_smoothness_demo(phi, 4.0, S, grid, cfg, 4.0);
  CHECK(rep.f_fit.exponent >= 3.6);
  CHECK(rep.f_fit.exponent <= 4.4);
  CHECK(rep.conv_fit.exponent >= 3.6);
  CHECK(rep.conv_fit.exponent <= 4.4);
  CHECK(rep.bound_holds);
  CHECK(rep.conv_upper_constant <= rep.f_upper_constant + 1e-12);
}

TEST_CASE("envelope transfer is the identity for convex nondecreasing profiles") {
  const auto phi = envelope::GridFunction1D::sample(
      [](double r) { return r * r; }, 0.0, 4.0, 401);
  const auto space = SequenceSpace::lp(2.0);
  const auto S = model_points(space, {0.5, 1.0, 1.5}, 6, 7);
  SamplerConfig cfg;
  cfg.tail_directions = 16;
  const auto rep = envelope_preserves_smoothness_demo(
      phi, 2.0, S, {0.05, 0.1, 0.2, 0.3, 0.4}, cfg, 4.0);
  for (size_t i = 0; i < rep.f_curve.samples.size(); ++i)
    CHECK(rep.f_curve.samples[i].second ==
          doctest::Approx(rep.conv_curve.samples[i].second).epsilon(1e-12));
  // f(x+h) - f(x) = |h|^2 on tails; the grid interpolation of the profile
  // shifts the fitted slope by O(spacing^2 / t^2)
  CHECK(rep.f_fit.exponent >= 1.95);
  CHECK(rep.f_fit.exponent <= 2.05);

  // a profile grid that cannot cover |x + h| is rejected
  const auto short_phi = envelope::GridFunction1D::sample(
      [](double r) { return r * r; }, 0.0, 1.2, 41);
  CHECK_THROWS(envelope_preserves_smoothness_demo(short_phi, 2.0, S,
                                                  {0.05, 0.1, 0.2, 0.3, 0.4}, cfg));
}

TEST_CASE("results serialize with the tail-model tag") {
  const auto r = tail_rho_norm(SequenceSpace::lp(2.0), SparseSequence::unit(1), 0.5);
  const auto j = r.to_json();
  CHECK(j.at("model") == "tail");
  CHECK(j.at("mode") == "rho_bar");
  CHECK(j.at("analytic") == true);
}
