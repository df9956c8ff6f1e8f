#pragma once

#include <string>
#include <vector>

#include "convkit/normcore.hpp"
#include "convkit/sampler.hpp"
#include "json.hpp"

namespace convkit::extremal {

using json = nlohmann::json;

// Even polynomial a_2 t^2 + a_4 t^4 + ... + a_N t^N (no constant term).
struct EvenPolynomial {
  int degree = 2;                // N, even
  std::vector<double> coeffs;    // a_2, a_4, ..., a_N

  EvenPolynomial(int N, std::vector<double> a);
  double operator()(double t) const;
  double second_derivative(double t) const;
  double leading() const { return coeffs.back(); }
  double max_abs_coeff() const;
};

// Minimize p(t0) over even polynomials of degree N with leading coefficient
// pinned at 2, subject to p >= 0 and p'' >= 0.  The continuum of constraints
// is discretized on [0, T] (Chebyshev-Lobatto points plus t0), T grows with
// the root bound 1 + max|a_i|/2, and an exchange step appends polished
// violation points until the optimum is feasible on the whole line.
struct ExtremalProblem {
  int N = 4;
  double t0 = 1.0;
  int grid_density = 2048;
  bool exchange = true;     // append polished interior violation points
  int max_rounds = 40;
};

struct ExtremalResult {
  int N = 4;
  double t0 = 1.0;
  double q = 0.0;                  // optimal p(t0)
  double K = 0.0;                  // 2 t0^N / q
  std::vector<double> coefficients;  // a_2, ..., a_{N-2} (a_N = 2 fixed)
  std::vector<double> active_ts;   // grid points of the binding constraints
  double T = 0.0;
  int grid_density = 0;
  json diagnostics;

  EvenPolynomial polynomial() const;
  json to_json() const;
};

ExtremalResult solve_extremal(const ExtremalProblem& problem);

// p >= 0 and p'' >= 0 over the real line, checked by dense scan + golden
// polish on [0, T] with T from the Cauchy root bound.
struct MembershipReport {
  bool member = false;
  double min_p = 0.0, argmin_p = 0.0;
  double min_pp = 0.0, argmin_pp = 0.0;
  std::string violation;  // "", "nonnegative", or "convex"
  double witness_t = 0.0;
};

MembershipReport membership_check(const EvenPolynomial& p);

// q(t0) = t0^N q(1) for the pinned-leading-coefficient problem; the report
// carries q/t0^N per t0 and the largest relative deviation.
struct ScaleReport {
  int N = 4;
  std::vector<double> t0s, qs, normalized;  // normalized = q / t0^N
  double max_rel_dev = 0.0;
  json to_json() const;
};

ScaleReport scale_invariance_check(int N, const std::vector<double>& t0s,
                                   int grid_density = 2048);

// Samples pairs (z, h) with |h| = 1 in the given polynomial norm and checks
// the second-difference gap P(z+t0 h) + P(z-t0 h) - 2P(z) against q(t0).
struct GapReport {
  double q = 0.0;
  double min_gap = 0.0;
  std::vector<double> witness_z, witness_h;
  bool sound = false;  // min_gap >= q - 1e-9
  int samples = 0;
  json to_json() const;
};

GapReport gap_witness(const normcore::NormDescriptor& poly_norm, double t0,
                      const SamplerConfig& cfg = {});

}  // namespace convkit::extremal
