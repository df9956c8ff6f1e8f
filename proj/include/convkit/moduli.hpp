#pragma once

#include <functional>
#include <string>
#include <vector>

#include "convkit/normcore.hpp"
#include "convkit/sampler.hpp"
#include "json.hpp"

namespace convkit::moduli {

using json = nlohmann::json;
using normcore::NormDescriptor;

enum class BoundDirection { upper, lower, exact };

std::string bound_name(BoundDirection b);

// A single sampled modulus estimate with its witness pair and provenance.
struct ModulusEstimate {
  double value = 0.0;
  std::vector<double> x, y;  // witness pair
  BoundDirection bound = BoundDirection::upper;
  double raw_value = 0.0;  // empirical optimum before local refinement
  json metadata;
};

// Sampled modulus curve; `samples` hold (t, value) with t strictly
// increasing in (0, 2].
struct ModulusCurve {
  std::string parameter;  // "eps", "tau" or "t"
  std::vector<std::pair<double, double>> samples;
  BoundDirection bound = BoundDirection::upper;
  json metadata;

  void validate() const;
  void to_csv(std::ostream& os) const;  // t,value,log_t,log_value
  json to_json() const;
};

// Least-squares power fit value ~= C t^p on log-log samples.
struct PowerFit {
  double exponent = 0.0;
  double constant = 0.0;  // min value / t^exponent over the window
  double residual = 0.0;  // max log-deviation from the fitted line
  double t_min = 0.0, t_max = 0.0;

  json to_json() const;
};

// delta_X(eps) = inf { 1 - |x+y|/2 : |x| = |y| = 1, |x-y| = eps }.
// Pairs are sampled by solving the chord constraint along a great-circle
// parametrization, then polished; the estimate is an upper bound of the
// infimum.
ModulusEstimate delta_norm(const NormDescriptor& norm, double eps,
                           const SamplerConfig& cfg = {});

// rho_X(tau) = sup { (|x+tau y| + |x-tau y|)/2 - 1 : |x| = |y| = 1 }.
// `constrained` additionally imposes |x - y| = tau on the pair; `standard`
// is the classical modulus without it.  Lower bound of the supremum.
enum class RhoVariant { constrained, standard };

ModulusEstimate rho_norm(const NormDescriptor& norm, double tau,
                         RhoVariant variant = RhoVariant::constrained,
                         const SamplerConfig& cfg = {});

// delta_f(t) = inf { f(x)/2 + f(y)/2 - f((x+y)/2) : |x-y| = t } for a convex
// f; when a sampled midpoint gap turns negative the function is flagged
// nonconvex with the offending pair.
struct DeltaFnResult {
  ModulusEstimate estimate;
  bool convex_ok = true;
  std::vector<double> bad_x, bad_y;
};

DeltaFnResult delta_fn(const std::function<double(const std::vector<double>&)>& f,
                       const NormDescriptor& ambient, double t,
                       const SamplerConfig& cfg = {}, double domain_radius = 2.0);

// Best K in  2|x|^p + (2/K)|y|^p <= |x+y|^p + |x-y|^p,  estimated as the
// sampled supremum of 2|y|^p / (|x+y|^p + |x-y|^p - 2|x|^p).  A refined
// denominator collapsing to 0 with y away from 0 certifies failure of
// p-uniform convexity (flat face witness).
struct PucResult {
  double p = 2.0;
  double k_hat = 1.0;
  bool uniformly_convex = true;
  std::vector<double> witness_x, witness_y;
  BoundDirection bound = BoundDirection::lower;
  json metadata;
};

PucResult puc_constant(const NormDescriptor& norm, double p,
                       const SamplerConfig& cfg = {});

// Checks the p-uniform-convexity inequality at the given K over sampled
// pairs; returns the first violating pair, or nothing on pass.
std::optional<std::pair<std::vector<double>, std::vector<double>>> verify_puc(
    const NormDescriptor& norm, double p, double K, int sample_count,
    std::uint64_t seed);

// Fits samples with t in [lo, hi]; requires >= 4 positive samples there.
PowerFit power_fit(const ModulusCurve& curve, double lo, double hi);

// Curve builders.
ModulusCurve delta_norm_curve(const NormDescriptor& norm,
                              const std::vector<double>& eps_values,
                              const SamplerConfig& cfg = {});
ModulusCurve rho_norm_curve(const NormDescriptor& norm,
                            const std::vector<double>& tau_values,
                            RhoVariant variant = RhoVariant::constrained,
                            const SamplerConfig& cfg = {});

}  // namespace convkit::moduli
