#include "convkit/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace convkit::moduli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> normalized(const NormDescriptor& norm, const std::vector<double>& v) {
  const double n = norm.eval(v);
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
  return out;
}

// y on the unit sphere with |x - y| = eps, found by bisecting the angle of
// the normalized great-circle path from x towards -x through u.
// Returns false when u is (numerically) parallel to x.
bool chord_point(const NormDescriptor& norm, const std::vector<double>& x,
                 const std::vector<double>& u, double eps, std::vector<double>& y) {
  const int d = static_cast<int>(x.size());
  // euclidean orthogonalization of u against x, for the parametrization only
  double xu = 0.0, xx = 0.0;
  for (int i = 0; i < d; ++i) {
    xu += x[i] * u[i];
    xx += x[i] * x[i];
  }
  std::vector<double> perp(d);
  double pn = 0.0;
  for (int i = 0; i < d; ++i) {
    perp[i] = u[i] - (xu / xx) * x[i];
    pn += perp[i] * perp[i];
  }
  pn = std::sqrt(pn);
  if (pn < 1e-12) return false;
  for (int i = 0; i < d; ++i) perp[i] /= pn;

  std::vector<double> c(d), diff(d);
  auto gap = [&](double theta) {
    for (int i = 0; i < d; ++i) c[i] = std::cos(theta) * x[i] + std::sin(theta) * perp[i];
    const double cn = norm.eval(c);
    for (int i = 0; i < d; ++i) {
      c[i] /= cn;
      diff[i] = x[i] - c[i];
    }
    return norm.eval(diff) - eps;
  };
  double lo = 0.0, hi = M_PI;
  if (gap(hi) < 0.0) return false;  // cannot happen for eps <= 2; guard anyway
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) < 0.0 ? lo : hi) = mid;
  }
  gap(hi);
  y = c;
  return true;
}

json base_metadata(const NormDescriptor& norm, const SamplerConfig& cfg) {
  return json{{"norm", norm.label()},
              {"dimension", norm.dimension()},
              {"seed", cfg.seed},
              {"sample_count", cfg.samples},
              {"refinement_iters", cfg.refine_iters}};
}

}  // namespace

std::string bound_name(BoundDirection b) {
  switch (b) {
    case BoundDirection::upper: return "upper";
    case BoundDirection::lower: return "lower";
    case BoundDirection::exact: return "exact";
  }
  return "?";
}

void ModulusCurve::validate() const {
  for (size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i].first > 0.0 && samples[i].first <= 2.0))
      throw std::invalid_argument("ModulusCurve: t must lie in (0,2]");
    if (i > 0 && samples[i].first <= samples[i - 1].first)
      throw std::invalid_argument("ModulusCurve: t must increase strictly");
    if (!std::isfinite(samples[i].second))
      throw std::invalid_argument("ModulusCurve: non-finite value");
  }
}

void ModulusCurve::to_csv(std::ostream& os) const {
  os << parameter << ",value,log_" << parameter << ",log_value\n";
  char buf[160];
  for (const auto& [t, v] : samples) {
    const double lt = std::log(t);
    const double lv = v > 0.0 ? std::log(v) : -kInf;
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", t, v, lt, lv);
    os << buf;
  }
}

json ModulusCurve::to_json() const {
  json pts = json::array();
  for (const auto& [t, v] : samples) pts.push_back({{"t", t}, {"value", v}});
  return json{{"parameter", parameter},
              {"samples", pts},
              {"bound_direction", bound_name(bound)},
              {"metadata", metadata}};
}

json PowerFit::to_json() const {
  return json{{"exponent", exponent},
              {"constant", constant},
              {"residual", residual},
              {"window", {t_min, t_max}}};
}

ModulusEstimate delta_norm(const NormDescriptor& norm, double eps,
                           const SamplerConfig& cfg) {
  if (!(eps > 0.0 && eps <= 2.0))
    throw std::invalid_argument("delta_norm: eps must lie in (0,2]");
  if (norm.dimension() < 2)
    throw std::invalid_argument("delta_norm: needs dimension >= 2");
  const int d = norm.dimension();

  std::vector<double> y;
  auto objective = [&](const std::vector<double>& params) {
    std::vector<double> xr(params.begin(), params.begin() + d);
    std::vector<double> ur(params.begin() + d, params.end());
    if (norm.eval(xr) < 1e-12) return kInf;
    const auto x = normalized(norm, xr);
    if (!chord_point(norm, x, ur, eps, y)) return kInf;
    std::vector<double> sum(d);
    for (int i = 0; i < d; ++i) sum[i] = x[i] + y[i];
    return 1.0 - norm.eval(sum) / 2.0;
  };

  double best = kInf;
  std::vector<double> best_params;
  for (int k = 0; k < cfg.samples; ++k) {
    auto params = gaussian_ld_point(k, 2 * d, cfg.seed);
    const double v = objective(params);
    if (v < best) {
      best = v;
      best_params = std::move(params);
    }
  }
  if (best_params.empty())
    throw std::runtime_error("delta_norm: sampler found no feasible pair");
  ModulusEstimate est;
  est.raw_value = best;
  est.value = polish_coordinates(best_params, objective, cfg.refine_iters);
  {
    std::vector<double> xr(best_params.begin(), best_params.begin() + d);
    std::vector<double> ur(best_params.begin() + d, best_params.end());
    est.x = normalized(norm, xr);
    chord_point(norm, est.x, ur, eps, y);
    est.y = y;
  }
  est.bound = BoundDirection::upper;
  est.metadata = base_metadata(norm, cfg);
  est.metadata["eps"] = eps;
  est.metadata["bound_direction"] = "upper";
  return est;
}

ModulusEstimate rho_norm(const NormDescriptor& norm, double tau, RhoVariant variant,
                         const SamplerConfig& cfg) {
  if (!(tau > 0.0 && tau <= 2.0))
    throw std::invalid_argument("rho_norm: tau must lie in (0,2]");
  if (norm.dimension() < 2)
    throw std::invalid_argument("rho_norm: needs dimension >= 2");
  const int d = norm.dimension();

  std::vector<double> chord_y;
  auto pair_value = [&](const std::vector<double>& x, const std::vector<double>& yy) {
    std::vector<double> p(d), m(d);
    for (int i = 0; i < d; ++i) {
      p[i] = x[i] + tau * yy[i];
      m[i] = x[i] - tau * yy[i];
    }
    return (norm.eval(p) + norm.eval(m)) / 2.0 - 1.0;
  };
  auto objective = [&](const std::vector<double>& params) {
    std::vector<double> xr(params.begin(), params.begin() + d);
    std::vector<double> yr(params.begin() + d, params.end());
    if (norm.eval(xr) < 1e-12 || norm.eval(yr) < 1e-12) return kInf;
    const auto x = normalized(norm, xr);
    if (variant == RhoVariant::standard) {
      return -pair_value(x, normalized(norm, yr));
    }
    if (!chord_point(norm, x, yr, tau, chord_y)) return kInf;
    return -pair_value(x, chord_y);
  };

  double best = kInf;
  std::vector<double> best_params;
  for (int k = 0; k < cfg.samples; ++k) {
    auto params = gaussian_ld_point(k, 2 * d, cfg.seed);
    const double v = objective(params);
    if (v < best) {
      best = v;
      best_params = std::move(params);
    }
  }
  if (best_params.empty())
    throw std::runtime_error("rho_norm: sampler found no feasible pair");
  ModulusEstimate est;
  est.raw_value = -best;
  est.value = -polish_coordinates(best_params, objective, cfg.refine_iters);
  {
    std::vector<double> xr(best_params.begin(), best_params.begin() + d);
    std::vector<double> yr(best_params.begin() + d, best_params.end());
    est.x = normalized(norm, xr);
    est.y = variant == RhoVariant::standard
                ? normalized(norm, yr)
                : (chord_point(norm, est.x, yr, tau, chord_y), chord_y);
  }
  est.bound = BoundDirection::lower;
  // the triangle inequality caps every sample: the supremum cannot exceed tau
  if (est.value > tau + 1e-9)
    throw std::logic_error("rho_norm: sample exceeded the triangle bound");
  est.metadata = base_metadata(norm, cfg);
  est.metadata["tau"] = tau;
  est.metadata["variant"] = variant == RhoVariant::standard ? "standard" : "constrained";
  est.metadata["bound_direction"] = "lower";
  return est;
}

DeltaFnResult delta_fn(const std::function<double(const std::vector<double>&)>& f,
                       const NormDescriptor& ambient, double t,
                       const SamplerConfig& cfg, double domain_radius) {
  if (!(t > 0.0)) throw std::invalid_argument("delta_fn: t must be positive");
  const int d = ambient.dimension();

  DeltaFnResult result;
  auto gap_at = [&](const std::vector<double>& x, const std::vector<double>& u,
                    std::vector<double>& yy) {
    yy.resize(d);
    std::vector<double> mid(d);
    for (int i = 0; i < d; ++i) {
      yy[i] = x[i] - t * u[i];
      mid[i] = x[i] - 0.5 * t * u[i];
    }
    const double g = 0.5 * f(x) + 0.5 * f(yy) - f(mid);
    const double scale = 1.0 + std::fabs(f(x)) + std::fabs(f(yy));
    if (g < -1e-9 * scale && result.convex_ok) {
      result.convex_ok = false;
      result.bad_x = x;
      result.bad_y = yy;
    }
    return g;
  };

  std::vector<double> yy;
  auto objective = [&](const std::vector<double>& params) {
    std::vector<double> x(params.begin(), params.begin() + d);
    std::vector<double> ur(params.begin() + d, params.end());
    if (ambient.eval(ur) < 1e-12) return kInf;
    return gap_at(x, normalized(ambient, ur), yy);
  };

  double best = kInf;
  std::vector<double> best_params;
  for (int k = 0; k < cfg.samples; ++k) {
    auto params = gaussian_ld_point(k, 2 * d, cfg.seed);
    for (int i = 0; i < d; ++i) params[i] *= domain_radius / 2.0;
    const double v = objective(params);
    if (v < best) {
      best = v;
      best_params = std::move(params);
    }
  }
  // the pair straddling the origin is often extremal; seed it explicitly
  {
    std::vector<double> params(2 * d, 0.0);
    params[d] = 1.0;
    std::vector<double> u(params.begin() + d, params.end());
    const auto un = normalized(ambient, u);
    for (int i = 0; i < d; ++i) params[i] = 0.5 * t * un[i];
    const double v = objective(params);
    if (v < best) {
      best = v;
      best_params = std::move(params);
    }
  }

  ModulusEstimate est;
  est.raw_value = best;
  est.value = polish_coordinates(best_params, objective, cfg.refine_iters);
  {
    std::vector<double> x(best_params.begin(), best_params.begin() + d);
    std::vector<double> ur(best_params.begin() + d, best_params.end());
    gap_at(x, normalized(ambient, ur), yy);
    est.x = x;
    est.y = yy;
  }
  est.bound = BoundDirection::upper;
  est.metadata = base_metadata(ambient, cfg);
  est.metadata["t"] = t;
  est.metadata["bound_direction"] = "upper";
  result.estimate = est;
  return result;
}

PucResult puc_constant(const NormDescriptor& norm, double p, const SamplerConfig& cfg) {
  if (!(p > 1.0)) throw std::invalid_argument("puc_constant: p must exceed 1");
  const int d = norm.dimension();

  auto powp = [&](const std::vector<double>& v) {
    return std::pow(static_cast<long double>(norm.eval(v)),
                    static_cast<long double>(p));
  };
  // flatness = denominator / (2 |y|^p) = 1 / ratio; minimized to hunt for
  // flat faces, maximized ratio gives k_hat.  The quotient is invariant
  // under joint scaling of (x, y), so it is evaluated on a normalized slice
  // with |y| bounded away from 0; letting y -> 0 with x fixed turns it into
  // pure cancellation noise.
  auto flatness = [&](const std::vector<double>& params) {
    std::vector<double> x(params.begin(), params.begin() + d);
    std::vector<double> y(params.begin() + d, params.end());
    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::fabs(v));
    for (double v : y) scale = std::max(scale, std::fabs(v));
    if (scale < 1e-12) return kInf;
    for (auto& v : x) v /= scale;
    for (auto& v : y) v /= scale;
    if (norm.eval(y) < 0.03) return kInf;
    std::vector<double> s(d), dif(d);
    for (int i = 0; i < d; ++i) {
      s[i] = x[i] + y[i];
      dif[i] = x[i] - y[i];
    }
    const long double den = powp(s) + powp(dif) - 2.0L * powp(x);
    return static_cast<double>(den / (2.0L * powp(y)));
  };

  PucResult res;
  res.p = p;
  res.metadata = base_metadata(norm, cfg);
  res.metadata["p"] = p;
  res.metadata["bound_direction"] = "lower";

  // x = 0 forces K >= 1 exactly.
  std::vector<double> base(2 * d, 0.0);
  base[d] = 1.0;
  double min_flat = flatness(base);
  double max_ratio = 1.0 / min_flat;
  std::vector<double> flat_params = base, ratio_params = base;

  for (int k = 0; k < cfg.samples; ++k) {
    auto params = gaussian_ld_point(k, 2 * d, cfg.seed);
    const double fl = flatness(params);
    if (fl == kInf) continue;
    if (fl < min_flat) {
      min_flat = fl;
      flat_params = params;
    }
    if (fl > 1e-12 && 1.0 / fl > max_ratio) {
      max_ratio = 1.0 / fl;
      ratio_params = params;
    }
  }

  min_flat = polish_coordinates(flat_params, flatness, cfg.refine_iters);
  auto neg_ratio = [&](const std::vector<double>& params) {
    const double fl = flatness(params);
    if (fl <= 1e-13) return -1e13;
    return -1.0 / fl;
  };
  max_ratio = -polish_coordinates(ratio_params, neg_ratio, cfg.refine_iters);

  if (min_flat <= 1e-9) {
    res.uniformly_convex = false;
    // normalize the witness so |y| = 1
    std::vector<double> x(flat_params.begin(), flat_params.begin() + d);
    std::vector<double> y(flat_params.begin() + d, flat_params.end());
    const double yn = norm.eval(y);
    for (auto& v : x) v /= yn;
    for (auto& v : y) v /= yn;
    res.witness_x = x;
    res.witness_y = y;
    res.k_hat = kInf;
    return res;
  }

  res.k_hat = std::max(max_ratio, 1.0);
  res.witness_x.assign(ratio_params.begin(), ratio_params.begin() + d);
  res.witness_y.assign(ratio_params.begin() + d, ratio_params.end());
  return res;
}

std::optional<std::pair<std::vector<double>, std::vector<double>>> verify_puc(
    const NormDescriptor& norm, double p, double K, int sample_count,
    std::uint64_t seed) {
  if (!(K > 0.0)) throw std::invalid_argument("verify_puc: K must be positive");
  const int d = norm.dimension();
  auto powp = [&](const std::vector<double>& v) { return std::pow(norm.eval(v), p); };

  auto violated = [&](const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> s(d), dif(d);
    for (int i = 0; i < d; ++i) {
      s[i] = x[i] + y[i];
      dif[i] = x[i] - y[i];
    }
    const double lhs = 2.0 * powp(x) + (2.0 / K) * powp(y);
    const double rhs = powp(s) + powp(dif);
    return lhs > rhs + 1e-9 * (1.0 + std::fabs(rhs));
  };

  {  // deterministic probe at the forced extremal point
    std::vector<double> x(d, 0.0), y(d, 0.0);
    y[0] = 1.0;
    if (violated(x, y)) return std::make_pair(x, y);
  }
  for (int k = 0; k < sample_count; ++k) {
    const auto z = gaussian_ld_point(k, 2 * d, seed);
    std::vector<double> x(z.begin(), z.begin() + d), y(z.begin() + d, z.end());
    if (violated(x, y)) return std::make_pair(x, y);
  }
  return std::nullopt;
}

PowerFit power_fit(const ModulusCurve& curve, double lo, double hi) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [t, v] : curve.samples)
    if (t >= lo - 1e-15 && t <= hi + 1e-15) {
      if (!(v > 0.0))
        throw std::invalid_argument("power_fit: nonpositive value in window");
      pts.emplace_back(std::log(t), std::log(v));
    }
  if (pts.size() < 4)
    throw std::invalid_argument("power_fit: need at least 4 samples in window");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [lx, ly] : pts) {
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(pts.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;

  PowerFit fit;
  fit.exponent = slope;
  fit.t_min = lo;
  fit.t_max = hi;
  fit.residual = 0.0;
  for (const auto& [lx, ly] : pts)
    fit.residual = std::max(fit.residual, std::fabs(ly - (intercept + slope * lx)));
  fit.constant = kInf;
  for (const auto& [t, v] : curve.samples)
    if (t >= lo - 1e-15 && t <= hi + 1e-15)
      fit.constant = std::min(fit.constant, v / std::pow(t, slope));
  return fit;
}

ModulusCurve delta_norm_curve(const NormDescriptor& norm,
                              const std::vector<double>& eps_values,
                              const SamplerConfig& cfg) {
  ModulusCurve curve;
  curve.parameter = "eps";
  curve.bound = BoundDirection::upper;
  curve.metadata = json{{"norm", norm.label()},
                        {"dimension", norm.dimension()},
                        {"seed", cfg.seed},
                        {"sample_count", cfg.samples},
                        {"refinement_iters", cfg.refine_iters},
                        {"bound_direction", "upper"}};
  for (double eps : eps_values)
    curve.samples.emplace_back(eps, delta_norm(norm, eps, cfg).value);
  std::sort(curve.samples.begin(), curve.samples.end());
  curve.validate();
  return curve;
}

ModulusCurve rho_norm_curve(const NormDescriptor& norm,
                            const std::vector<double>& tau_values, RhoVariant variant,
                            const SamplerConfig& cfg) {
  ModulusCurve curve;
  curve.parameter = "tau";
  curve.bound = BoundDirection::lower;
  curve.metadata = json{{"norm", norm.label()},
                        {"dimension", norm.dimension()},
                        {"seed", cfg.seed},
                        {"sample_count", cfg.samples},
                        {"refinement_iters", cfg.refine_iters},
                        {"variant", variant == RhoVariant::standard ? "standard" : "constrained"},
                        {"bound_direction", "lower"}};
  for (double tau : tau_values)
    curve.samples.emplace_back(tau, rho_norm(norm, tau, variant, cfg).value);
  std::sort(curve.samples.begin(), curve.samples.end());
  curve.validate();
  return curve;
}

}  // namespace convkit::moduli
