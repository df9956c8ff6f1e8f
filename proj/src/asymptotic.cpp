#include "convkit/asymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace convkit::asymptotic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_unit(const SequenceSpace& space, const SparseSequence& x) {
  if (std::fabs(space.norm(x) - 1.0) > 1e-9)
    throw std::invalid_argument("tail modulus: x must be a unit vector");
}

}  // namespace

SequenceSpace SequenceSpace::lp(double p_) {
  if (p_ < 1.0) throw std::invalid_argument("SequenceSpace::lp: p must be >= 1");
  SequenceSpace s;
  s.kind = Kind::lp;
  s.p = p_;
  return s;
}

SequenceSpace SequenceSpace::c0() {
  SequenceSpace s;
  s.kind = Kind::c0;
  return s;
}

double SequenceSpace::norm(const SparseSequence& x) const {
  if (kind == Kind::c0) {
    double mx = 0.0;
    for (const auto& [i, v] : x.entries()) mx = std::max(mx, std::fabs(v));
    return mx;
  }
  if (p == 1.0) {
    double s = 0.0;
    for (const auto& [i, v] : x.entries()) s += std::fabs(v);
    return s;
  }
  double s = 0.0;
  for (const auto& [i, v] : x.entries()) s += std::pow(std::fabs(v), p);
  return std::pow(s, 1.0 / p);
}

std::string SequenceSpace::label() const {
  if (kind == Kind::c0) return "c0";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "l%g", p);
  return buf;
}

json AsymptoticModulusResult::to_json() const {
  json j{{"t", t},
         {"value", value},
         {"mode", mode == Mode::rho_bar ? "rho_bar" : "delta_bar"},
         {"at", at},
         {"subspace_index", subspace_index},
         {"analytic", analytic},
         {"model", "tail"}};
  j["metadata"] = metadata;
  return j;
}

namespace {

json sparse_to_json(const SparseSequence& x) {
  json entries = json::array();
  for (const auto& [i, v] : x.entries()) entries.push_back({{"index", i}, {"value", v}});
  return entries;
}

}  // namespace

namespace {

AsymptoticModulusResult analytic_tail(const SequenceSpace& space,
                                      const SparseSequence& x, double t, Mode mode) {
  if (!(t > 0.0)) throw std::invalid_argument("tail modulus: t must be positive");
  require_unit(space, x);
  AsymptoticModulusResult r;
  r.t = t;
  r.mode = mode;
  r.subspace_index = std::max(x.max_support(), 0);
  r.analytic = true;
  r.at = "point";
  if (space.kind == SequenceSpace::Kind::c0)
    r.value = std::max(1.0, t) - 1.0;
  else
    r.value = std::pow(1.0 + std::pow(t, space.p), 1.0 / space.p) - 1.0;
  r.metadata = json{{"space", space.label()}, {"at_point", sparse_to_json(x)}};
  return r;
}

}  // namespace

AsymptoticModulusResult tail_delta_norm(const SequenceSpace& space,
                                        const SparseSequence& x, double t) {
  return analytic_tail(space, x, t, Mode::delta_bar);
}

AsymptoticModulusResult tail_rho_norm(const SequenceSpace& space,
                                      const SparseSequence& x, double t) {
  return analytic_tail(space, x, t, Mode::rho_bar);
}

AsymptoticModulusResult tail_modulus_fn(
    const std::function<double(const SparseSequence&)>& f, const SequenceSpace& space,
    const SparseSequence& x, double t, Mode mode, bool use_absolute,
    const SamplerConfig& cfg) {
  if (!(t > 0.0)) throw std::invalid_argument("tail_modulus_fn: t must be positive");
  const double fx = f(x);
  const int m0 = std::max(x.max_support(), 0);
  constexpr int kBlock = 32;

  // magnitudes on the constraint boundary plus interior/exterior probes
  std::vector<double> scales;
  if (mode == Mode::rho_bar)
    scales = {t, 0.75 * t, 0.5 * t, 0.25 * t};  // |h| <= t
  else
    scales = {t, 1.5 * t, 2.0 * t, 4.0 * t};    // |h| >= t

  auto inner_value = [&](int m) {
    // sampled sup (rho) or inf (delta) over h in span{e_k : k > m}
    double best = mode == Mode::rho_bar ? -kInf : kInf;
    auto consider = [&](const SparseSequence& dir) {
      const double dn = space.norm(dir);
      if (dn < 1e-14) return;
      for (double s : scales) {
        const SparseSequence h = dir.scaled(s / dn);
        double v = f(x.plus(h)) - fx;
        if (use_absolute && mode == Mode::rho_bar) v = std::fabs(v);
        if (mode == Mode::rho_bar)
          best = std::max(best, v);
        else
          best = std::min(best, v);
      }
    };
    // single-coordinate extremes, both signs
    consider(SparseSequence::unit(m + 1, 1.0));
    consider(SparseSequence::unit(m + 1, -1.0));
    for (int k = 0; k < cfg.tail_directions; ++k) {
      const auto z = gaussian_ld_point(k, kBlock, cfg.seed + m);
      SparseSequence dir;
      for (int i = 0; i < kBlock; ++i) dir.set(m + 1 + i, z[i]);
      consider(dir);
      consider(dir.scaled(-1.0));
    }
    return best;
  };

  // rho: inf over the tail family; delta: sup over it.  Values are constant
  // in m once the tail clears the support of x, so a short scan suffices.
  double value = mode == Mode::rho_bar ? kInf : -kInf;
  int chosen_m = m0;
  for (int m : {m0, m0 + 8, m0 + 16}) {
    const double v = inner_value(m);
    if (mode == Mode::rho_bar ? v < value : v > value) {
      value = v;
      chosen_m = m;
    }
  }

  AsymptoticModulusResult r;
  r.t = t;
  r.value = value;
  r.mode = mode;
  r.subspace_index = chosen_m;
  r.analytic = false;
  r.at = "point";
  r.metadata = json{{"space", space.label()},
                    {"seed", cfg.seed},
                    {"tail_directions", cfg.tail_directions},
                    {"use_absolute", use_absolute},
                    {"at_point", sparse_to_json(x)}};
  return r;
}

FlatnessReport flatness_and_power(const std::function<double(const SparseSequence&)>& f,
                                  const SequenceSpace& space,
                                  const std::vector<SparseSequence>& S,
                                  const std::vector<double>& t_grid,
                                  const SamplerConfig& cfg) {
  if (S.empty() || t_grid.empty())
    throw std::invalid_argument("flatness_and_power: empty sample set or grid");
  for (double t : t_grid)
    if (!(t > 0.0 && t <= 1.0))
      throw std::invalid_argument("flatness_and_power: t grid must lie in (0,1]");

  FlatnessReport rep;
  rep.curve.parameter = "t";
  rep.curve.bound = moduli::BoundDirection::lower;  // sampled sup underestimates
  rep.curve.metadata = json{{"space", space.label()},
                            {"model", "tail"},
                            {"seed", cfg.seed},
                            {"sample_set_size", S.size()}};
  std::vector<double> ts = t_grid;
  std::sort(ts.begin(), ts.end());
  for (double t : ts) {
    double sup = 0.0;
    for (const auto& x : S)
      sup = std::max(sup,
                     tail_modulus_fn(f, space, x, t, Mode::rho_bar, true, cfg).value);
    rep.curve.samples.emplace_back(t, sup);
  }

  rep.flat = true;
  for (const auto& [t, v] : rep.curve.samples) rep.flat = rep.flat && v <= 1e-12;
  if (!rep.flat)
    rep.fit = moduli::power_fit(rep.curve, ts.front(), ts.back());
  return rep;
}

json EnvelopeSmoothnessReport::to_json() const {
  return json{{"f_curve", f_curve.to_json()},
              {"conv_curve", conv_curve.to_json()},
              {"f_fit", f_fit.to_json()},
              {"conv_fit", conv_fit.to_json()},
              {"f_upper_constant", f_upper_constant},
              {"conv_upper_constant", conv_upper_constant},
              {"factor", factor},
              {"bound_holds", bound_holds}};
}

EnvelopeSmoothnessReport envelope_preserves_smoothness_demo(
    const envelope::GridFunction1D& phi, double p,
    const std::vector<SparseSequence>& S, const std::vector<double>& t_grid,
    const SamplerConfig& cfg, double factor) {
  phi.validate();
  if (S.empty() || t_grid.empty())
    throw std::invalid_argument("envelope demo: empty sample set or grid");
  const SequenceSpace space = SequenceSpace::lp(p);
  const double t_max = *std::max_element(t_grid.begin(), t_grid.end());
  double r_max = 0.0;
  for (const auto& x : S) r_max = std::max(r_max, space.norm(x));
  const double reach =
      std::pow(std::pow(r_max, p) + std::pow(4.0 * t_max, p), 1.0 / p);
  if (reach > phi.knots.back())
    throw std::invalid_argument("envelope demo: profile grid does not cover the reach");

  const auto psi = envelope::radial_envelope(phi);
  auto f = [&](const SparseSequence& v) { return phi.value_at(space.norm(v)); };
  auto conv_f = [&](const SparseSequence& v) { return psi.value_at(space.norm(v)); };

  EnvelopeSmoothnessReport rep;
  rep.factor = factor;
  auto build = [&](const std::function<double(const SparseSequence&)>& fn) {
    moduli::ModulusCurve curve;
    curve.parameter = "t";
    curve.bound = moduli::BoundDirection::lower;
    curve.metadata = json{{"space", space.label()}, {"model", "tail"}, {"seed", cfg.seed}};
    std::vector<double> ts = t_grid;
    std::sort(ts.begin(), ts.end());
    for (double t : ts) {
      double sup = 0.0;
      for (const auto& x : S)
        sup = std::max(sup,
                       tail_modulus_fn(fn, space, x, t, Mode::rho_bar, true, cfg).value);
      curve.samples.emplace_back(t, sup);
    }
    return curve;
  };
  rep.f_curve = build(f);
  rep.conv_curve = build(conv_f);
  const double lo = rep.f_curve.samples.front().first;
  const double hi = rep.f_curve.samples.back().first;
  rep.f_fit = moduli::power_fit(rep.f_curve, lo, hi);
  rep.conv_fit = moduli::power_fit(rep.conv_curve, lo, hi);

  rep.f_upper_constant = 0.0;
  for (const auto& [t, v] : rep.f_curve.samples)
    rep.f_upper_constant = std::max(rep.f_upper_constant, v / std::pow(t, p));
  rep.conv_upper_constant = 0.0;
  for (const auto& [t, v] : rep.conv_curve.samples)
    rep.conv_upper_constant = std::max(rep.conv_upper_constant, v / std::pow(t, p));

  rep.bound_holds = true;
  for (const auto& [t, v] : rep.conv_curve.samples)
    rep.bound_holds =
        rep.bound_holds && v <= factor * rep.f_upper_constant * std::pow(t, p) + 1e-12;
  return rep;
}

std::vector<SparseSequence> model_points(const SequenceSpace& space,
                                         const std::vector<double>& radii, int count,
                                         std::uint64_t seed) {
  if (radii.empty()) throw std::invalid_argument("model_points: radii must be nonempty");
  std::vector<SparseSequence> pts;
  pts.reserve(count);
  for (int k = 0; k < count; ++k) {
    const auto z = gaussian_ld_point(k, 6, seed);
    SparseSequence x;
    const int support = 1 + static_cast<int>(3.9 * uniform_ld_point(k, seed + 7));
    for (int i = 0; i < support; ++i) x.set(1 + i, z[i] == 0.0 ? 1.0 : z[i]);
    const double n = space.norm(x);
    pts.push_back(x.scaled(radii[k % radii.size()] / n));
  }
  return pts;
}

}  // namespace convkit::asymptotic
