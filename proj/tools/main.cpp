// convkit: convex envelopes, moduli of convexity/smoothness, polynomial
// norms, tail-model asymptotic moduli and the pointwise extremal problem,
// behind one reproducible experiment runner.
//
//   convkit envelope --fn "(x^2-1)^2" --grid 801 --window -2:2
//   convkit moduli --norm lp:4 --dim 2 --mode delta --t 0.25,0.5,1
//   convkit asymptotic --space lp:4 --mode rho --t 1
//   convkit extremal --N 6 --t0 0.5,1,2
//   convkit polynorm --form sum4 --dim 3
//   convkit verify
//   convkit export --run <hash> --format csv
//
// Every run persists runs/<config-hash>/record.json (+ curves/*.csv); exit 0
// iff all of the run's assertions pass, 2 on usage errors.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "convkit/acceptance.hpp"
#include "convkit/asymptotic.hpp"
#include "convkit/envelope.hpp"
#include "convkit/expr.hpp"
#include "convkit/extremal.hpp"
#include "convkit/moduli.hpp"
#include "convkit/normcore.hpp"
#include "runner.hpp"

using namespace convkit;
using cli::Runner;
using nlohmann::json;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 42;
  std::string out = "runs";
  int samples = 4096;
  int refine = 200;
  std::string profile = "default";

  SamplerConfig sampler() const {
    SamplerConfig cfg;
    cfg.seed = seed;
    cfg.samples = samples;
    cfg.refine_iters = refine;
    return cfg;
  }
  json to_json() const {
    return json{{"seed", seed},
                {"samples", samples},
                {"refine", refine},
                {"tolerance_profile", profile}};
  }
};

normcore::NormDescriptor parse_norm(const std::string& text, int dim,
                                    const SamplerConfig& cfg) {
  if (text == "sup") return normcore::NormDescriptor::sup(dim);
  if (text.rfind("lp:", 0) == 0)
    return normcore::NormDescriptor::lp(std::stod(text.substr(3)), dim);
  if (text == "poly:sum4")
    return normcore::NormDescriptor::poly(normcore::sum_of_even_powers_form(4, dim), cfg);
  if (text == "poly:sum6")
    return normcore::NormDescriptor::poly(normcore::sum_of_even_powers_form(6, dim), cfg);
  if (text.rfind("poly:", 0) == 0) {
    std::ifstream is(text.substr(5));
    if (!is) throw CLI::ValidationError("--norm", "cannot open " + text.substr(5));
    json j;
    is >> j;
    return normcore::NormDescriptor::poly(normcore::SymmetricForm::from_json(j), cfg);
  }
  throw CLI::ValidationError("--norm", "unknown norm '" + text + "'");
}

asymptotic::SequenceSpace parse_space(const std::string& text) {
  if (text == "c0") return asymptotic::SequenceSpace::c0();
  if (text.rfind("lp:", 0) == 0)
    return asymptotic::SequenceSpace::lp(std::stod(text.substr(3)));
  throw CLI::ValidationError("--space", "unknown space '" + text + "'");
}

std::string curve_csv(const moduli::ModulusCurve& curve) {
  std::ostringstream os;
  curve.to_csv(os);
  return os.str();
}

// ---------------------------------------------------------------------------

int run_envelope(const GlobalOpts& g, const std::string& fn_text, int grid,
                 const std::string& window, std::vector<double> query) {
  const auto [lo, hi] = cli::parse_range(window);
  Runner runner(g.out, json{{"command", "envelope"},
                            {"fn", fn_text},
                            {"grid", grid},
                            {"window", window},
                            {"at", query},
                            {"global", g.to_json()}});
  const auto fn = expr::parse(fn_text);
  const auto f = envelope::GridFunction1D::sample(fn, lo, hi, grid);
  const auto hull = envelope::lower_convex_hull_1d(f);
  const auto bicj = envelope::biconjugate(f);

  bool below = true, convex = envelope::is_convex_grid(hull);
  double worst_units = 0.0;
  for (size_t i = 0; i < f.size(); ++i) {
    below = below && hull.values[i] <= f.values[i] + 1e-12;
    worst_units = std::max(worst_units, std::fabs(hull.values[i] - bicj.values[i]) /
                                            envelope::grid_tolerance(f, i));
  }
  runner.assert_that("envelope_below_f", below);
  runner.assert_that("envelope_convex", convex);
  runner.assert_that("hull_matches_biconjugate", worst_units <= 1.0,
                     {{"units_of_local_tolerance", worst_units}});

  if (query.empty())
    query = {f.knots[grid / 4], f.knots[grid / 2], f.knots[3 * grid / 4]};
  json certs = json::array();
  for (double x : query) {
    const auto cert = envelope::caratheodory_envelope_at(f, x);
    if (!cert) {
      runner.assert_that("caratheodory_feasible", false, {{"x", x}});
      continue;
    }
    runner.assert_that("caratheodory_support", cert->combination.size() <= 2,
                       {{"x", x}, {"support", cert->combination.size()}});
    const double envx = hull.value_at(x);
    const double tol = envelope::grid_tolerance(f, std::min<size_t>(f.size() - 2,
                           std::upper_bound(f.knots.begin(), f.knots.end(), x) -
                               f.knots.begin()));
    runner.assert_that("caratheodory_matches_hull", std::fabs(cert->value - envx) <= tol,
                       {{"x", x}, {"lp", cert->value}, {"hull", envx}});
    certs.push_back(cert->to_json());
  }

  runner.add_result("value_at_window_center", hull.values[(f.size() - 1) / 2]);
  runner.add_result("certificates", certs);
  std::ostringstream fcsv, ecsv;
  f.to_csv(fcsv);
  hull.to_csv(ecsv);
  runner.write_curve_csv("f.csv", fcsv.str());
  runner.write_curve_csv("envelope.csv", ecsv.str());
  runner.add_result("envelope", hull.to_json());
  return runner.finish();
}

int run_moduli(const GlobalOpts& g, const std::string& norm_spec, int dim,
               const std::string& mode, const std::string& t_list,
               const std::string& variant, double p, const std::string& fit_window) {
  Runner runner(g.out, json{{"command", "moduli"},
                            {"norm", norm_spec},
                            {"dim", dim},
                            {"mode", mode},
                            {"t", t_list},
                            {"rho_variant", variant},
                            {"p", p},
                            {"fit", fit_window},
                            {"global", g.to_json()}});
  const auto cfg = g.sampler();
  const auto norm = parse_norm(norm_spec, dim, cfg);
  const auto ts = cli::parse_list(t_list);

  if (mode == "delta" || mode == "rho") {
    moduli::ModulusCurve curve;
    if (mode == "delta") {
      curve = moduli::delta_norm_curve(norm, ts, cfg);
      for (const auto& [t, v] : curve.samples)
        runner.assert_that("delta_nonnegative", v >= -1e-9, {{"t", t}, {"value", v}});
    } else {
      const auto rv = variant == "standard" ? moduli::RhoVariant::standard
                                            : moduli::RhoVariant::constrained;
      curve = moduli::rho_norm_curve(norm, ts, rv, cfg);
      for (const auto& [t, v] : curve.samples)
        runner.assert_that("rho_below_tau", v <= t + 1e-12, {{"t", t}, {"value", v}});
    }
    runner.add_result("curve", curve.to_json());
    runner.write_curve_csv(mode + "_" + norm.label() + "_d" + std::to_string(dim) + ".csv",
                           curve_csv(curve));
    if (!fit_window.empty()) {
      const auto [lo, hi] = cli::parse_range(fit_window);
      const auto fit = moduli::power_fit(curve, lo, hi);
      runner.add_result("power_fit", fit.to_json());
    }
    return runner.finish();
  }
  if (mode == "delta-fn") {
    // f = |.|^p with the modulus linked to the p-uniform convexity constant
    auto f = [&](const std::vector<double>& v) { return std::pow(norm.eval(v), p); };
    json values = json::array();
    for (double t : ts) {
      const auto r = moduli::delta_fn(f, norm, t, cfg);
      runner.assert_that("convexity_preserved", r.convex_ok, {{"t", t}});
      json row{{"t", t},
               {"value", r.estimate.value},
               {"bound_direction", "upper"},
               {"implied_puc_constant",
                std::pow(t / 2.0, p) / std::max(r.estimate.value, 1e-300)}};
      values.push_back(row);
    }
    runner.add_result("delta_fn", values);
    return runner.finish();
  }
  if (mode == "puc") {
    const auto res = moduli::puc_constant(norm, p, cfg);
    runner.add_result("puc", json{{"p", res.p},
                                  {"k_hat", res.uniformly_convex ? json(res.k_hat) : json()},
                                  {"uniformly_convex", res.uniformly_convex},
                                  {"witness_x", res.witness_x},
                                  {"witness_y", res.witness_y},
                                  {"bound_direction", "lower"}});
    if (res.uniformly_convex)
      runner.assert_that("k_hat_at_least_one", res.k_hat >= 1.0,
                         {{"k_hat", res.k_hat}});
    else
      runner.assert_that("flat_witness_nontrivial", norm.eval(res.witness_y) > 0.1);
    return runner.finish();
  }
  throw CLI::ValidationError("--mode", "unknown mode '" + mode + "'");
}

int run_asymptotic(const GlobalOpts& g, const std::string& space_spec,
                   const std::string& mode, const std::string& t_list,
                   const std::string& x_spec) {
  Runner runner(g.out, json{{"command", "asymptotic"},
                            {"space", space_spec},
                            {"mode", mode},
                            {"t", t_list},
                            {"x", x_spec},
                            {"global", g.to_json()}});
  const auto space = parse_space(space_spec);
  normcore::SparseSequence x;
  for (const auto& [i, v] : cli::parse_sparse(x_spec)) x.set(i, v);
  x = x.scaled(1.0 / space.norm(x));
  const auto m = mode == "delta" ? asymptotic::Mode::delta_bar : asymptotic::Mode::rho_bar;
  auto norm_fn = [&](const normcore::SparseSequence& v) { return space.norm(v); };
  auto cfg = g.sampler();

  moduli::ModulusCurve curve;
  curve.parameter = "t";
  curve.bound = moduli::BoundDirection::exact;
  curve.metadata = json{{"space", space.label()}, {"model", "tail"}, {"seed", g.seed}};
  json rows = json::array();
  for (double t : cli::parse_list(t_list)) {
    const auto analytic = m == asymptotic::Mode::delta_bar
                              ? asymptotic::tail_delta_norm(space, x, t)
                              : asymptotic::tail_rho_norm(space, x, t);
    const auto sampled = asymptotic::tail_modulus_fn(norm_fn, space, x, t, m,
                                                     m == asymptotic::Mode::rho_bar, cfg);
    runner.assert_that("sampled_matches_analytic",
                       std::fabs(analytic.value - sampled.value) <= 1e-9,
                       {{"t", t}, {"analytic", analytic.value}, {"sampled", sampled.value}});
    runner.assert_that("nonnegative", analytic.value >= 0.0 && sampled.value >= -1e-15,
                       {{"t", t}});
    curve.samples.emplace_back(t, analytic.value);
    rows.push_back(analytic.to_json());
  }
  std::sort(curve.samples.begin(), curve.samples.end());
  runner.add_result("points", rows);
  runner.write_curve_csv(mode + "_" + space.label() + "_tail.csv", curve_csv(curve));
  return runner.finish();
}

int run_extremal(const GlobalOpts& g, int N, const std::string& t0_list, int density,
                 bool no_exchange) {
  Runner runner(g.out, json{{"command", "extremal"},
                            {"N", N},
                            {"t0", t0_list},
                            {"density", density},
                            {"exchange", !no_exchange},
                            {"global", g.to_json()}});
  const auto t0s = cli::parse_list(t0_list);
  json results = json::array();
  std::ostringstream sweep;
  sweep << "t0,q,q_over_t0_pow_N,K\n";
  std::vector<double> normalized;
  for (double t0 : t0s) {
    extremal::ExtremalProblem prob;
    prob.N = N;
    prob.t0 = t0;
    prob.grid_density = density;
    prob.exchange = !no_exchange;
    const auto res = extremal::solve_extremal(prob);
    runner.assert_that("q_positive", res.q > 1e-6, {{"t0", t0}, {"q", res.q}});
    const auto member = extremal::membership_check(res.polynomial());
    runner.assert_that("optimum_in_class", member.member,
                       {{"t0", t0}, {"min_p", member.min_p}, {"min_pp", member.min_pp}});
    results.push_back(res.to_json());
    const double ratio = res.q / std::pow(t0, N);
    normalized.push_back(ratio);
    char line[160];
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g\n", t0, res.q, ratio,
                  res.K);
    sweep << line;
  }
  if (t0s.size() >= 2) {
    double lo = normalized[0], hi = normalized[0];
    for (double v : normalized) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double dev = (hi - lo) / std::fabs(hi);
    runner.assert_that("scale_invariance", dev <= 1e-4, {{"max_rel_dev", dev}});
  }
  runner.add_result("solutions", results);
  json sweep_rows = json::array();
  for (size_t i = 0; i < t0s.size(); ++i) {
    const auto& sol = results[i];
    sweep_rows.push_back(
        {t0s[i], sol.at("q").get<double>(), normalized[i], sol.at("K").get<double>()});
  }
  runner.add_result("sweep", json{{"columns", {"t0", "q", "q_over_t0_pow_N", "K"}},
                                  {"rows", sweep_rows}});
  runner.write_curve_csv("extremal_sweep_N" + std::to_string(N) + ".csv", sweep.str());
  return runner.finish();
}

int run_polynorm(const GlobalOpts& g, const std::string& form_spec, int dim, double t0) {
  Runner runner(g.out, json{{"command", "polynorm"},
                            {"form", form_spec},
                            {"dim", dim},
                            {"t0", t0},
                            {"global", g.to_json()}});
  const auto cfg = g.sampler();
  normcore::SymmetricForm form(2, 1);
  if (form_spec == "sum4")
    form = normcore::sum_of_even_powers_form(4, dim);
  else if (form_spec == "sum6")
    form = normcore::sum_of_even_powers_form(6, dim);
  else {
    std::ifstream is(form_spec);
    if (!is) throw CLI::ValidationError("--form", "cannot open " + form_spec);
    json j;
    is >> j;
    form = normcore::SymmetricForm::from_json(j);
  }

  const auto convexity = normcore::check_convexity(form, cfg);
  runner.assert_that("convex", convexity.convex);
  const auto sep = normcore::is_separating(
      form, normcore::NormDescriptor::lp(2.0, form.dimension()), cfg);
  runner.assert_that("separating", sep.separating, {{"alpha", sep.alpha}});
  runner.add_result("separation", json{{"alpha", sep.alpha},
                                       {"bound_direction", sep.bound_direction},
                                       {"witness", sep.witness}});
  if (!convexity.convex || !sep.separating) return runner.finish();

  const auto norm = normcore::NormDescriptor::poly_certified(form, sep.alpha);
  // closed form vs bisection of P(x / lambda) = 1
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const auto z = gaussian_ld_point(k, form.dimension(), g.seed);
    const double direct = normcore::minkowski_norm(norm, z);
    const double bisect = normcore::minkowski_norm_bisect(form, z);
    worst = std::max(worst, std::fabs(direct - bisect) / std::max(1.0, direct));
  }
  runner.assert_that("minkowski_bisection_agrees", worst <= 1e-9,
                     {{"max_rel_dev", worst}});

  // binomial expansion consistency at sampled pairs and parameters
  double worst_b = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto z = gaussian_ld_point(k, 2 * form.dimension(), g.seed + 1);
    std::vector<double> x(z.begin(), z.begin() + form.dimension());
    std::vector<double> h(z.begin() + form.dimension(), z.end());
    const auto coeffs = form.binomial_coefficients(x, h);
    for (int j = 0; j < 10; ++j) {
      const double t = -2.0 + 4.0 * j / 9.0;
      std::vector<double> pt(x.size());
      for (size_t i = 0; i < x.size(); ++i) pt[i] = x[i] + t * h[i];
      double horner = 0.0;
      for (int i = form.degree(); i >= 0; --i) horner = horner * t + coeffs[i];
      const double direct = form.eval_diagonal(pt);
      worst_b = std::max(worst_b,
                         std::fabs(horner - direct) / std::max(1.0, std::fabs(direct)));
    }
  }
  runner.assert_that("binomial_expansion_consistent", worst_b <= 1e-9,
                     {{"max_rel_dev", worst_b}});

  const auto gap = extremal::gap_witness(norm, t0, cfg);
  runner.assert_that("gap_above_relaxation", gap.sound,
                     {{"q", gap.q}, {"min_gap", gap.min_gap}});
  runner.add_result("gap", gap.to_json());
  return runner.finish();
}

int run_verify(const GlobalOpts& g, bool rows) {
  Runner runner(g.out, json{{"command", "verify"}, {"global", g.to_json()}});
  acceptance::Options opts;
  opts.seed = g.seed;
  opts.strict = g.profile == "strict";
  const auto summaries = acceptance::run_all(opts);
  acceptance::print_table(summaries, std::cout, rows);
  for (const auto& s : summaries)
    runner.assert_that("criterion_" + std::to_string(s.criterion), s.pass,
                       {{"name", s.name}, {"seconds", s.seconds}});
  runner.add_result("criteria", acceptance::to_json(summaries));
  return runner.finish();
}

int run_export(const GlobalOpts& g, const std::string& run_hash,
               const std::string& format) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(g.out) / run_hash;
  std::ifstream is(dir / "record.json");
  if (!is) {
    std::cerr << "unknown record id " << run_hash << "\n";
    return 2;
  }
  json record;
  is >> record;
  const fs::path exp = dir / "export";
  fs::create_directories(exp);
  int written = 0;

  std::function<void(const std::string&, const json&)> emit =
      [&](const std::string& name, const json& node) {
        if (node.is_object() && node.contains("samples") && node.contains("parameter")) {
          // modulus-style curve with log-log companions
          if (format == "json") {
            std::ofstream os(exp / (name + ".json"));
            os << node.dump(2) << "\n";
          } else {
            std::ofstream os(exp / (name + ".csv"));
            const std::string param = node.at("parameter").get<std::string>();
            os << param << ",value,log_" << param << ",log_value\n";
            for (const auto& s : node.at("samples")) {
              const double t = s.at("t").get<double>();
              const double v = s.at("value").get<double>();
              char buf[160];
              std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", t, v,
                            std::log(t), v > 0 ? std::log(v) : -INFINITY);
              os << buf;
            }
          }
          ++written;
          return;
        }
        if (node.is_object() && node.contains("knots") && node.contains("values")) {
          if (format == "json") {
            std::ofstream os(exp / (name + ".json"));
            os << node.dump(2) << "\n";
          } else {
            std::ofstream os(exp / (name + ".csv"));
            os << "x,value\n";
            const auto& ks = node.at("knots");
            const auto& vs = node.at("values");
            for (size_t i = 0; i < ks.size(); ++i) {
              char buf[96];
              std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", ks[i].get<double>(),
                            vs[i].get<double>());
              os << buf;
            }
          }
          ++written;
          return;
        }
        if (node.is_object() && node.contains("xs") && node.contains("ys") &&
            node.contains("values")) {
          if (format == "json") {
            std::ofstream os(exp / (name + ".json"));
            os << node.dump(2) << "\n";
          } else {  // long format
            std::ofstream os(exp / (name + ".csv"));
            os << "x,y,value\n";
            const auto& xs = node.at("xs");
            const auto& ys = node.at("ys");
            const auto& vals = node.at("values");
            for (size_t i = 0; i < xs.size(); ++i)
              for (size_t j = 0; j < ys.size(); ++j) {
                char buf[144];
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n",
                              xs[i].get<double>(), ys[j].get<double>(),
                              vals[i][j].get<double>());
                os << buf;
              }
          }
          ++written;
          return;
        }
        if (node.is_object() && node.contains("columns") && node.contains("rows")) {
          if (format == "json") {
            std::ofstream os(exp / (name + ".json"));
            os << node.dump(2) << "\n";
          } else {
            std::ofstream os(exp / (name + ".csv"));
            std::string header;
            for (const auto& c : node.at("columns"))
              header += (header.empty() ? "" : ",") + c.get<std::string>();
            os << header << "\n";
            for (const auto& row : node.at("rows")) {
              std::string line;
              for (const auto& v : row) {
                char buf[48];
                std::snprintf(buf, sizeof(buf), "%.17g", v.get<double>());
                line += (line.empty() ? "" : ",") + std::string(buf);
              }
              os << line << "\n";
            }
          }
          ++written;
          return;
        }
        if (node.is_object())
          for (const auto& [k, v] : node.items()) emit(name + "_" + k, v);
        if (node.is_array()) {
          int idx = 0;
          for (const auto& v : node) emit(name + "_" + std::to_string(idx++), v);
        }
      };
  emit("curve", record.at("results"));
  std::cout << "exported " << written << " file(s) to " << exp << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"convex-geometry toolkit: envelopes, moduli and polynomial norms"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOpts g;
  app.add_option("--seed", g.seed, "sampler seed")->capture_default_str();
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--samples", g.samples, "sample count")->capture_default_str();
  app.add_option("--refine", g.refine, "refinement iterations")->capture_default_str();
  app.add_option("--tolerance-profile", g.profile, "default|strict")
      ->check(CLI::IsMember({"default", "strict"}))
      ->capture_default_str();

  auto* env = app.add_subcommand("envelope", "convex envelope of a sampled function");
  std::string fn_text = "(x^2-1)^2", window = "-2:2";
  int grid = 801;
  std::vector<double> query;
  env->add_option("--fn", fn_text, "expression in x")->capture_default_str();
  env->add_option("--grid", grid, "knot count")->capture_default_str();
  env->add_option("--window", window, "lo:hi")->capture_default_str();
  env->add_option("--at", query, "query points for certificates");

  auto* mod = app.add_subcommand("moduli", "moduli of convexity and smoothness");
  std::string norm_spec = "lp:2", mode = "delta", t_list = "0.25,0.5,1",
              variant = "constrained", fit_window;
  int dim = 2;
  double p = 2.0;
  mod->add_option("--norm", norm_spec, "lp:P | sup | poly:sum4 | poly:sum6 | poly:FILE")
      ->capture_default_str();
  mod->add_option("--dim", dim)->capture_default_str();
  mod->add_option("--mode", mode, "delta|rho|delta-fn|puc")->capture_default_str();
  mod->add_option("--t", t_list, "comma-separated parameters")->capture_default_str();
  mod->add_option("--rho-variant", variant, "constrained|standard")
      ->check(CLI::IsMember({"constrained", "standard"}))
      ->capture_default_str();
  mod->add_option("--p", p, "power for delta-fn / puc")->capture_default_str();
  mod->add_option("--fit", fit_window, "lo:hi power-fit window");

  auto* asy = app.add_subcommand("asymptotic", "tail-model asymptotic moduli");
  std::string space_spec = "lp:4", amode = "rho", at_list = "1", x_spec = "1:1";
  asy->add_option("--space", space_spec, "lp:P | c0")->capture_default_str();
  asy->add_option("--mode", amode, "rho|delta")
      ->check(CLI::IsMember({"rho", "delta"}))
      ->capture_default_str();
  asy->add_option("--t", at_list)->capture_default_str();
  asy->add_option("--x", x_spec, "sparse point index:value,... (normalized)")
      ->capture_default_str();

  auto* ext = app.add_subcommand("extremal", "pointwise extremal problem over even polynomials");
  int N = 4, density = 2048;
  std::string t0_list = "1";
  bool no_exchange = false;
  ext->add_option("--N", N, "even degree >= 4")->capture_default_str();
  ext->add_option("--t0", t0_list, "comma-separated evaluation points")
      ->capture_default_str();
  ext->add_option("--density", density, "constraint grid density")->capture_default_str();
  ext->add_flag("--no-exchange", no_exchange, "skip violation-exchange rounds");

  auto* pn = app.add_subcommand("polynorm", "certify and exercise a polynomial norm");
  std::string form_spec = "sum4";
  int pdim = 3;
  double t0 = 1.0;
  pn->add_option("--form", form_spec, "sum4 | sum6 | FILE.json")->capture_default_str();
  pn->add_option("--dim", pdim)->capture_default_str();
  pn->add_option("--t0", t0)->capture_default_str();

  auto* ver = app.add_subcommand("verify", "run the full verification suite");
  bool rows = false;
  ver->add_flag("--rows", rows, "print every claim row");

  auto* exp = app.add_subcommand("export", "re-emit curves from a stored record");
  std::string run_hash, format = "csv";
  exp->add_option("--run", run_hash, "record id (config hash)")->required();
  exp->add_option("--format", format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;  // usage errors exit 2
  }

  try {
    if (*env) return run_envelope(g, fn_text, grid, window, query);
    if (*mod) return run_moduli(g, norm_spec, dim, mode, t_list, variant, p, fit_window);
    if (*asy) return run_asymptotic(g, space_spec, amode, at_list, x_spec);
    if (*ext) return run_extremal(g, N, t0_list, density, no_exchange);
    if (*pn) return run_polynorm(g, form_spec, pdim, t0);
    if (*ver) return run_verify(g, rows);
    if (*exp) return run_export(g, run_hash, format);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
