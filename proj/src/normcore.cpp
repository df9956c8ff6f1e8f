#include "convkit/normcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>

namespace convkit::normcore {

namespace {

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

double binom(int n, int k) {
  return factorial(n) / (factorial(k) * factorial(n - k));
}

// N! / prod(multiplicity!) for a sorted index tuple.
double orbit_multiplicity(const std::vector<int>& idx) {
  double denom = 1.0;
  int run = 1;
  for (size_t i = 1; i <= idx.size(); ++i) {
    if (i < idx.size() && idx[i] == idx[i - 1]) {
      ++run;
    } else {
      denom *= factorial(run);
      run = 1;
    }
  }
  return factorial(static_cast<int>(idx.size())) / denom;
}

// index counts (index -> repetitions) of a sorted tuple
std::vector<std::pair<int, int>> index_counts(const std::vector<int>& idx) {
  std::vector<std::pair<int, int>> counts;
  for (int v : idx) {
    if (!counts.empty() && counts.back().first == v)
      ++counts.back().second;
    else
      counts.emplace_back(v, 1);
  }
  return counts;
}

// Enumerates sorted index tuples of length n over {0..d-1}.
void enumerate_sorted_tuples(int n, int d,
                             const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(n, 0);
  while (true) {
    fn(idx);
    int k = n - 1;
    while (k >= 0 && idx[k] == d - 1) --k;
    if (k < 0) break;
    const int v = idx[k] + 1;
    for (int j = k; j < n; ++j) idx[j] = v;
  }
}

double eval_monomials(const std::map<std::vector<int>, double>& monomials,
                      const std::vector<double>& v) {
  double acc = 0.0;
  for (const auto& [expo, coeff] : monomials) {
    double term = coeff;
    for (size_t i = 0; i < expo.size(); ++i)
      for (int e = 0; e < expo[i]; ++e) term *= v[i];
    acc += term;
  }
  return acc;
}

}  // namespace

// ---------------------------------------------------------------------------
// SparseSequence

SparseSequence SparseSequence::unit(int index, double value) {
  SparseSequence s;
  s.set(index, value);
  return s;
}

void SparseSequence::set(int index, double value) {
  if (index < 1) throw std::invalid_argument("SparseSequence: index must be >= 1");
  if (value == 0.0)
    entries_.erase(index);
  else
    entries_[index] = value;
}

double SparseSequence::get(int index) const {
  auto it = entries_.find(index);
  return it == entries_.end() ? 0.0 : it->second;
}

int SparseSequence::max_support() const {
  return entries_.empty() ? 0 : entries_.rbegin()->first;
}

SparseSequence SparseSequence::plus(const SparseSequence& other) const {
  SparseSequence r = *this;
  for (const auto& [i, v] : other.entries_) r.set(i, r.get(i) + v);
  return r;
}

SparseSequence SparseSequence::scaled(double s) const {
  SparseSequence r;
  if (s == 0.0) return r;
  for (const auto& [i, v] : entries_) r.set(i, s * v);
  return r;
}

// ---------------------------------------------------------------------------
// SymmetricForm

SymmetricForm::SymmetricForm(int degree, int dimension)
    : degree_(degree), dimension_(dimension) {
  if (degree < 1 || dimension < 1)
    throw std::invalid_argument("SymmetricForm: degree and dimension must be positive");
}

void SymmetricForm::set_term(std::vector<int> sorted_index, double coeff) {
  if (static_cast<int>(sorted_index.size()) != degree_)
    throw std::invalid_argument("SymmetricForm: index tuple length != degree");
  if (!std::is_sorted(sorted_index.begin(), sorted_index.end()))
    throw std::invalid_argument("SymmetricForm: index tuple must be sorted");
  for (int v : sorted_index)
    if (v < 0 || v >= dimension_)
      throw std::invalid_argument("SymmetricForm: index out of range");
  if (coeff == 0.0)
    terms_.erase(sorted_index);
  else
    terms_[std::move(sorted_index)] = coeff;
}

double SymmetricForm::eval(std::span<const std::vector<double>> args) const {
  if (static_cast<int>(args.size()) != degree_)
    throw std::invalid_argument("SymmetricForm::eval: expected N argument vectors");
  for (const auto& a : args)
    if (static_cast<int>(a.size()) != dimension_)
      throw std::invalid_argument("SymmetricForm::eval: argument dimension mismatch");

  // Odometer over all d^N index tuples; coefficient looked up by sorted key.
  std::vector<int> idx(degree_, 0), key(degree_);
  double acc = 0.0;
  while (true) {
    key = idx;
    std::sort(key.begin(), key.end());
    auto it = terms_.find(key);
    if (it != terms_.end()) {
      double prod = it->second;
      for (int k = 0; k < degree_; ++k) prod *= args[k][idx[k]];
      acc += prod;
    }
    int k = degree_ - 1;
    while (k >= 0 && idx[k] == dimension_ - 1) idx[k--] = 0;
    if (k < 0) break;
    ++idx[k];
  }
  return acc;
}

double SymmetricForm::eval_diagonal(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != dimension_)
    throw std::invalid_argument("SymmetricForm::eval_diagonal: dimension mismatch");
  double acc = 0.0;
  for (const auto& [idx, coeff] : terms_) {
    double prod = coeff * orbit_multiplicity(idx);
    for (int v : idx) prod *= x[v];
    acc += prod;
  }
  return acc;
}

double SymmetricForm::eval_mixed(const std::vector<double>& x,
                                 const std::vector<double>& h, int h_count) const {
  if (h_count < 0 || h_count > degree_)
    throw std::invalid_argument("SymmetricForm::eval_mixed: bad slot count");
  if (static_cast<int>(x.size()) != dimension_ ||
      static_cast<int>(h.size()) != dimension_)
    throw std::invalid_argument("SymmetricForm::eval_mixed: dimension mismatch");
  const int a = degree_ - h_count;  // x slots
  const int b = h_count;            // h slots
  double acc = 0.0;
  for (const auto& [idx, coeff] : terms_) {
    const auto counts = index_counts(idx);
    // Distribute each index's copies between x-slots and h-slots; the number
    // of distinct argument arrangements realizing a split (j_i) is
    // a!/prod(j_i!) * b!/prod(m_i - j_i)!.
    double orbit_sum = 0.0;
    std::function<void(size_t, int, double, double)> rec =
        [&](size_t ci, int x_left, double weight, double prod) {
          if (ci == counts.size()) {
            if (x_left == 0) orbit_sum += weight * prod;
            return;
          }
          const auto [index, m] = counts[ci];
          for (int j = 0; j <= std::min(m, x_left); ++j) {
            const double w = weight / (factorial(j) * factorial(m - j));
            double pr = prod;
            for (int r = 0; r < j; ++r) pr *= x[index];
            for (int r = 0; r < m - j; ++r) pr *= h[index];
            rec(ci + 1, x_left - j, w, pr);
          }
        };
    rec(0, a, 1.0, 1.0);
    acc += coeff * factorial(a) * factorial(b) * orbit_sum;
  }
  return acc;
}

std::vector<double> SymmetricForm::binomial_coefficients(
    const std::vector<double>& x, const std::vector<double>& h) const {
  std::vector<double> c(degree_ + 1);
  for (int i = 0; i <= degree_; ++i) c[i] = binom(degree_, i) * eval_mixed(x, h, i);
  return c;
}

json SymmetricForm::to_json() const {
  json terms = json::array();
  for (const auto& [idx, coeff] : terms_) {
    json one_based = json::array();
    for (int v : idx) one_based.push_back(v + 1);
    terms.push_back({{"index", one_based}, {"coeff", coeff}});
  }
  return json{{"degree", degree_}, {"dimension", dimension_}, {"terms", terms}};
}

SymmetricForm SymmetricForm::from_json(const json& j) {
  SymmetricForm f(j.at("degree").get<int>(), j.at("dimension").get<int>());
  for (const auto& t : j.at("terms")) {
    std::vector<int> idx;
    for (const auto& v : t.at("index")) idx.push_back(v.get<int>() - 1);
    f.set_term(std::move(idx), t.at("coeff").get<double>());
  }
  return f;
}

SymmetricForm polarize(const std::map<std::vector<int>, double>& monomials,
                       int degree, int dimension) {
  for (const auto& [expo, coeff] : monomials) {
    if (static_cast<int>(expo.size()) != dimension)
      throw std::invalid_argument("polarize: exponent vector length != dimension");
    int total = 0;
    for (int e : expo) {
      if (e < 0) throw std::invalid_argument("polarize: negative exponent");
      total += e;
    }
    if (total != degree && coeff != 0.0)
      throw std::invalid_argument("polarize: polynomial is not N-homogeneous");
  }

  double scale = 0.0;
  for (const auto& [expo, coeff] : monomials) scale = std::max(scale, std::fabs(coeff));
  const double drop = scale * 1e-13;

  SymmetricForm form(degree, dimension);
  const double norm = 1.0 / (std::pow(2.0, degree) * factorial(degree));
  std::vector<double> v(dimension);
  enumerate_sorted_tuples(degree, dimension, [&](const std::vector<int>& beta) {
    double acc = 0.0;
    for (int mask = 0; mask < (1 << degree); ++mask) {
      std::fill(v.begin(), v.end(), 0.0);
      int sign = 1;
      for (int k = 0; k < degree; ++k) {
        const int e = (mask >> k) & 1 ? 1 : -1;
        if (e < 0) sign = -sign;
        v[beta[k]] += e;
      }
      acc += sign * eval_monomials(monomials, v);
    }
    const double coeff = acc * norm;
    if (std::fabs(coeff) > drop) form.set_term(beta, coeff);
  });
  return form;
}

HomogeneousTerm::HomogeneousTerm(SymmetricForm form, std::vector<double> base,
                                 int term_degree)
    : form_(std::move(form)), base_(std::move(base)), term_degree_(term_degree) {
  if (term_degree_ < 1 || term_degree_ >= form_.degree())
    throw std::invalid_argument("HomogeneousTerm: degree must lie in {1..N-1}");
  if (static_cast<int>(base_.size()) != form_.dimension())
    throw std::invalid_argument("HomogeneousTerm: base dimension mismatch");
  binom_ = binom(form_.degree(), term_degree_);
}

double HomogeneousTerm::operator()(const std::vector<double>& h) const {
  return binom_ * form_.eval_mixed(base_, h, term_degree_);
}

SymmetricForm sum_of_even_powers_form(int degree, int dimension) {
  SymmetricForm f(degree, dimension);
  for (int i = 0; i < dimension; ++i)
    f.set_term(std::vector<int>(degree, i), 1.0);
  return f;
}

// ---------------------------------------------------------------------------
// NormDescriptor

NormDescriptor NormDescriptor::lp(double p, int dimension) {
  if (p < 1.0) throw std::invalid_argument("NormDescriptor::lp: p must be >= 1");
  if (dimension < 1) throw std::invalid_argument("NormDescriptor::lp: bad dimension");
  NormDescriptor n;
  n.kind_ = Kind::lp;
  n.p_ = p;
  n.dimension_ = dimension;
  return n;
}

NormDescriptor NormDescriptor::sup(int dimension) {
  if (dimension < 1) throw std::invalid_argument("NormDescriptor::sup: bad dimension");
  NormDescriptor n;
  n.kind_ = Kind::sup;
  n.dimension_ = dimension;
  return n;
}

NormDescriptor NormDescriptor::poly(SymmetricForm form, const SamplerConfig& cfg) {
  if (form.degree() % 2 != 0)
    throw std::invalid_argument("NormDescriptor::poly: degree must be even");
  const auto convexity = check_convexity(form, cfg);
  if (!convexity.convex)
    throw std::invalid_argument("NormDescriptor::poly: form is not convex");
  const auto sep = is_separating(form, NormDescriptor::lp(2.0, form.dimension()), cfg);
  if (!sep.separating)
    throw std::invalid_argument("NormDescriptor::poly: form is not separating");
  return poly_certified(std::move(form), sep.alpha);
}

NormDescriptor NormDescriptor::poly_certified(SymmetricForm form, double alpha) {
  NormDescriptor n;
  n.kind_ = Kind::poly;
  n.dimension_ = form.dimension();
  n.p_ = form.degree();
  n.alpha_ = alpha;
  n.form_ = std::move(form);
  return n;
}

NormDescriptor NormDescriptor::grid2d(std::vector<double> half_radii) {
  if (half_radii.size() < 3)
    throw std::invalid_argument("NormDescriptor::grid2d: need at least 3 radii");
  for (double r : half_radii)
    if (!(r > 0.0)) throw std::invalid_argument("NormDescriptor::grid2d: radii must be positive");
  NormDescriptor n;
  n.kind_ = Kind::grid2d;
  n.dimension_ = 2;
  n.radii_ = half_radii;                                        // [0, pi)
  n.radii_.insert(n.radii_.end(), half_radii.begin(), half_radii.end());  // mirror
  return n;
}

const SymmetricForm& NormDescriptor::form() const {
  if (!form_) throw std::logic_error("NormDescriptor::form: not a polynomial norm");
  return *form_;
}

std::string NormDescriptor::label() const {
  switch (kind_) {
    case Kind::lp: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "l%g", p_);
      return buf;
    }
    case Kind::sup:
      return "sup";
    case Kind::poly:
      return "poly" + std::to_string(form_->degree());
    case Kind::grid2d:
      return "grid2d";
  }
  return "?";
}

double NormDescriptor::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dimension_)
    throw std::invalid_argument("NormDescriptor: dimension mismatch");
  switch (kind_) {
    case Kind::lp: {
      if (p_ == 1.0) {
        double s = 0.0;
        for (double v : x) s += std::fabs(v);
        return s;
      }
      if (p_ == 2.0) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return std::sqrt(s);
      }
      double mx = 0.0;
      for (double v : x) mx = std::max(mx, std::fabs(v));
      if (mx == 0.0) return 0.0;
      double s = 0.0;
      for (double v : x) s += std::pow(std::fabs(v) / mx, p_);
      return mx * std::pow(s, 1.0 / p_);
    }
    case Kind::sup: {
      double mx = 0.0;
      for (double v : x) mx = std::max(mx, std::fabs(v));
      return mx;
    }
    case Kind::poly: {
      std::vector<double> v(x.begin(), x.end());
      return minkowski_norm(*this, v);
    }
    case Kind::grid2d: {
      const double e = std::hypot(x[0], x[1]);
      if (e == 0.0) return 0.0;
      double theta = std::atan2(x[1], x[0]);
      if (theta < 0) theta += 2.0 * M_PI;
      const size_t n = radii_.size();
      const double pos = theta / (2.0 * M_PI) * n;
      const size_t i = static_cast<size_t>(pos) % n;
      const double frac = pos - std::floor(pos);
      const double r = radii_[i] * (1.0 - frac) + radii_[(i + 1) % n] * frac;
      return e / r;
    }
  }
  return 0.0;
}

json NormDescriptor::to_json() const {
  switch (kind_) {
    case Kind::lp:
      return json{{"kind", "lp"}, {"p", p_}, {"dimension", dimension_}};
    case Kind::sup:
      return json{{"kind", "sup"}, {"dimension", dimension_}};
    case Kind::poly:
      return json{{"kind", "poly"}, {"form", form_->to_json()}, {"alpha", alpha_}};
    case Kind::grid2d: {
      std::vector<double> half(radii_.begin(), radii_.begin() + radii_.size() / 2);
      return json{{"kind", "grid2d"}, {"radii", half}};
    }
  }
  return {};
}

NormDescriptor NormDescriptor::from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "lp") return lp(j.at("p").get<double>(), j.at("dimension").get<int>());
  if (kind == "sup") return sup(j.at("dimension").get<int>());
  if (kind == "poly")
    return poly_certified(SymmetricForm::from_json(j.at("form")),
                          j.value("alpha", 0.0));
  if (kind == "grid2d") return grid2d(j.at("radii").get<std::vector<double>>());
  throw std::invalid_argument("NormDescriptor::from_json: unknown kind " + kind);
}

double eval_norm(const NormDescriptor& norm, const SparseSequence& x) {
  if (norm.kind() == NormDescriptor::Kind::sup) {
    double mx = 0.0;
    for (const auto& [i, v] : x.entries()) mx = std::max(mx, std::fabs(v));
    return mx;
  }
  if (norm.kind() == NormDescriptor::Kind::lp) {
    const double p = norm.p();
    double s = 0.0;
    for (const auto& [i, v] : x.entries()) s += std::pow(std::fabs(v), p);
    return std::pow(s, 1.0 / p);
  }
  throw std::invalid_argument("eval_norm: sequence evaluation needs an lp or sup norm");
}

double minkowski_norm(const NormDescriptor& poly_norm, const std::vector<double>& x) {
  if (poly_norm.kind() != NormDescriptor::Kind::poly)
    throw std::invalid_argument("minkowski_norm: descriptor is not a polynomial norm");
  if (!(poly_norm.separation_alpha() > 0.0))
    throw std::invalid_argument("minkowski_norm: form is not certified separating");
  bool zero = true;
  for (double v : x) zero = zero && v == 0.0;
  if (zero) return 0.0;
  const auto& form = poly_norm.form();
  return std::pow(form.eval_diagonal(x), 1.0 / form.degree());
}

double minkowski_norm_bisect(const SymmetricForm& form, const std::vector<double>& x,
                             double tol) {
  bool zero = true;
  for (double v : x) zero = zero && v == 0.0;
  if (zero) return 0.0;
  auto p_at = [&](double lambda) {
    std::vector<double> s(x.size());
    for (size_t i = 0; i < x.size(); ++i) s[i] = x[i] / lambda;
    return form.eval_diagonal(s);
  };
  double hi = 1.0;
  while (p_at(hi) > 1.0) hi *= 2.0;
  double lo = hi;
  while (p_at(lo) < 1.0) lo *= 0.5;
  // p_at is strictly decreasing in lambda for x != 0
  for (int i = 0; i < 200 && hi - lo > tol * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (p_at(mid) >= 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Certification

SeparationReport is_separating(const SymmetricForm& form,
                               const NormDescriptor& reference,
                               const SamplerConfig& cfg) {
  if (form.degree() % 2 != 0)
    throw std::invalid_argument("is_separating: degree must be even");
  const int d = form.dimension();

  auto on_sphere = [&](const std::vector<double>& raw) -> std::optional<std::vector<double>> {
    const double n = reference.eval(raw);
    if (n < 1e-12) return std::nullopt;
    std::vector<double> x(d);
    for (int i = 0; i < d; ++i) x[i] = raw[i] / n;
    return x;
  };

  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_raw;
  for (int k = 0; k < cfg.samples; ++k) {
    const auto raw = gaussian_ld_point(k, d, cfg.seed);
    const auto x = on_sphere(raw);
    if (!x) continue;
    const double v = form.eval_diagonal(*x);
    if (v < best) {
      best = v;
      best_raw = raw;
    }
  }

  auto objective = [&](const std::vector<double>& raw) {
    const auto x = on_sphere(raw);
    if (!x) return 1e100;
    return form.eval_diagonal(*x);
  };
  best = polish_coordinates(best_raw, objective, cfg.refine_iters);

  SeparationReport rep;
  rep.alpha = best;
  rep.witness = *on_sphere(best_raw);
  rep.separating = best > 1e-9;
  return rep;
}

ConvexityReport check_convexity(const SymmetricForm& form, const SamplerConfig& cfg) {
  const int d = form.dimension();
  const double eps_list[] = {1e-2, 1e-1, 0.5};

  auto violation = [&](const std::vector<double>& x, const std::vector<double>& h,
                       ConvexityReport& rep) {
    for (double eps : eps_list) {
      std::vector<double> xp(d), xm(d);
      for (int i = 0; i < d; ++i) {
        xp[i] = x[i] + eps * h[i];
        xm[i] = x[i] - eps * h[i];
      }
      const double gap = form.eval_diagonal(xp) + form.eval_diagonal(xm) -
                         2.0 * form.eval_diagonal(x);
      const double scale =
          1.0 + std::fabs(form.eval_diagonal(xp)) + std::fabs(form.eval_diagonal(xm));
      if (gap < -1e-9 * scale) {
        rep = {false, x, h, gap};
        return true;
      }
    }
    if (form.degree() == 4) {
      const double a = form.eval_mixed(x, h, 2);
      if (a < -1e-9 * (1.0 + std::fabs(form.eval_diagonal(x)))) {
        rep = {false, x, h, a};
        return true;
      }
    }
    return false;
  };

  ConvexityReport rep;
  // deterministic axis probes first
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      std::vector<double> x(d, 0.0), h(d, 0.0);
      x[i] = 1.0;
      h[j] = 1.0;
      if (violation(x, h, rep)) return rep;
    }
  }
  for (int k = 0; k < cfg.samples; ++k) {
    const auto z = gaussian_ld_point(k, 2 * d, cfg.seed + 1);
    std::vector<double> x(z.begin(), z.begin() + d), h(z.begin() + d, z.end());
    double hn = 0.0;
    for (double v : h) hn += v * v;
    hn = std::sqrt(hn);
    if (hn < 1e-12) continue;
    for (double& v : h) v /= hn;
    if (violation(x, h, rep)) return rep;
  }
  return rep;
}

}  // namespace convkit::normcore
