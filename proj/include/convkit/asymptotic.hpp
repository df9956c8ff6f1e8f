#pragma once

#include <functional>
#include <string>
#include <vector>

#include "convkit/envelope.hpp"
#include "convkit/moduli.hpp"
#include "convkit/normcore.hpp"
#include "convkit/sampler.hpp"
#include "json.hpp"

namespace convkit::asymptotic {

using json = nlohmann::json;
using normcore::SparseSequence;

// The sequence spaces of the model.
struct SequenceSpace {
  enum class Kind { lp, c0 };
  Kind kind = Kind::lp;
  double p = 2.0;

  static SequenceSpace lp(double p);
  static SequenceSpace c0();

  double norm(const SparseSequence& x) const;
  std::string label() const;
};

// span{e_k : k > m}; the computable stand-in for finite-codimensional
// subspaces.  For the symmetric norms lp and c0 the tail family attains the
// classical asymptotic moduli exactly; for generic functions results are
// one-sided tail-model bounds.
struct TailSubspace {
  int m = 0;
  TailSubspace() = default;
  explicit TailSubspace(int m_) : m(m_) {
    if (m < 0) throw std::invalid_argument("TailSubspace: m must be >= 0");
  }
};

enum class Mode { rho_bar, delta_bar };

struct AsymptoticModulusResult {
  double t = 0.0;
  double value = 0.0;
  Mode mode = Mode::rho_bar;
  std::string at;      // point label or "uniform over sample set"
  int subspace_index = 0;
  bool analytic = false;
  json metadata;

  json to_json() const;
};

// Asymptotic convexity of the norm at a unit finitely supported x:
//   sup_H inf { |x+h| - 1 : h in H, |h| >= t }
// over tail subspaces; constant once the tail clears the support, so the
// closed form is returned: lp -> (1+t^p)^{1/p} - 1, c0 -> max(1,t) - 1.
AsymptoticModulusResult tail_delta_norm(const SequenceSpace& space,
                                        const SparseSequence& x, double t);

// Mirror statement with sup over |h| <= t; same closed forms.
AsymptoticModulusResult tail_rho_norm(const SequenceSpace& space,
                                      const SparseSequence& x, double t);

// Sampled tail modulus of a scalar function on the model space.  Directions
// are drawn with support in {m+1,..,m+32} in sign-symmetric pairs, plus the
// single-coordinate extremes +-t e_{m+1}, and scaled onto the constraint.
// With use_absolute the integrand is |f(x+h) - f(x)| (rho mode only).
AsymptoticModulusResult tail_modulus_fn(
    const std::function<double(const SparseSequence&)>& f, const SequenceSpace& space,
    const SparseSequence& x, double t, Mode mode, bool use_absolute = true,
    const SamplerConfig& cfg = {});

struct FlatnessReport {
  bool flat = false;
  moduli::PowerFit fit;        // meaningful when flat == false
  moduli::ModulusCurve curve;  // sup over S of the pointwise moduli
};

// flat iff rho_f(t;x) <= 1e-12 on the whole grid and sample set; otherwise
// fits a power law to the uniform curve.
FlatnessReport flatness_and_power(const std::function<double(const SparseSequence&)>& f,
                                  const SequenceSpace& space,
                                  const std::vector<SparseSequence>& S,
                                  const std::vector<double>& t_grid,
                                  const SamplerConfig& cfg = {});

struct EnvelopeSmoothnessReport {
  moduli::ModulusCurve f_curve, conv_curve;
  moduli::PowerFit f_fit, conv_fit;
  double f_upper_constant = 0.0;     // max value / t^p over the grid
  double conv_upper_constant = 0.0;
  double factor = 4.0;
  bool bound_holds = false;  // conv curve <= factor * f_upper_constant * t^p
  json to_json() const;
};

// For f = phi(|.|_p): computes psi = radial envelope of phi, sets
// conv f = psi(|.|_p), and compares the uniform tail moduli of f and conv f
// over S against C t^p with C within `factor` of the constant fitted for f.
EnvelopeSmoothnessReport envelope_preserves_smoothness_demo(
    const envelope::GridFunction1D& phi, double p,
    const std::vector<SparseSequence>& S, const std::vector<double>& t_grid,
    const SamplerConfig& cfg = {}, double factor = 4.0);

// Deterministic sample points: finitely supported directions with prescribed
// radii (cycled), used by the demos and the verification suite.
std::vector<SparseSequence> model_points(const SequenceSpace& space,
                                         const std::vector<double>& radii, int count,
                                         std::uint64_t seed);

}  // namespace convkit::asymptotic
