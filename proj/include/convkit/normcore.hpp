#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "convkit/sampler.hpp"
#include "json.hpp"

namespace convkit::normcore {

using json = nlohmann::json;

// Finitely supported sequence: index (>= 1) -> nonzero value.  Models
// elements of the classical sequence spaces; zeros are never stored.
class SparseSequence {
 public:
  SparseSequence() = default;
  static SparseSequence unit(int index, double value = 1.0);

  void set(int index, double value);  // value 0 erases the entry
  double get(int index) const;
  int max_support() const;  // 0 for the zero sequence
  bool empty() const { return entries_.empty(); }
  const std::map<int, double>& entries() const { return entries_; }

  SparseSequence plus(const SparseSequence& other) const;
  SparseSequence scaled(double s) const;

 private:
  std::map<int, double> entries_;
};

// Symmetric N-linear form A with A(x,...,x) = P(x) for the N-homogeneous
// polynomial P it houses.  Coefficients are stored once per orbit of index
// permutations (sorted index tuple, 0-based); the orbit multiplicity
// N!/prod(m_i!) is applied at evaluation time.
class SymmetricForm {
 public:
  SymmetricForm(int degree, int dimension);

  int degree() const { return degree_; }
  int dimension() const { return dimension_; }
  const std::map<std::vector<int>, double>& terms() const { return terms_; }

  void set_term(std::vector<int> sorted_index, double coeff);

  // Generic multilinear evaluation, one vector per slot.  O(d^N).
  double eval(std::span<const std::vector<double>> args) const;

  // P(x) = A(x,...,x) through the orbit expansion.
  double eval_diagonal(const std::vector<double>& x) const;

  // A(x,...,x,h,...,h) with `h_count` trailing h slots.
  double eval_mixed(const std::vector<double>& x, const std::vector<double>& h,
                    int h_count) const;

  // Coefficients c_0..c_N of t -> P(x + t h); c_i = C(N,i) A(x^{N-i}, h^i).
  std::vector<double> binomial_coefficients(const std::vector<double>& x,
                                            const std::vector<double>& h) const;

  json to_json() const;
  static SymmetricForm from_json(const json& j);

 private:
  int degree_;
  int dimension_;
  std::map<std::vector<int>, double> terms_;
};

// Builds the symmetric form of an N-homogeneous polynomial given as a
// monomial map (exponent vector of length d, summing to N -> coefficient),
// via the sign-averaged polarization identity
//   A(v_1,..,v_N) = 2^{-N}/N! sum_{e in {-1,1}^N} e_1..e_N P(sum e_k v_k).
// Throws if any monomial is not of total degree N.
SymmetricForm polarize(const std::map<std::vector<int>, double>& monomials,
                       int degree, int dimension);

// The i-homogeneous piece of h -> P(x + h) at a fixed base point:
//   P(x + h) = sum_i term_i(h),  term_i(h) = C(N,i) A(x,..,x,h,..,h)
// with i slots of h, so term_i(s h) = s^i term_i(h).
class HomogeneousTerm {
 public:
  HomogeneousTerm(SymmetricForm form, std::vector<double> base, int term_degree);
  int degree() const { return term_degree_; }
  double operator()(const std::vector<double>& h) const;

 private:
  SymmetricForm form_;
  std::vector<double> base_;
  int term_degree_;
  double binom_;
};

// Convenience forms used throughout the tests and the CLI.
SymmetricForm sum_of_even_powers_form(int degree, int dimension);  // P = sum x_i^N

struct SeparationReport {
  bool separating = false;
  double alpha = 0.0;              // empirical min of P on the reference sphere
  std::vector<double> witness;     // argmin, or the counterexample point
  // Sampling certifies one side only: alpha is an upper bound of the true
  // infimum over the sphere.
  std::string bound_direction = "upper";
};

struct ConvexityReport {
  bool convex = true;
  std::vector<double> x, h;  // violating pair when convex == false
  double value = 0.0;        // offending second difference (or A(x,x,h,h))
};

class NormDescriptor;

// Empirical minimum of P over the unit sphere of `reference`, with local
// refinement.  P(x) <= 1e-9 at the refined minimizer counts as a
// counterexample to separation.
SeparationReport is_separating(const SymmetricForm& form,
                               const NormDescriptor& reference,
                               const SamplerConfig& cfg = {});

// Samples second directional differences P(x+eh)+P(x-eh)-2P(x) (and, for
// degree 4, A(x,x,h,h) directly) and reports the first violation.
ConvexityReport check_convexity(const SymmetricForm& form,
                                const SamplerConfig& cfg = {});

// A norm at evaluation granularity: lp, sup, certified polynomial norm, or a
// 2-d gauge sampled on the unit ball boundary.
class NormDescriptor {
 public:
  enum class Kind { lp, sup, poly, grid2d };

  static NormDescriptor lp(double p, int dimension);
  static NormDescriptor sup(int dimension);
  // Certifies the form (convexity + separation against the euclidean sphere)
  // and throws std::invalid_argument when certification fails.
  static NormDescriptor poly(SymmetricForm form, const SamplerConfig& cfg = {});
  // Re-attach a previously certified form (deserialization path).
  static NormDescriptor poly_certified(SymmetricForm form, double alpha);
  // radii sampled at uniform angles over [0, pi); mirrored to [0, 2pi) so the
  // gauge is absolutely homogeneous.
  static NormDescriptor grid2d(std::vector<double> half_radii);

  Kind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  double p() const { return p_; }
  const SymmetricForm& form() const;
  double separation_alpha() const { return alpha_; }
  std::string label() const;

  double operator()(std::span<const double> x) const;
  double eval(const std::vector<double>& x) const { return (*this)(x); }

  json to_json() const;
  static NormDescriptor from_json(const json& j);

 private:
  NormDescriptor() = default;
  Kind kind_ = Kind::lp;
  int dimension_ = 0;
  double p_ = 2.0;
  std::optional<SymmetricForm> form_;
  double alpha_ = 0.0;
  std::vector<double> radii_;  // grid2d, full circle
};

// eval_norm over the sequence model; valid for lp and sup kinds.
double eval_norm(const NormDescriptor& norm, const SparseSequence& x);

// |||x||| = P(x)^{1/N} for a certified polynomial norm; 0 at x = 0.
double minkowski_norm(const NormDescriptor& poly_norm, const std::vector<double>& x);

// Oracle route: solves P(x/lambda) = 1 by bracketed bisection.  Used to
// cross-check minkowski_norm in the tests and the CLI.
double minkowski_norm_bisect(const SymmetricForm& form, const std::vector<double>& x,
                             double tol = 1e-13);

}  // namespace convkit::normcore
