#include "convkit/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace convkit {

namespace {

constexpr int kPrimes[] = {2,   3,   5,   7,   11,  13,  17,  19,  23,  29,
                           31,  37,  41,  43,  47,  53,  59,  61,  67,  71,
                           73,  79,  83,  89,  97,  101, 103, 107, 109, 113,
                           127, 131, 137, 139};

double radical_inverse(int base, long long k) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (k > 0) {
    r += f * (k % base);
    k /= base;
    f *= inv;
  }
  return r;
}

double shifted01(int base_index, long long k, std::uint64_t seed) {
  const double shift =
      (mix64(seed + 0x9e3779b97f4a7c15ULL * (base_index + 1)) >> 11) * 0x1.0p-53;
  double u = radical_inverse(kPrimes[base_index], k + 1) + shift;
  u -= std::floor(u);
  return std::min(std::max(u, 1e-16), 1.0 - 1e-16);
}

}  // namespace

std::uint64_t mix64(std::uint64_t v) {
  v += 0x9e3779b97f4a7c15ULL;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
  return v ^ (v >> 31);
}

std::vector<double> gaussian_ld_point(int k, int dim, std::uint64_t seed) {
  if (dim <= 0) throw std::invalid_argument("gaussian_ld_point: dim must be positive");
  if (2 * ((dim + 1) / 2) > static_cast<int>(sizeof(kPrimes) / sizeof(int)))
    throw std::invalid_argument("gaussian_ld_point: dimension too large");
  std::vector<double> z(dim);
  for (int j = 0; 2 * j < dim; ++j) {
    const double u1 = shifted01(2 * j, k, seed);
    const double u2 = shifted01(2 * j + 1, k, seed);
    const double r = std::sqrt(-2.0 * std::log(u1));
    z[2 * j] = r * std::cos(2.0 * M_PI * u2);
    if (2 * j + 1 < dim) z[2 * j + 1] = r * std::sin(2.0 * M_PI * u2);
  }
  return z;
}

double uniform_ld_point(int k, std::uint64_t seed) { return shifted01(0, k, seed); }

double golden_min(const std::function<double(double)>& f, double a, double b,
                  int iters) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

double polish_coordinates(std::vector<double>& params,
                          const std::function<double(const std::vector<double>&)>& objective,
                          int iters, double initial_step) {
  const int n = static_cast<int>(params.size());
  if (n == 0) return objective(params);
  double best = objective(params);
  double step = initial_step;
  std::vector<double> trial = params;
  for (int it = 0; it < iters; ++it) {
    const int k = it % n;
    auto line = [&](double s) {
      trial = params;
      trial[k] += s;
      return objective(trial);
    };
    const double s = golden_min(line, -step, step, 48);
    const double v = line(s);
    if (v < best) {
      best = v;
      params[k] += s;
    }
    if (k == n - 1) step *= 0.7;  // shrink bracket once per sweep
    if (step < 1e-14) break;
  }
  return best;
}

}  // namespace convkit
