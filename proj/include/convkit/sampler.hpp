#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace convkit {

// Shared configuration for every sampled estimate in the toolkit.  Estimates
// are deterministic given (seed, samples, refine_iters).
struct SamplerConfig {
  int samples = 4096;
  std::uint64_t seed = 42;
  int refine_iters = 200;       // coordinate line searches in the local polish
  int tail_directions = 64;     // sampled directions per tail subspace
};

// splitmix64; used to derive per-dimension scrambles from the seed.
std::uint64_t mix64(std::uint64_t v);

// k-th point of a seed-shifted Halton sequence mapped through Box-Muller.
// Returns `dim` independent standard normal coordinates; consecutive k give a
// low-discrepancy filling of Gaussian space.
std::vector<double> gaussian_ld_point(int k, int dim, std::uint64_t seed);

// Uniform [0,1) low-discrepancy scalar stream (seed-shifted van der Corput).
double uniform_ld_point(int k, std::uint64_t seed);

// Golden-section minimization of f on [a, b].
double golden_min(const std::function<double(double)>& f, double a, double b,
                  int iters = 60);

// Derivative-free coordinate polish: cycles golden-section line searches over
// the coordinates of `params`, shrinking the bracket each full sweep.
// Minimizes `objective`; returns the best value found and leaves `params` at
// the corresponding point.
double polish_coordinates(std::vector<double>& params,
                          const std::function<double(const std::vector<double>&)>& objective,
                          int iters, double initial_step = 0.5);

}  // namespace convkit
