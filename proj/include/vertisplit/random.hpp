#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace vsplit {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent sub-stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

double uniform01(Rng& rng);
double standard_normal(Rng& rng);

// Gamma(shape, 1) by Marsaglia-Tsang; shape < 1 uses the U^(1/shape) boost.
double sample_gamma(double shape, Rng& rng);

// One point on the probability simplex from Dir(alphas).
// Throws InvalidArgument when alphas is empty or has a non-positive entry.
std::vector<double> sample_dirichlet(const std::vector<double>& alphas, Rng& rng);

}  // namespace vsplit
