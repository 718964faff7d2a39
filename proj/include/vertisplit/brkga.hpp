#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace vsplit {

// Biased random-key genetic algorithm settings.
struct BrkgaConfig {
    std::size_t population_size = 100;
    double elite_fraction = 0.2;
    double mutant_fraction = 0.15;
    // Probability that a child gene comes from the elite parent.
    double elite_inherit_bias = 0.7;
    std::size_t max_generations = 200;
    // Stop after this many generations without improving the best value.
    std::size_t stall_generations = 30;
    // Target searches stop once |f - f*| falls below this.
    double target_tolerance = 1e-3;
    std::uint64_t seed = 0;
    // Finish split searches with a pairwise-exchange local search.
    bool swap_polish = true;

    void validate() const;
    std::size_t num_elites() const;
    std::size_t num_mutants() const;
};

// Stable argsort of the keys: ties keep the original index order.
std::vector<std::size_t> decode_keys(std::span<const double> keys);

// Objective over decoded permutations. Must be a pure function: it is called
// concurrently from worker threads.
using PermutationObjective = std::function<double(const std::vector<std::size_t>&)>;

struct BrkgaRunOptions {
    bool parallel = true;
    // Early exit once the best objective is at or below this value.
    std::optional<double> stop_at_or_below;
    // Genomes injected into the first generation (e.g. the identity order).
    std::vector<std::vector<double>> initial_keys;
};

struct BrkgaResult {
    std::vector<std::size_t> best_permutation;
    std::vector<double> best_keys;
    double best_value = 0.0;
    std::size_t generations_used = 0;
    std::size_t evaluations = 0;
};

// Minimizes `objective` over permutations of num_keys items. All randomness is
// drawn on the calling thread from cfg.seed, so the result does not depend on
// the number of worker threads.
BrkgaResult brkga_minimize(std::size_t num_keys, const PermutationObjective& objective,
                           const BrkgaConfig& cfg, const BrkgaRunOptions& run = {});

// Keys whose decoding is the identity permutation.
std::vector<double> identity_keys(std::size_t num_keys);

}  // namespace vsplit
