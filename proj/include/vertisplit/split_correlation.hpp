#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "vertisplit/brkga.hpp"
#include "vertisplit/corr_metrics.hpp"
#include "vertisplit/dataset_io.hpp"

namespace vsplit {

enum class Direction { minimize, maximize };

// Equal party sizes; the remainder goes to the lowest-indexed parties.
std::vector<std::size_t> default_counts(std::size_t num_features, int parties);

// Throws InvalidArgument unless every count is >= 1 and they sum to m.
void validate_counts(const std::vector<std::size_t>& counts, std::size_t num_features);

// Icor after reordering columns by `perm` and cutting them into consecutive
// blocks of the given sizes.
double icor_of_permutation(const IcorEvaluator& eval, const std::vector<std::size_t>& perm,
                           const std::vector<std::size_t>& counts);
double icor_of_permutation(const GlobalDataset& ds, const std::vector<std::size_t>& perm,
                           const std::vector<std::size_t>& counts, const PcorOptions& opts);

// Greedy correlation clustering laid out party by party: each party opens with
// the unplaced feature of largest summed |corr| to the pool and then takes the
// feature most correlated with its members. Seeds the minimizing search.
std::vector<std::size_t> clustered_order(const IcorEvaluator& eval, const std::vector<std::size_t>& counts);

// Deals `order` round-robin across the parties (skipping full ones): every
// party samples each cluster. Seeds the maximizing search.
std::vector<std::size_t> interleaved_order(const std::vector<std::size_t>& order,
                                           const std::vector<std::size_t>& counts);

struct PolishResult {
    std::vector<std::size_t> permutation;
    double value = 0.0;
    std::size_t swaps = 0;
};

// Best-improvement local search over exchanges of two features held by
// different parties, run until no exchange lowers `objective` or it reaches
// stop_at_or_below. Candidate exchanges are scored in parallel; ties go to the
// first exchange in scan order, so the result does not depend on thread count.
PolishResult swap_polish(const PermutationObjective& objective, std::vector<std::size_t> perm,
                         const std::vector<std::size_t>& counts, bool parallel = true,
                         double stop_at_or_below = -std::numeric_limits<double>::infinity());

struct ExtremeResult {
    std::vector<std::size_t> permutation;
    double value = 0.0;
    std::size_t generations_used = 0;
};

// Smallest or largest Icor reachable under the given party sizes: BRKGA search
// followed by swap_polish when cfg.swap_polish is set.
ExtremeResult optimize_extreme(const IcorEvaluator& eval, const std::vector<std::size_t>& counts,
                               Direction direction, const BrkgaConfig& cfg, bool parallel = true);

struct CorrSplitResult {
    PartyPartition partition;
    std::vector<std::size_t> permutation;
    double icor_achieved = 0.0;
    double icor_min = 0.0;
    double icor_max = 0.0;
    double icor_target = 0.0;
    double gap = 0.0;
    std::size_t generations_used = 0;
};

inline double interpolate_target(double icor_min, double icor_max, double beta) {
    return (1.0 - beta) * icor_min + beta * icor_max;
}

// Finds bounds, interpolates the target (1 - beta) * min + beta * max and
// searches for the permutation whose split is closest to it. The three
// searches use seeds derived from cfg.seed.
CorrSplitResult split_by_correlation(const IcorEvaluator& eval, double beta,
                                     const std::vector<std::size_t>& counts, const BrkgaConfig& cfg,
                                     bool parallel = true);
CorrSplitResult split_by_correlation(const GlobalDataset& ds, double beta,
                                     const std::vector<std::size_t>& counts, const BrkgaConfig& cfg,
                                     const PcorOptions& opts, bool parallel = true);

}  // namespace vsplit
