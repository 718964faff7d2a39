#pragma once

#include <cstdint>
#include <vector>

#include "vertisplit/dataset_io.hpp"
#include "vertisplit/random.hpp"

namespace vsplit {

struct DirichletSpec {
    std::vector<double> alphas;
    bool guard_nonempty = true;
    std::uint64_t seed = 0;

    int num_parties() const { return static_cast<int>(alphas.size()); }
    // Throws InvalidArgument for an empty or non-positive alpha vector.
    void validate() const;
    // K copies of a scalar alpha.
    static DirichletSpec symmetric(int parties, double alpha, std::uint64_t seed = 0);
};

// Share vector r drawn from Dir(spec.alphas).
std::vector<double> sample_dirichlet(const DirichletSpec& spec, Rng& rng);

// Importance-based split of m features. One share vector r is drawn per call;
// with the guard on, K distinct uniformly chosen features seed the K parties
// and every other feature independently goes to party k with probability r_k.
// Deterministic in spec.seed. Throws InvalidArgument when the guard is on and m < K.
PartyPartition split_by_importance(std::size_t num_features, const DirichletSpec& spec);

inline PartyPartition split_by_importance(const GlobalDataset& ds, const DirichletSpec& spec) {
    return split_by_importance(ds.cols(), spec);
}

}  // namespace vsplit
