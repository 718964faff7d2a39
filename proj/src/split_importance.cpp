#include "vertisplit/split_importance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vertisplit/errors.hpp"

namespace vsplit {

void DirichletSpec::validate() const {
    if (alphas.empty()) throw InvalidArgument("need at least one party");
    for (double a : alphas)
        if (!(a > 0.0) || !std::isfinite(a))
            throw InvalidArgument("alpha values must be positive and finite");
}

DirichletSpec DirichletSpec::symmetric(int parties, double alpha, std::uint64_t seed) {
    if (parties < 1) throw InvalidArgument("need at least one party");
    DirichletSpec s;
    s.alphas.assign(static_cast<std::size_t>(parties), alpha);
    s.seed = seed;
    return s;
}

std::vector<double> sample_dirichlet(const DirichletSpec& spec, Rng& rng) {
    spec.validate();
    return sample_dirichlet(spec.alphas, rng);
}

PartyPartition split_by_importance(std::size_t num_features, const DirichletSpec& spec) {
    spec.validate();
    const auto k = spec.alphas.size();
    if (num_features < 1) throw InvalidArgument("dataset has no features");
    if (spec.guard_nonempty && num_features < k)
        throw InvalidArgument("cannot give each of " + std::to_string(k) + " parties a feature: only " +
                              std::to_string(num_features) + " features");

    Rng rng(spec.seed);
    const auto r = sample_dirichlet(spec.alphas, rng);
    std::vector<double> cdf(k);
    std::partial_sum(r.begin(), r.end(), cdf.begin());
    cdf.back() = 1.0;

    std::vector<int> assignment(num_features, -1);
    if (spec.guard_nonempty) {
        // Partial Fisher-Yates: the first k slots are a uniform k-subset in random order.
        std::vector<std::size_t> idx(num_features);
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t i = 0; i < k; ++i) {
            const auto span = num_features - i;
            const auto pick = i + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(span));
            std::swap(idx[i], idx[std::min(pick, num_features - 1)]);
            assignment[idx[i]] = static_cast<int>(i);
        }
    }
    for (std::size_t j = 0; j < num_features; ++j) {
        if (assignment[j] != -1) continue;
        const double u = uniform01(rng);
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        assignment[j] = static_cast<int>(std::min<std::size_t>(it - cdf.begin(), k - 1));
    }
    return PartyPartition(std::move(assignment), static_cast<int>(k), spec.guard_nonempty);
}

}  // namespace vsplit
