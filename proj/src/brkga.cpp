#include "vertisplit/brkga.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vertisplit/errors.hpp"
#include "vertisplit/random.hpp"

namespace vsplit {

void BrkgaConfig::validate() const {
    if (population_size < 2) throw InvalidArgument("BRKGA population must be >= 2");
    if (!(elite_fraction > 0.0) || !(mutant_fraction >= 0.0) || elite_fraction + mutant_fraction >= 1.0)
        throw InvalidArgument("BRKGA needs elite_fraction > 0 and elite_fraction + mutant_fraction < 1");
    if (!(elite_inherit_bias >= 0.5 && elite_inherit_bias <= 1.0))
        throw InvalidArgument("BRKGA elite inheritance bias must lie in [0.5, 1]");
    if (max_generations < 1 || stall_generations < 1)
        throw InvalidArgument("BRKGA generation counts must be >= 1");
    if (!(target_tolerance >= 0.0)) throw InvalidArgument("BRKGA target tolerance must be >= 0");
}

std::size_t BrkgaConfig::num_elites() const {
    const auto e = static_cast<std::size_t>(std::ceil(elite_fraction * static_cast<double>(population_size)));
    return std::clamp<std::size_t>(e, 1, population_size - 1);
}

std::size_t BrkgaConfig::num_mutants() const {
    const auto m = static_cast<std::size_t>(std::floor(mutant_fraction * static_cast<double>(population_size)));
    return std::min(m, population_size - num_elites() - 1);
}

std::vector<std::size_t> decode_keys(std::span<const double> keys) {
    std::vector<std::size_t> perm(keys.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    return perm;
}

std::vector<double> identity_keys(std::size_t num_keys) {
    std::vector<double> keys(num_keys);
    for (std::size_t i = 0; i < num_keys; ++i)
        keys[i] = static_cast<double>(i) / static_cast<double>(num_keys);
    return keys;
}

namespace {

struct Individual {
    std::vector<double> keys;
    double value = 0.0;
};

void random_keys(std::vector<double>& keys, Rng& rng) {
    for (double& k : keys) k = uniform01(rng);
}

void evaluate(std::vector<Individual>& pop, std::size_t from, const PermutationObjective& objective,
              bool parallel) {
    const auto n = static_cast<std::ptrdiff_t>(pop.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(from); i < n; ++i) {
        auto& ind = pop[static_cast<std::size_t>(i)];
        ind.value = objective(decode_keys(ind.keys));
    }
}

// Best first; equal values keep their previous order.
void rank(std::vector<Individual>& pop) {
    std::stable_sort(pop.begin(), pop.end(),
                     [](const Individual& a, const Individual& b) { return a.value < b.value; });
}

}  // namespace

BrkgaResult brkga_minimize(std::size_t num_keys, const PermutationObjective& objective,
                           const BrkgaConfig& cfg, const BrkgaRunOptions& run) {
    cfg.validate();
    if (num_keys == 0) throw InvalidArgument("BRKGA needs at least one key");
    for (const auto& k : run.initial_keys)
        if (k.size() != num_keys) throw InvalidArgument("initial genome has the wrong length");

    Rng rng(cfg.seed);
    const std::size_t pop_size = cfg.population_size;
    const std::size_t elites = cfg.num_elites();
    const std::size_t mutants = cfg.num_mutants();

    std::vector<Individual> pop(pop_size, Individual{std::vector<double>(num_keys), 0.0});
    for (std::size_t i = 0; i < pop_size; ++i) {
        if (i < run.initial_keys.size())
            pop[i].keys = run.initial_keys[i];
        else
            random_keys(pop[i].keys, rng);
    }
    evaluate(pop, 0, objective, run.parallel);
    rank(pop);

    BrkgaResult result;
    result.evaluations = pop_size;
    double best = pop.front().value;
    std::size_t stall = 0;
    auto reached = [&] { return run.stop_at_or_below && best <= *run.stop_at_or_below; };

    std::vector<Individual> next(pop_size, Individual{std::vector<double>(num_keys), 0.0});
    while (!reached() && result.generations_used < cfg.max_generations && stall < cfg.stall_generations) {
        for (std::size_t i = 0; i < elites; ++i) next[i] = pop[i];
        std::size_t slot = elites;
        for (std::size_t i = 0; i < mutants; ++i, ++slot) random_keys(next[slot].keys, rng);
        for (; slot < pop_size; ++slot) {
            const auto& elite = pop[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(elites))];
            const auto other_idx =
                elites + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(pop_size - elites));
            const auto& other = pop[std::min(other_idx, pop_size - 1)];
            auto& child = next[slot].keys;
            for (std::size_t g = 0; g < num_keys; ++g)
                child[g] = uniform01(rng) < cfg.elite_inherit_bias ? elite.keys[g] : other.keys[g];
        }
        evaluate(next, elites, objective, run.parallel);
        result.evaluations += pop_size - elites;
        std::swap(pop, next);
        rank(pop);
        ++result.generations_used;

        if (pop.front().value < best) {
            best = pop.front().value;
            stall = 0;
        } else {
            ++stall;
        }
    }

    result.best_keys = pop.front().keys;
    result.best_permutation = decode_keys(result.best_keys);
    result.best_value = pop.front().value;
    return result;
}

}  // namespace vsplit
