#include "vertisplit/split_correlation.hpp"

#include <algorithm>
#include <cmath>

#include "vertisplit/errors.hpp"
#include "vertisplit/random.hpp"

namespace vsplit {

std::vector<std::size_t> default_counts(std::size_t num_features, int parties) {
    if (parties < 1) throw InvalidArgument("need at least one party");
    const auto k = static_cast<std::size_t>(parties);
    if (num_features < k)
        throw InvalidArgument("cannot split " + std::to_string(num_features) + " features into " +
                              std::to_string(k) + " non-empty parties");
    std::vector<std::size_t> counts(k, num_features / k);
    for (std::size_t i = 0; i < num_features % k; ++i) ++counts[i];
    return counts;
}

void validate_counts(const std::vector<std::size_t>& counts, std::size_t num_features) {
    if (counts.empty()) throw InvalidArgument("party sizes are empty");
    std::size_t total = 0;
    for (auto c : counts) {
        if (c == 0) throw InvalidArgument("every party size must be >= 1");
        total += c;
    }
    if (total != num_features)
        throw InvalidArgument("party sizes sum to " + std::to_string(total) + " but there are " +
                              std::to_string(num_features) + " features");
}

namespace {

std::vector<std::vector<std::size_t>> cut(const std::vector<std::size_t>& perm,
                                          const std::vector<std::size_t>& counts) {
    std::vector<std::vector<std::size_t>> groups(counts.size());
    std::size_t pos = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        groups[k].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                         perm.begin() + static_cast<std::ptrdiff_t>(pos + counts[k]));
        pos += counts[k];
    }
    return groups;
}

std::vector<double> keys_of(const std::vector<std::size_t>& perm) {
    std::vector<double> keys(perm.size());
    for (std::size_t pos = 0; pos < perm.size(); ++pos)
        keys[perm[pos]] = static_cast<double>(pos) / static_cast<double>(perm.size());
    return keys;
}

}  // namespace

std::vector<std::size_t> clustered_order(const IcorEvaluator& eval, const std::vector<std::size_t>& counts) {
    const auto m = eval.num_features();
    validate_counts(counts, m);
    const Matrix strength = eval.correlation().cwiseAbs();
    std::vector<bool> used(m, false);
    std::vector<std::size_t> order;
    order.reserve(m);
    for (auto size : counts) {
        // Open each party with the feature most tied to the rest of the pool.
        std::vector<double> link(m, 0.0);
        std::size_t first = m;
        double best = -1.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (used[j]) continue;
            double t = 0.0;
            for (std::size_t i = 0; i < m; ++i)
                if (!used[i] && i != j) t += strength(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (t > best) best = t, first = j;
        }
        for (std::size_t n = 0; n < size; ++n) {
            std::size_t pick = first;
            if (n > 0) {
                best = -1.0;
                for (std::size_t j = 0; j < m; ++j)
                    if (!used[j] && link[j] > best) best = link[j], pick = j;
            }
            used[pick] = true;
            order.push_back(pick);
            for (std::size_t j = 0; j < m; ++j)
                link[j] += strength(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(pick));
        }
    }
    return order;
}

std::vector<std::size_t> interleaved_order(const std::vector<std::size_t>& order, const std::vector<std::size_t>& counts) {
    validate_counts(counts, order.size());
    std::vector<std::vector<std::size_t>> parties(counts.size());
    std::size_t k = 0;
    for (auto f : order) {
        while (parties[k].size() == counts[k]) k = (k + 1) % counts.size();
        parties[k].push_back(f);
        k = (k + 1) % counts.size();
    }
    std::vector<std::size_t> out;
    for (const auto& p : parties) out.insert(out.end(), p.begin(), p.end());
    return out;
}

PolishResult swap_polish(const PermutationObjective& objective, std::vector<std::size_t> perm,
                         const std::vector<std::size_t>& counts, bool parallel, double stop_at_or_below) {
    validate_counts(counts, perm.size());
    std::vector<std::size_t> party_of(perm.size());
    for (std::size_t k = 0, pos = 0; k < counts.size(); ++k)
        for (std::size_t c = 0; c < counts[k]; ++c) party_of[pos++] = k;

    std::vector<std::pair<std::size_t, std::size_t>> moves;
    for (std::size_t a = 0; a < perm.size(); ++a)
        for (std::size_t b = a + 1; b < perm.size(); ++b)
            if (party_of[a] != party_of[b]) moves.emplace_back(a, b);

    PolishResult out{std::move(perm), 0.0, 0};
    out.value = objective(out.permutation);
    std::vector<double> scores(moves.size());
    while (out.value > stop_at_or_below && !moves.empty()) {
        const auto n = static_cast<std::ptrdiff_t>(moves.size());
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            auto trial = out.permutation;
            const auto [a, b] = moves[static_cast<std::size_t>(i)];
            std::swap(trial[a], trial[b]);
            scores[static_cast<std::size_t>(i)] = objective(trial);
        }
        const auto best = static_cast<std::size_t>(std::min_element(scores.begin(), scores.end()) - scores.begin());
        if (!(scores[best] < out.value - 1e-12)) break;
        std::swap(out.permutation[moves[best].first], out.permutation[moves[best].second]);
        out.value = scores[best];
        ++out.swaps;
    }
    return out;
}

double icor_of_permutation(const IcorEvaluator& eval, const std::vector<std::size_t>& perm,
                           const std::vector<std::size_t>& counts) {
    validate_counts(counts, eval.num_features());
    if (perm.size() != eval.num_features()) throw InvalidArgument("permutation has the wrong length");
    return eval.icor(cut(perm, counts));
}

double icor_of_permutation(const GlobalDataset& ds, const std::vector<std::size_t>& perm,
                           const std::vector<std::size_t>& counts, const PcorOptions& opts) {
    return icor_of_permutation(IcorEvaluator(ds.features, opts), perm, counts);
}

ExtremeResult optimize_extreme(const IcorEvaluator& eval, const std::vector<std::size_t>& counts,
                               Direction direction, const BrkgaConfig& cfg, bool parallel) {
    validate_counts(counts, eval.num_features());
    if (counts.size() < 2) throw InvalidArgument("Icor requires K >= 2 parties");
    const double sign = direction == Direction::minimize ? 1.0 : -1.0;
    auto objective = [&](const std::vector<std::size_t>& perm) {
        return sign * eval.icor(cut(perm, counts));
    };
    BrkgaRunOptions run;
    run.parallel = parallel;
    run.initial_keys.push_back(identity_keys(eval.num_features()));
    const auto clustered = clustered_order(eval, counts);
    run.initial_keys.push_back(keys_of(direction == Direction::minimize ? clustered
                                                                        : interleaved_order(clustered, counts)));
    const auto r = brkga_minimize(eval.num_features(), objective, cfg, run);
    if (!cfg.swap_polish) return {r.best_permutation, sign * r.best_value, r.generations_used};
    const auto p = swap_polish(objective, r.best_permutation, counts, parallel);
    return {p.permutation, sign * p.value, r.generations_used};
}

CorrSplitResult split_by_correlation(const IcorEvaluator& eval, double beta,
                                     const std::vector<std::size_t>& counts, const BrkgaConfig& cfg,
                                     bool parallel) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidArgument("beta must lie in [0, 1]");
    validate_counts(counts, eval.num_features());
    if (counts.size() < 2) throw InvalidArgument("correlation split requires K >= 2 parties");
    cfg.validate();

    BrkgaConfig lo_cfg = cfg, hi_cfg = cfg, target_cfg = cfg;
    lo_cfg.seed = mix_seed(cfg.seed, 0);
    hi_cfg.seed = mix_seed(cfg.seed, 1);
    target_cfg.seed = mix_seed(cfg.seed, 2);

    const auto lo = optimize_extreme(eval, counts, Direction::minimize, lo_cfg, parallel);
    const auto hi = optimize_extreme(eval, counts, Direction::maximize, hi_cfg, parallel);

    CorrSplitResult out;
    out.icor_min = lo.value;
    out.icor_max = hi.value;
    out.icor_target = interpolate_target(lo.value, hi.value, beta);
    out.generations_used = lo.generations_used + hi.generations_used;

    auto objective = [&](const std::vector<std::size_t>& perm) {
        return std::abs(eval.icor(cut(perm, counts)) - out.icor_target);
    };
    BrkgaRunOptions run;
    run.parallel = parallel;
    run.stop_at_or_below = cfg.target_tolerance;
    // Both extremes are known points; seeding them gives the search either end of the range.
    run.initial_keys.push_back(identity_keys(eval.num_features()));
    for (const auto* ext : {&lo, &hi}) run.initial_keys.push_back(keys_of(ext->permutation));
    const auto best = brkga_minimize(eval.num_features(), objective, target_cfg, run);

    out.permutation = best.best_permutation;
    if (cfg.swap_polish && best.best_value > cfg.target_tolerance)
        out.permutation = swap_polish(objective, out.permutation, counts, parallel, cfg.target_tolerance).permutation;
    out.partition = PartyPartition::from_blocks(out.permutation, counts);
    out.icor_achieved = eval.icor(cut(out.permutation, counts));
    out.gap = std::abs(out.icor_achieved - out.icor_target);
    out.generations_used += best.generations_used;
    return out;
}

CorrSplitResult split_by_correlation(const GlobalDataset& ds, double beta,
                                     const std::vector<std::size_t>& counts, const BrkgaConfig& cfg,
                                     const PcorOptions& opts, bool parallel) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidArgument("beta must lie in [0, 1]");
    return split_by_correlation(IcorEvaluator(ds.features, opts), beta, counts, cfg, parallel);
}

}  // namespace vsplit
