#include "vertisplit/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "vertisplit/corr_metrics.hpp"
#include "vertisplit/errors.hpp"
#include "vertisplit/party_eval.hpp"
#include "vertisplit/random.hpp"
#include "vertisplit/split_correlation.hpp"
#include "vertisplit/split_importance.hpp"
#include "vertisplit/synthetic.hpp"

namespace vsplit::validate {

namespace {

using Json = nlohmann::json;

std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(hi - lo + 1));
}

SuiteResult pcor_mcor(const SuiteOptions& o) {
    Rng rng(mix_seed(o.seed, 101));
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const auto n = uniform_int(rng, 20, 200);
        const auto m = uniform_int(rng, 2, 16);
        const auto kind = t % 2 ? CorrelationKind::pearson : CorrelationKind::spearman;
        Matrix x = t % 3 == 0 ? synthetic::latent_factors(n, m, 2, 0.7, rng())
                              : synthetic::gaussian(n, m, rng());
        PcorOptions opts;
        opts.kind = kind;
        worst = std::max(worst, std::abs(pcor(x, x, opts) - mcor(x, kind)));
    }
    SuiteResult r;
    r.passed = worst <= 1e-9;
    r.details = {{"matrices", 100}, {"max_abs_diff", worst}, {"tolerance", 1e-9}};
    r.summary = "max |pcor(X,X) - mcor(X)| = " + std::to_string(worst);
    return r;
}

SuiteResult pcor_range(const SuiteOptions& o) {
    Rng rng(mix_seed(o.seed, 102));
    double lo = 1.0, hi = 0.0;
    std::size_t outside = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto n = uniform_int(rng, 5, 100);
        const auto mi = uniform_int(rng, 1, 20);
        auto mj = uniform_int(rng, 1, 19);
        if (mj >= mi) ++mj;
        Matrix both = t % 4 == 0 ? synthetic::latent_factors(n, mi + mj, 1 + t % 3, 0.3, rng())
                                 : synthetic::gaussian(n, mi + mj, rng());
        if (t % 5 == 0) both.col(0) = both.col(static_cast<Eigen::Index>(mi + mj - 1));  // duplicated column
        if (t % 7 == 0) both.col(1 % static_cast<Eigen::Index>(mi + mj)).setConstant(2.0);
        PcorOptions opts;
        opts.kind = t % 2 ? CorrelationKind::pearson : CorrelationKind::spearman;
        const double v = pcor(Matrix(both.leftCols(static_cast<Eigen::Index>(mi))),
                              Matrix(both.rightCols(static_cast<Eigen::Index>(mj))), opts);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        if (!(v >= 0.0 && v <= 1.0)) ++outside;
    }
    SuiteResult r;
    r.passed = outside == 0;
    r.details = {{"pairs", 1000}, {"min", lo}, {"max", hi}, {"outside", outside}};
    r.summary = "1000 pairs, pcor range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
    return r;
}

SuiteResult perfect_correlation(const SuiteOptions& o) {
    Rng rng(mix_seed(o.seed, 103));
    double worst = 0.0;
    Json per_m = Json::object();
    for (std::size_t m = 2; m <= 10; ++m) {
        const Matrix base = synthetic::gaussian(50, 1, rng());
        const Matrix x = base.replicate(1, static_cast<Eigen::Index>(m));
        for (auto kind : {CorrelationKind::spearman, CorrelationKind::pearson}) {
            PcorOptions opts;
            opts.kind = kind;
            const double v = pcor(x, x, opts);
            worst = std::max(worst, std::abs(v - 1.0));
            per_m[std::to_string(m) + "/" + std::string(to_string(kind))] = v;
        }
    }
    SuiteResult r;
    r.passed = worst <= 1e-6;
    r.details = {{"values", per_m}, {"max_abs_error", worst}};
    r.summary = "max |pcor - 1| = " + std::to_string(worst);
    return r;
}

// All ways of choosing `k` of `n` items, as ascending index lists.
void combinations(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
                  std::vector<std::vector<std::size_t>>& out) {
    if (cur.size() == k) {
        out.push_back(cur);
        return;
    }
    for (std::size_t i = start; i + (k - cur.size()) <= n; ++i) {
        cur.push_back(i);
        combinations(n, k, i + 1, cur, out);
        cur.pop_back();
    }
}

SuiteResult icor_bounds(const SuiteOptions& o) {
    constexpr double kTieTol = 1e-9;
    bool ok = true;
    Json per_m = Json::array();
    for (std::size_t m : {2, 3, 4}) {
        const auto ds = synthetic::two_block_copies(m);
        const PcorOptions opts;
        std::vector<std::vector<std::size_t>> subsets;
        std::vector<std::size_t> cur;
        combinations(2 * m, m, 0, cur, subsets);

        std::vector<double> values;
        std::vector<std::size_t> u_of;
        for (const auto& s : subsets) {
            std::vector<int> assignment(2 * m, 1);
            for (auto j : s) assignment[j] = 0;
            values.push_back(icor(ds, PartyPartition(assignment, 2, true), opts));
            u_of.push_back(static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [&](auto j) { return j < m; })));
        }
        const double vmin = *std::min_element(values.begin(), values.end());
        const double vmax = *std::max_element(values.begin(), values.end());

        std::size_t argmin_count = 0;
        bool argmin_are_blocks = true, interleaved_are_max = true, max_only_interleaved = true;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const std::size_t u = u_of[i];
            const bool block = u == 0 || u == m;
            const bool interleaved = u == m / 2 || u == (m + 1) / 2;
            if (values[i] <= vmin + kTieTol) {
                ++argmin_count;
                argmin_are_blocks = argmin_are_blocks && block;
            }
            if (interleaved && values[i] < vmax - kTieTol) interleaved_are_max = false;
            if (values[i] >= vmax - kTieTol && !interleaved) max_only_interleaved = false;
        }
        const bool nonpositive = vmax <= 1e-9;

        IcorEvaluator eval(ds.features, opts);
        const std::vector<std::size_t> counts{m, m};
        BrkgaConfig cfg;
        cfg.seed = mix_seed(o.seed, 104 + m);
        const auto lo = optimize_extreme(eval, counts, Direction::minimize, cfg, o.parallel);
        cfg.seed = mix_seed(o.seed, 204 + m);
        const auto hi = optimize_extreme(eval, counts, Direction::maximize, cfg, o.parallel);
        const bool brkga_ok = std::abs(lo.value - vmin) <= 1e-6 && std::abs(hi.value - vmax) <= 1e-6;

        const bool pass = argmin_count == 2 && argmin_are_blocks && interleaved_are_max &&
                          max_only_interleaved && nonpositive && brkga_ok;
        ok = ok && pass;
        per_m.push_back({{"m", m},
                         {"splits", subsets.size()},
                         {"enumerated_min", vmin},
                         {"enumerated_max", vmax},
                         {"minimizers", argmin_count},
                         {"minimizers_are_block_splits", argmin_are_blocks},
                         {"interleaved_are_maximizers", interleaved_are_max && max_only_interleaved},
                         {"brkga_min", lo.value},
                         {"brkga_max", hi.value},
                         {"pass", pass}});
    }
    SuiteResult r;
    r.passed = ok;
    r.details = {{"fixtures", per_m}};
    r.summary = ok ? "block split uniquely minimal, interleaved splits maximal, BRKGA matches enumeration"
                   : "Icor extremal structure violated";
    return r;
}

bool party_within_one_block(const PartyPartition& part, const std::vector<int>& block_of) {
    for (const auto& g : part.groups()) {
        std::set<int> blocks;
        for (auto j : g) blocks.insert(block_of[j]);
        if (blocks.size() != 1) return false;
    }
    return true;
}

SuiteResult reconstruction(const SuiteOptions& o) {
    constexpr int kSeeds = 20;
    int hits = 0;
    Json runs = Json::array();
    for (int s = 0; s < kSeeds; ++s) {
        const auto seed = mix_seed(o.seed, 300 + static_cast<std::uint64_t>(s));
        const auto blocks = synthetic::independent_blocks(3, 10, 400, seed);
        BrkgaConfig cfg;
        cfg.seed = seed;
        const auto res = split_by_correlation(blocks.data, 0.0, default_counts(30, 3), cfg, PcorOptions{},
                                              o.parallel);
        const bool hit = party_within_one_block(res.partition, blocks.block_of);
        hits += hit ? 1 : 0;
        runs.push_back({{"seed", seed}, {"reconstructed", hit}, {"icor", res.icor_achieved},
                        {"icor_min", res.icor_min}});
    }
    const double rate = static_cast<double>(hits) / kSeeds;
    SuiteResult r;
    r.passed = rate >= 0.95;
    r.details = {{"runs", runs}, {"reconstruction_rate", rate}, {"threshold", 0.95}};
    r.summary = std::to_string(hits) + "/" + std::to_string(kSeeds) + " seeds reconstruct the block split";
    return r;
}

// Per-party importance shares for one split under a fixed per-feature importance.
std::vector<double> shares(const PartyPartition& part, const std::vector<double>& importance) {
    std::vector<double> s(static_cast<std::size_t>(part.num_parties()), 0.0);
    const double total = std::accumulate(importance.begin(), importance.end(), 0.0);
    for (std::size_t j = 0; j < importance.size(); ++j)
        s[static_cast<std::size_t>(part.assignment()[j])] += importance[j] / total;
    return s;
}

SuiteResult dirichlet(const SuiteOptions& o) {
    constexpr int kSeeds = 200;
    constexpr std::size_t kFeatures = 1000;
    const std::vector<double> importance(kFeatures, 1.0);

    const std::vector<double> alphas{1.0, 2.0, 7.0};
    std::vector<double> mean(3, 0.0);
    for (int s = 0; s < kSeeds; ++s) {
        DirichletSpec spec{alphas, true, mix_seed(o.seed, 400 + static_cast<std::uint64_t>(s))};
        const auto sh = shares(split_by_importance(kFeatures, spec), importance);
        for (std::size_t i = 0; i < 3; ++i) mean[i] += sh[i] / kSeeds;
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < 3; ++i) worst = std::max(worst, std::abs(mean[i] - alphas[i] / 10.0));
    const bool proportional = worst <= 0.02;

    std::vector<double> stds;
    for (double a : {0.1, 1.0, 10.0, 100.0}) {
        double sum = 0.0, sum_sq = 0.0;
        std::size_t count = 0;
        for (int s = 0; s < kSeeds; ++s) {
            auto spec = DirichletSpec::symmetric(4, a, mix_seed(o.seed, 600 + static_cast<std::uint64_t>(s)));
            for (double v : shares(split_by_importance(kFeatures, spec), importance)) {
                sum += v;
                sum_sq += v * v;
                ++count;
            }
        }
        const double mu = sum / static_cast<double>(count);
        stds.push_back(std::sqrt(std::max(0.0, sum_sq / static_cast<double>(count) - mu * mu)));
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < stds.size(); ++i) decreasing = decreasing && stds[i] < stds[i - 1];

    SuiteResult r;
    r.passed = proportional && decreasing;
    r.details = {{"mean_shares", mean},
                 {"expected", {0.1, 0.2, 0.7}},
                 {"max_abs_error", worst},
                 {"tolerance", 0.02},
                 {"symmetric_alphas", {0.1, 1.0, 10.0, 100.0}},
                 {"share_std", stds},
                 {"std_strictly_decreasing", decreasing}};
    r.summary = "mean shares error " + std::to_string(worst) +
                (decreasing ? ", share std decreasing in alpha" : ", share std NOT decreasing");
    return r;
}

SuiteResult mean_alpha(const SuiteOptions&) {
    double worst = 0.0;
    for (int k = 2; k <= 8; ++k) {
        for (double a : {0.1, 1.0, 10.0, 100.0}) {
            const double sigma = dirichlet_mean_variance(std::vector<double>(static_cast<std::size_t>(k), a));
            worst = std::max(worst, std::abs(symmetric_alpha_for_mean_variance(sigma, k) - a));
        }
    }
    SuiteResult r;
    r.passed = worst <= 1e-9;
    r.details = {{"max_abs_error", worst}, {"tolerance", 1e-9}};
    r.summary = "max |alpha_recovered - alpha| = " + std::to_string(worst);
    return r;
}

SuiteResult beta_roundtrip(const SuiteOptions& o) {
    constexpr int kSeeds = 5;
    bool each_ok = true, mean_ok = true;
    Json per_beta = Json::array();
    for (double beta : {0.0, 0.3, 0.6, 1.0}) {
        double err_sum = 0.0, err_max = 0.0;
        Json estimates = Json::array();
        for (int s = 0; s < kSeeds; ++s) {
            const auto seed = mix_seed(o.seed, 700 + static_cast<std::uint64_t>(s));
            const auto blocks = synthetic::independent_blocks(3, 10, 400, seed);
            IcorEvaluator eval(blocks.data.features, PcorOptions{});
            BrkgaConfig cfg;
            cfg.seed = seed;
            const auto split = split_by_correlation(eval, beta, default_counts(30, 3), cfg, o.parallel);
            BrkgaConfig est_cfg;
            est_cfg.seed = mix_seed(seed, 99);
            const auto est = estimate_beta(eval, split.partition, est_cfg, BoundsMethod::brkga, o.parallel);
            const double err = std::abs(est.beta - beta);
            err_sum += err;
            err_max = std::max(err_max, err);
            estimates.push_back(est.beta);
        }
        const double err_mean = err_sum / kSeeds;
        each_ok = each_ok && err_max <= 0.15;
        mean_ok = mean_ok && err_mean <= 0.10;
        per_beta.push_back({{"beta", beta}, {"estimates", estimates}, {"max_abs_error", err_max},
                            {"mean_abs_error", err_mean}});
    }
    SuiteResult r;
    r.passed = each_ok && mean_ok;
    r.details = {{"per_beta", per_beta}, {"per_seed_tolerance", 0.15}, {"mean_tolerance", 0.10}};
    r.summary = r.passed ? "beta recovered within tolerance for every target" : "beta round trip out of tolerance";
    return r;
}

SuiteResult truncation(const SuiteOptions& o) {
    // d_t covering the full dimension takes the exact path: error must be exactly 0.
    const Matrix small = synthetic::latent_factors(300, 150, 5, 0.5, mix_seed(o.seed, 801));
    PcorOptions exact;
    exact.truncate_rank = 1000;
    PcorOptions full = exact;
    full.truncate_rank = 150;
    const double e_small = pcor(small, small, exact);
    const double full_err = *pcor_relative_error(e_small, pcor(small, small, full));

    // Rank-deficient correlation (n < m): rank <= n - 1 < d_t < d.
    const Matrix wide = synthetic::gaussian(60, 300, mix_seed(o.seed, 802));
    PcorOptions wide_trunc = exact;
    wide_trunc.truncate_rank = 100;
    const double e_wide = pcor(wide, wide, exact);
    const double rank_err = *pcor_relative_error(e_wide, pcor(wide, wide, wide_trunc));

    const Matrix big = synthetic::latent_factors(1000, 500, 20, 1.0, mix_seed(o.seed, 803));
    const Matrix c = self_correlation(big, CorrelationKind::spearman);
    const double e_big = pcor_from_correlation(c, exact);
    std::vector<double> errors;
    for (std::size_t dt : {100, 400}) {
        PcorOptions t = exact;
        t.truncate_rank = dt;
        errors.push_back(*pcor_relative_error(e_big, pcor_from_correlation(c, t)));
    }

    SuiteResult r;
    r.passed = full_err == 0.0 && rank_err <= 1e-9 && errors[1] <= errors[0];
    r.details = {{"full_rank_truncation_error", full_err},
                 {"rank_covering_truncation_error", rank_err},
                 {"rank_covering_tolerance", 1e-9},
                 {"relative_error_dt100", errors[0]},
                 {"relative_error_dt400", errors[1]}};
    r.summary = "rel. error d_t=100: " + std::to_string(errors[0]) + ", d_t=400: " + std::to_string(errors[1]);
    return r;
}

SuiteResult shapley(const SuiteOptions& o) {
    const std::vector<double> c{1.0, 2.0, 3.0};
    const CharacteristicFn additive = [&](const std::vector<int>& s) {
        double v = 0.0;
        for (int i : s) v += c[static_cast<std::size_t>(i)];
        return v;
    };
    const auto add = party_shapley(3, additive, 0, o.seed, ShapleyMethod::exact_enumeration, o.parallel);
    double add_err = 0.0;
    for (std::size_t i = 0; i < 3; ++i) add_err = std::max(add_err, std::abs(add.per_party[i] - c[i]));

    // Party 3 never changes the value; parties 0-2 interact.
    const CharacteristicFn with_null = [](const std::vector<int>& s) {
        double lin = 0.0;
        for (int i : s)
            if (i != 3) lin += 1.0 + i;
        return lin * lin;
    };
    const auto nul = party_shapley(4, with_null, 0, o.seed, ShapleyMethod::exact_enumeration, o.parallel);
    const double null_value = std::abs(nul.per_party[3]);
    const double exact_eff =
        std::abs(std::accumulate(nul.per_party.begin(), nul.per_party.end(), 0.0) - nul.grand_value);

    const CharacteristicFn interacting = [](const std::vector<int>& s) {
        double lin = 0.0;
        for (int i : s) lin += 0.5 + 0.25 * i;
        return std::sqrt(lin) + 0.1 * static_cast<double>(s.size() * s.size());
    };
    const auto mc = party_shapley(12, interacting, 256, mix_seed(o.seed, 900), ShapleyMethod::monte_carlo,
                                  o.parallel);
    double se2 = 0.0;
    for (double s : mc.std_error) se2 += s * s;
    const double mc_eff = std::abs(std::accumulate(mc.per_party.begin(), mc.per_party.end(), 0.0) - mc.grand_value);
    const double mc_tol = 3.0 * std::sqrt(se2);

    SuiteResult r;
    r.passed = add_err <= 1e-12 && null_value <= 1e-12 && exact_eff <= 1e-12 && mc_eff <= mc_tol;
    r.details = {{"additive_values", add.per_party},
                 {"additive_max_error", add_err},
                 {"null_player_value", nul.per_party[3]},
                 {"exact_efficiency_gap", exact_eff},
                 {"monte_carlo_efficiency_gap", mc_eff},
                 {"monte_carlo_tolerance", mc_tol},
                 {"monte_carlo_permutations", mc.samples}};
    r.summary = "additive err " + std::to_string(add_err) + ", null " + std::to_string(null_value) +
                ", MC efficiency gap " + std::to_string(mc_eff);
    return r;
}

const std::map<std::string, std::function<SuiteResult(const SuiteOptions&)>>& registry() {
    static const std::map<std::string, std::function<SuiteResult(const SuiteOptions&)>> r{
        {"pcor-mcor", pcor_mcor},
        {"pcor-range", pcor_range},
        {"perfect-correlation", perfect_correlation},
        {"icor-bounds", icor_bounds},
        {"reconstruction", reconstruction},
        {"dirichlet", dirichlet},
        {"mean-alpha", mean_alpha},
        {"beta-roundtrip", beta_roundtrip},
        {"truncation", truncation},
        {"shapley", shapley},
    };
    return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{
        "pcor-mcor",  "pcor-range", "perfect-correlation", "icor-bounds", "reconstruction",
        "dirichlet",  "mean-alpha", "beta-roundtrip",      "truncation",  "shapley"};
    return names;
}

SuiteResult run_suite(const std::string& name, const SuiteOptions& options) {
    const auto it = registry().find(name);
    if (it == registry().end()) throw InvalidArgument("unknown validation suite '" + name + "'");
    const auto start = std::chrono::steady_clock::now();
    SuiteResult r = it->second(options);
    r.name = name;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace vsplit::validate
