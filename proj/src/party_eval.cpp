#include "vertisplit/party_eval.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>

#include "vertisplit/errors.hpp"
#include "vertisplit/random.hpp"
#include "vertisplit/split_correlation.hpp"

namespace vsplit {

std::string_view to_string(ShapleyMethod method) {
    switch (method) {
        case ShapleyMethod::automatic: return "automatic";
        case ShapleyMethod::exact_enumeration: return "exact_enumeration";
        case ShapleyMethod::monte_carlo: return "monte_carlo";
    }
    return "unknown";
}

namespace {

using Mask = std::uint64_t;

std::vector<int> members(Mask mask, int parties) {
    std::vector<int> out;
    for (int i = 0; i < parties; ++i)
        if (mask & (Mask{1} << i)) out.push_back(i);
    return out;
}

std::string describe(const std::vector<int>& coalition) {
    std::string s = "{";
    for (std::size_t i = 0; i < coalition.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(coalition[i]);
    }
    return s + "}";
}

// Evaluates the game on every mask, in parallel, keyed by position.
std::vector<double> evaluate_masks(const std::vector<Mask>& masks, int parties,
                                   const CharacteristicFn& game, bool parallel) {
    std::vector<double> values(masks.size(), 0.0);
    std::vector<std::exception_ptr> errors(masks.size());
    const auto n = static_cast<std::ptrdiff_t>(masks.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            values[idx] = game(members(masks[idx], parties));
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    }
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!errors[i]) continue;
        const auto coalition = describe(members(masks[i], parties));
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw Error("characteristic_fn", "evaluation failed for coalition " + coalition + ": " + e.what());
        } catch (...) {
            throw Error("characteristic_fn", "evaluation failed for coalition " + coalition);
        }
    }
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i]))
            throw Error("characteristic_fn",
                        "non-finite value for coalition " + describe(members(masks[i], parties)));
    return values;
}

ShapleyEstimate exact_shapley(int parties, const CharacteristicFn& game, bool parallel) {
    const Mask full = (Mask{1} << parties) - 1;
    std::vector<Mask> masks(static_cast<std::size_t>(full) + 1);
    std::iota(masks.begin(), masks.end(), Mask{0});
    auto v = evaluate_masks(masks, parties, game, parallel);
    const double base = v[0];
    for (double& x : v) x -= base;

    // weight[s] = s! (K - s - 1)! / K!
    std::vector<double> weight(static_cast<std::size_t>(parties));
    for (int s = 0; s < parties; ++s) {
        double w = 1.0 / parties;
        // 1 / (K * C(K-1, s))
        for (int t = 1; t <= s; ++t) w *= static_cast<double>(t) / static_cast<double>(parties - t);
        weight[static_cast<std::size_t>(s)] = w;
    }

    ShapleyEstimate est;
    est.method = ShapleyMethod::exact_enumeration;
    est.samples = masks.size();
    est.per_party.assign(static_cast<std::size_t>(parties), 0.0);
    est.std_error.assign(static_cast<std::size_t>(parties), 0.0);
    for (int i = 0; i < parties; ++i) {
        const Mask bit = Mask{1} << i;
        double phi = 0.0;
        for (Mask s = 0; s <= full; ++s) {
            if (s & bit) continue;
            const auto size = static_cast<std::size_t>(std::popcount(s));
            phi += weight[size] * (v[s | bit] - v[s]);
        }
        est.per_party[static_cast<std::size_t>(i)] = phi;
    }
    est.grand_value = v[full];
    return est;
}

ShapleyEstimate sampled_shapley(int parties, const CharacteristicFn& game, std::size_t budget,
                                std::uint64_t seed, bool parallel) {
    if (budget < 2) throw InvalidArgument("Monte-Carlo Shapley needs a budget of at least 2 orderings");
    if (parties > 62) throw InvalidArgument("Monte-Carlo Shapley supports at most 62 parties");
    const auto k = static_cast<std::size_t>(parties);

    Rng rng(seed);
    std::vector<std::vector<int>> orders(budget, std::vector<int>(k));
    std::vector<Mask> needed{0};
    for (auto& order : orders) {
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = k - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i + 1));
            std::swap(order[i], order[std::min(j, i)]);
        }
        Mask prefix = 0;
        for (int p : order) {
            prefix |= Mask{1} << p;
            needed.push_back(prefix);
        }
    }
    std::sort(needed.begin(), needed.end());
    needed.erase(std::unique(needed.begin(), needed.end()), needed.end());
    const auto values = evaluate_masks(needed, parties, game, parallel);
    std::map<Mask, double> v;
    for (std::size_t i = 0; i < needed.size(); ++i) v.emplace(needed[i], values[i] - values[0]);

    std::vector<double> sum(k, 0.0), sum_sq(k, 0.0);
    for (const auto& order : orders) {
        Mask prefix = 0;
        double prev = 0.0;
        for (int p : order) {
            prefix |= Mask{1} << p;
            const double cur = v.at(prefix);
            const double delta = cur - prev;
            sum[static_cast<std::size_t>(p)] += delta;
            sum_sq[static_cast<std::size_t>(p)] += delta * delta;
            prev = cur;
        }
    }

    ShapleyEstimate est;
    est.method = ShapleyMethod::monte_carlo;
    est.samples = budget;
    const double b = static_cast<double>(budget);
    for (std::size_t i = 0; i < k; ++i) {
        const double mean = sum[i] / b;
        const double var = std::max(0.0, (sum_sq[i] - b * mean * mean) / (b - 1.0));
        est.per_party.push_back(mean);
        est.std_error.push_back(std::sqrt(var / b));
    }
    est.grand_value = v.at((Mask{1} << parties) - 1);
    return est;
}

}  // namespace

ShapleyEstimate party_shapley(int parties, const CharacteristicFn& game, std::size_t budget,
                              std::uint64_t seed, ShapleyMethod method, bool parallel) {
    if (parties < 1) throw InvalidArgument("need at least one party");
    if (method == ShapleyMethod::automatic)
        method = parties <= kExactShapleyMaxParties ? ShapleyMethod::exact_enumeration
                                                    : ShapleyMethod::monte_carlo;
    if (method == ShapleyMethod::exact_enumeration) {
        if (parties > 24) throw InvalidArgument("exact Shapley enumeration is limited to 24 parties");
        return exact_shapley(parties, game, parallel);
    }
    return sampled_shapley(parties, game, budget, seed, parallel);
}

// ---------------------------------------------------------------------------

RidgeGame::RidgeGame(const Matrix& features, const Vector& labels,
                     std::vector<std::vector<std::size_t>> party_columns, const RidgeGameOptions& options)
    : party_columns_(std::move(party_columns)), options_(options) {
    const auto n = static_cast<std::size_t>(features.rows());
    if (labels.size() != features.rows()) throw InvalidArgument("label count does not match rows");
    if (!(options.train_fraction > 0.0 && options.train_fraction < 1.0))
        throw InvalidArgument("train fraction must lie in (0, 1)");
    if (!(options.lambda >= 0.0)) throw InvalidArgument("ridge penalty must be >= 0");
    for (const auto& cols : party_columns_)
        for (auto c : cols)
            if (c >= static_cast<std::size_t>(features.cols()))
                throw InvalidArgument("party column out of range");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(options.seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i + 1));
        std::swap(order[i], order[std::min(j, i)]);
    }
    const auto n_train = static_cast<std::size_t>(std::llround(options.train_fraction * static_cast<double>(n)));
    if (n_train < 2 || n_train >= n) throw InvalidArgument("too few samples for a train/test split");
    const auto n_test = n - n_train;

    auto gather_rows = [&](std::size_t from, std::size_t count) {
        Matrix out(static_cast<Eigen::Index>(count), features.cols());
        for (std::size_t r = 0; r < count; ++r)
            out.row(static_cast<Eigen::Index>(r)) = features.row(static_cast<Eigen::Index>(order[from + r]));
        return out;
    };
    train_x_ = gather_rows(0, n_train);
    test_x_ = gather_rows(n_train, n_test);
    for (Eigen::Index j = 0; j < train_x_.cols(); ++j) {
        const double mean = train_x_.col(j).mean();
        const double sd = std::sqrt((train_x_.col(j).array() - mean).square().mean());
        const double scale = sd > 0.0 ? 1.0 / sd : 0.0;
        train_x_.col(j) = (train_x_.col(j).array() - mean) * scale;
        test_x_.col(j) = (test_x_.col(j).array() - mean) * scale;
    }

    Vector y_train(static_cast<Eigen::Index>(n_train));
    test_y_.resize(static_cast<Eigen::Index>(n_test));
    for (std::size_t r = 0; r < n_train; ++r) y_train[static_cast<Eigen::Index>(r)] = labels[static_cast<Eigen::Index>(order[r])];
    for (std::size_t r = 0; r < n_test; ++r)
        test_y_[static_cast<Eigen::Index>(r)] = labels[static_cast<Eigen::Index>(order[n_train + r])];

    if (options.task == TaskKind::regression) {
        train_y_ = y_train;
    } else {
        classes_.assign(labels.data(), labels.data() + labels.size());
        std::sort(classes_.begin(), classes_.end());
        classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());
        train_y_ = Matrix::Zero(static_cast<Eigen::Index>(n_train), static_cast<Eigen::Index>(classes_.size()));
        for (std::size_t r = 0; r < n_train; ++r) {
            const auto c = std::lower_bound(classes_.begin(), classes_.end(), y_train[static_cast<Eigen::Index>(r)]) -
                           classes_.begin();
            train_y_(static_cast<Eigen::Index>(r), c) = 1.0;
        }
    }
    train_y_mean_ = train_y_.colwise().mean().transpose();
    train_y_.rowwise() -= train_y_mean_.transpose();
    baseline_ = score({});
}

double RidgeGame::score(const std::vector<std::size_t>& columns) const {
    const Eigen::Index n_test = test_x_.rows();
    Matrix pred = train_y_mean_.transpose().replicate(n_test, 1);
    if (!columns.empty()) {
        const Matrix xtr = select_columns(train_x_, columns);
        const Matrix xte = select_columns(test_x_, columns);
        Matrix gram = xtr.transpose() * xtr;
        gram.diagonal().array() += options_.lambda;
        const Matrix w = gram.ldlt().solve(xtr.transpose() * train_y_);
        pred += xte * w;
    }
    if (options_.task == TaskKind::regression) {
        const double mean = test_y_.mean();
        const double ss_tot = (test_y_.array() - mean).square().sum();
        const double ss_res = (test_y_ - pred.col(0)).squaredNorm();
        return ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
    }
    std::size_t correct = 0;
    for (Eigen::Index r = 0; r < n_test; ++r) {
        Eigen::Index best = 0;
        pred.row(r).maxCoeff(&best);
        if (classes_[static_cast<std::size_t>(best)] == test_y_[r]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(n_test);
}

double RidgeGame::operator()(const std::vector<int>& parties) const {
    std::vector<std::size_t> cols;
    for (int p : parties) {
        if (p < 0 || p >= num_parties()) throw InvalidArgument("party index out of range");
        const auto& pc = party_columns_[static_cast<std::size_t>(p)];
        cols.insert(cols.end(), pc.begin(), pc.end());
    }
    return score(cols) - baseline_;
}

// ---------------------------------------------------------------------------

double dirichlet_mean_variance(const std::vector<double>& alphas) {
    if (alphas.empty()) throw InvalidArgument("need at least one Dirichlet parameter");
    const double a0 = std::accumulate(alphas.begin(), alphas.end(), 0.0);
    double total = 0.0;
    for (double a : alphas) {
        if (!(a > 0.0)) throw InvalidArgument("Dirichlet parameters must be positive");
        total += a * (a0 - a) / (a0 * a0 * (a0 + 1.0));
    }
    return total / static_cast<double>(alphas.size());
}

double symmetric_alpha_for_mean_variance(double sigma, int parties) {
    if (parties < 2) throw InvalidArgument("a symmetric match needs K >= 2 parties");
    if (!(sigma > 0.0)) throw NumericError("mean variance must be positive to invert");
    const double k = parties;
    return (k - 1.0 - k * k * sigma) / (k * k * k * sigma);
}

AlphaEstimate estimate_alpha(const ShapleyEstimate& shapley) {
    const auto k = shapley.per_party.size();
    if (k < 2) throw InvalidArgument("alpha estimation needs K >= 2 parties");
    std::vector<double> w(k);
    for (std::size_t i = 0; i < k; ++i) w[i] = std::max(0.0, shapley.per_party[i]);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (!(total > 0.0)) throw NumericError("all party importances are zero");

    AlphaEstimate est;
    est.alpha_vec.resize(k);
    for (std::size_t i = 0; i < k; ++i) est.alpha_vec[i] = std::max(w[i] / total, 1e-6);
    const double renorm = std::accumulate(est.alpha_vec.begin(), est.alpha_vec.end(), 0.0);
    for (double& a : est.alpha_vec) a /= renorm;
    est.mean_variance = dirichlet_mean_variance(est.alpha_vec);
    est.symmetric_alpha = symmetric_alpha_for_mean_variance(est.mean_variance, static_cast<int>(k));
    return est;
}

BetaEstimate estimate_beta(const IcorEvaluator& eval, const PartyPartition& part, const BrkgaConfig& cfg,
                           BoundsMethod bounds, bool parallel) {
    if (part.num_parties() < 2) throw InvalidArgument("beta estimation needs K >= 2 parties");
    if (!part.all_nonempty()) throw InvalidArgument("beta estimation needs non-empty parties");

    BetaEstimate est;
    est.icor_real = eval.icor(part, parallel);
    const auto counts = part.counts();
    if (bounds == BoundsMethod::brkga) {
        BrkgaConfig lo_cfg = cfg, hi_cfg = cfg;
        lo_cfg.seed = mix_seed(cfg.seed, 0);
        hi_cfg.seed = mix_seed(cfg.seed, 1);
        est.icor_min = optimize_extreme(eval, counts, Direction::minimize, lo_cfg, parallel).value;
        est.icor_max = optimize_extreme(eval, counts, Direction::maximize, hi_cfg, parallel).value;
    } else {
        Rng rng(cfg.seed);
        const auto m = eval.num_features();
        std::vector<std::vector<std::size_t>> perms(kShuffleBoundSamples, std::vector<std::size_t>(m));
        for (auto& perm : perms) {
            std::iota(perm.begin(), perm.end(), 0);
            for (std::size_t i = m - 1; i > 0; --i) {
                const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i + 1));
                std::swap(perm[i], perm[std::min(j, i)]);
            }
        }
        std::vector<double> values(perms.size());
        const auto np = static_cast<std::ptrdiff_t>(perms.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
        for (std::ptrdiff_t i = 0; i < np; ++i)
            values[static_cast<std::size_t>(i)] = icor_of_permutation(eval, perms[static_cast<std::size_t>(i)], counts);
        est.icor_min = *std::min_element(values.begin(), values.end());
        est.icor_max = *std::max_element(values.begin(), values.end());
    }
    if (est.icor_max - est.icor_min < 1e-9)
        throw NumericError("Icor range is flat; beta is indeterminate");
    est.beta = beta_from_bounds(est.icor_real, est.icor_min, est.icor_max);
    return est;
}

}  // namespace vsplit
