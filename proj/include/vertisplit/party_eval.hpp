#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "vertisplit/brkga.hpp"
#include "vertisplit/corr_metrics.hpp"
#include "vertisplit/dataset_io.hpp"

namespace vsplit {

// Game value of a coalition of parties, given as ascending party indices.
// Must be deterministic and safe to call concurrently.
using CharacteristicFn = std::function<double(const std::vector<int>& parties)>;

enum class ShapleyMethod { automatic, exact_enumeration, monte_carlo };

std::string_view to_string(ShapleyMethod method);

struct ShapleyEstimate {
    std::vector<double> per_party;
    ShapleyMethod method = ShapleyMethod::exact_enumeration;
    std::size_t samples = 0;
    std::vector<double> std_error;  // zeros under exact enumeration
    double grand_value = 0.0;       // v(all parties) - v(empty)
};

// Exact enumeration switches to permutation sampling above this many parties.
inline constexpr int kExactShapleyMaxParties = 10;

// Party-level Shapley values of `game`, baseline-subtracted so v(empty) = 0.
// `automatic` enumerates all 2^K coalitions for K <= 10 and otherwise samples
// `budget` party orderings. A failing evaluation is rethrown naming the coalition.
ShapleyEstimate party_shapley(int parties, const CharacteristicFn& game, std::size_t budget,
                              std::uint64_t seed, ShapleyMethod method = ShapleyMethod::automatic,
                              bool parallel = true);

enum class TaskKind { regression, classification };

struct RidgeGameOptions {
    TaskKind task = TaskKind::regression;
    double lambda = 1e-3;
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
};

// Characteristic function backed by closed-form ridge regression on a seeded
// train/test split. v(S) is the held-out R^2 (regression) or one-hot argmax
// accuracy (classification) minus that of the label-mean / majority predictor.
class RidgeGame {
public:
    RidgeGame(const Matrix& features, const Vector& labels,
              std::vector<std::vector<std::size_t>> party_columns, const RidgeGameOptions& options);

    double operator()(const std::vector<int>& parties) const;
    double baseline_score() const { return baseline_; }
    int num_parties() const { return static_cast<int>(party_columns_.size()); }

private:
    double score(const std::vector<std::size_t>& columns) const;

    Matrix train_x_, test_x_;  // standardized with training statistics
    Matrix train_y_;           // centered targets; one column per class when classifying
    Vector train_y_mean_;
    Vector test_y_;
    std::vector<double> classes_;
    std::vector<std::vector<std::size_t>> party_columns_;
    RidgeGameOptions options_;
    double baseline_ = 0.0;
};

// Mean over components of Var(X_i) for X ~ Dir(alphas).
double dirichlet_mean_variance(const std::vector<double>& alphas);

// Concentration of the symmetric K-party Dirichlet with mean variance sigma:
// (K - 1 - K^2 sigma) / (K^3 sigma).
double symmetric_alpha_for_mean_variance(double sigma, int parties);

struct AlphaEstimate {
    std::vector<double> alpha_vec;  // normalized importances, sums to 1
    double symmetric_alpha = 0.0;
    double mean_variance = 0.0;
};

// Floors negative importances at 0, normalizes them into Dirichlet parameters
// (zeros nudged to 1e-6) and matches a symmetric Dirichlet by mean variance.
AlphaEstimate estimate_alpha(const ShapleyEstimate& shapley);

enum class BoundsMethod { brkga, shuffle };

struct BetaEstimate {
    double beta = 0.0;
    double icor_real = 0.0;
    double icor_min = 0.0;
    double icor_max = 0.0;
};

// Locates a partition between the smallest and largest Icor reachable with its
// party sizes: beta = clip((real - min) / (max - min), 0, 1). Throws
// NumericError when max - min < 1e-9.
BetaEstimate estimate_beta(const IcorEvaluator& eval, const PartyPartition& part, const BrkgaConfig& cfg,
                           BoundsMethod bounds = BoundsMethod::brkga, bool parallel = true);

inline constexpr std::size_t kShuffleBoundSamples = 1000;

inline double beta_from_bounds(double icor_real, double icor_min, double icor_max) {
    const double raw = (icor_real - icor_min) / (icor_max - icor_min);
    return raw < 0.0 ? 0.0 : (raw > 1.0 ? 1.0 : raw);
}

}  // namespace vsplit
