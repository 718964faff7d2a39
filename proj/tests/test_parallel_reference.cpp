// Parallel kernels against their serial paths: results must be bit-identical.
#include <gtest/gtest.h>
#include <omp.h>

#include "vertisplit/brkga.hpp"
#include "vertisplit/corr_metrics.hpp"
#include "vertisplit/party_eval.hpp"
#include "vertisplit/split_correlation.hpp"
#include "vertisplit/synthetic.hpp"

namespace vsplit {
namespace {

class ParallelReference : public ::testing::Test {
protected:
    void SetUp() override {
        saved_ = omp_get_max_threads();
        omp_set_num_threads(4);
    }
    void TearDown() override { omp_set_num_threads(saved_); }

private:
    int saved_ = 1;
};

TEST_F(ParallelReference, ColumnCorrelation) {
    const Matrix a = synthetic::latent_factors(150, 37, 4, 0.5, 1);
    const Matrix b = synthetic::latent_factors(150, 23, 4, 0.5, 2);
    for (auto kind : {CorrelationKind::spearman, CorrelationKind::pearson}) {
        const Matrix par = column_correlation(a, b, kind);
        const Matrix ser = column_correlation_serial(a, b, kind);
        EXPECT_TRUE((par.array() == ser.array()).all());
    }
}

TEST_F(ParallelReference, SelfCorrelationMatchesSerialColumnCorrelation) {
    const Matrix a = synthetic::latent_factors(120, 30, 3, 0.5, 3);
    const Matrix self = self_correlation(a, CorrelationKind::spearman);
    const Matrix ser = column_correlation_serial(a, a, CorrelationKind::spearman);
    for (Eigen::Index i = 0; i < a.cols(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (i != j) EXPECT_EQ(self(i, j), ser(i, j)) << i << "," << j;
}

TEST_F(ParallelReference, IcorTable) {
    const IcorEvaluator eval(synthetic::latent_factors(200, 40, 5, 0.5, 4), PcorOptions{});
    const auto groups = PartyPartition::from_blocks(
                            [] {
                                std::vector<std::size_t> p(40);
                                for (std::size_t i = 0; i < 40; ++i) p[i] = (i * 7) % 40;
                                return p;
                            }(),
                            {10, 10, 8, 12})
                            .groups();
    const Matrix ser = eval.table(groups, false);
    const Matrix par = eval.table(groups, true);
    EXPECT_TRUE((ser.array() == par.array()).all());
    EXPECT_EQ(eval.icor(groups, false), eval.icor(groups, true));
}

TEST_F(ParallelReference, Brkga) {
    const IcorEvaluator eval(synthetic::latent_factors(100, 16, 3, 0.5, 5), PcorOptions{});
    const std::vector<std::size_t> counts{4, 4, 8};
    BrkgaConfig cfg;
    cfg.seed = 6;
    cfg.max_generations = 15;
    const auto ser = optimize_extreme(eval, counts, Direction::maximize, cfg, false);
    const auto par = optimize_extreme(eval, counts, Direction::maximize, cfg, true);
    EXPECT_EQ(ser.permutation, par.permutation);
    EXPECT_EQ(ser.value, par.value);
    EXPECT_EQ(ser.generations_used, par.generations_used);
}

TEST_F(ParallelReference, Shapley) {
    const auto blocks = synthetic::independent_blocks(3, 3, 200, 7, 2, 0.4, false);
    const RidgeGame game(blocks.data.features, *blocks.data.labels, {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}}, {});
    const auto ser = party_shapley(3, game, 0, 0, ShapleyMethod::exact_enumeration, false);
    const auto par = party_shapley(3, game, 0, 0, ShapleyMethod::exact_enumeration, true);
    EXPECT_EQ(ser.per_party, par.per_party);
    const auto mser = party_shapley(3, game, 64, 9, ShapleyMethod::monte_carlo, false);
    const auto mpar = party_shapley(3, game, 64, 9, ShapleyMethod::monte_carlo, true);
    EXPECT_EQ(mser.per_party, mpar.per_party);
    EXPECT_EQ(mser.std_error, mpar.std_error);
}

}  // namespace
}  // namespace vsplit
