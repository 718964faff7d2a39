#include "vertisplit/corr_metrics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

#include "vertisplit/errors.hpp"
#include "vertisplit/synthetic.hpp"

namespace vsplit {
namespace {

// Textbook two-pass Pearson on plain vectors.
double naive_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0 || syy == 0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

// O(n^2) average ranks: 1 + #smaller + (#equal - 1) / 2.
std::vector<double> naive_ranks(const std::vector<double>& x) {
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double less = 0, equal = 0;
        for (double v : x) {
            less += v < x[i];
            equal += v == x[i];
        }
        r[i] = 1.0 + less + (equal - 1.0) / 2.0;
    }
    return r;
}

std::vector<double> col(const Matrix& m, Eigen::Index j) { return {m.col(j).data(), m.col(j).data() + m.rows()}; }

// Spectrum through the eigenvalues of C^T C (or C C^T), a route independent of the SVD.
std::vector<double> spectrum_via_gram(const Matrix& c) {
    const Matrix g = c.rows() <= c.cols() ? Matrix(c * c.transpose()) : Matrix(c.transpose() * c);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
    std::vector<double> s;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) s.push_back(std::sqrt(std::max(0.0, eig.eigenvalues()[i])));
    std::sort(s.begin(), s.end(), std::greater<>());
    return s;
}

double pcor_formula(const std::vector<double>& s) {
    const double d = static_cast<double>(s.size());
    if (s.size() == 1) return s[0];
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / d;
    double ss = 0;
    for (double v : s) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (d - 1)) / std::sqrt(d);
}

TEST(ColumnCorrelation, IdentityAndMonotoneAndAnti) {
    Vector x(6);
    x << 0.3, -1.2, 2.5, 0.0, 1.1, 4.0;
    Matrix a(6, 1);
    a.col(0) = x;
    Matrix e(6, 1);
    e.col(0) = x.array().exp();
    for (auto kind : {CorrelationKind::spearman, CorrelationKind::pearson})
        EXPECT_NEAR(column_correlation(a, a, kind)(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(column_correlation(a, e, CorrelationKind::spearman)(0, 0), 1.0, 1e-15);

    Matrix p(3, 1), q(3, 1);
    p << 1, 2, 3;
    q << 3, 2, 1;
    EXPECT_NEAR(column_correlation(p, q, CorrelationKind::pearson)(0, 0), -1.0, 1e-15);
}

TEST(ColumnCorrelation, MatchesNaiveFormulasWithTies) {
    std::mt19937_64 rng(5);
    Matrix a(40, 3), b(40, 2);
    for (Eigen::Index i = 0; i < 40; ++i) {
        a(i, 0) = static_cast<double>(rng() % 5);  // heavy ties
        a(i, 1) = static_cast<double>(rng() % 1000) / 7.0;
        a(i, 2) = a(i, 1) * a(i, 1);
        b(i, 0) = static_cast<double>(rng() % 3);
        b(i, 1) = std::sin(static_cast<double>(i));
    }
    const Matrix cp = column_correlation(a, b, CorrelationKind::pearson);
    const Matrix cs = column_correlation(a, b, CorrelationKind::spearman);
    for (Eigen::Index i = 0; i < 3; ++i) {
        for (Eigen::Index j = 0; j < 2; ++j) {
            EXPECT_NEAR(cp(i, j), naive_pearson(col(a, i), col(b, j)), 1e-12);
            EXPECT_NEAR(cs(i, j), naive_pearson(naive_ranks(col(a, i)), naive_ranks(col(b, j))), 1e-12);
        }
    }
}

TEST(ColumnCorrelation, ConstantColumnsCorrelateZero) {
    Matrix a(4, 2);
    a << 1, 5, 2, 5, 3, 5, 4, 5;
    const Matrix c = column_correlation(a, a, CorrelationKind::pearson);
    EXPECT_EQ(c(1, 0), 0.0);
    EXPECT_EQ(c(1, 1), 0.0);
    const Matrix s = self_correlation(a, CorrelationKind::spearman);
    EXPECT_EQ(s(1, 1), 1.0);
    EXPECT_EQ(s(0, 1), 0.0);
}

TEST(ColumnCorrelation, NeedsTwoRowsAndSameN) {
    EXPECT_THROW(column_correlation(Matrix::Ones(1, 2), Matrix::Ones(1, 2), CorrelationKind::pearson), InvalidArgument);
    EXPECT_THROW(column_correlation(Matrix::Ones(3, 2), Matrix::Ones(4, 2), CorrelationKind::pearson), InvalidArgument);
}

TEST(AverageRanks, TiesShareTheirMeanPosition) {
    Vector x(5);
    x << 10, 20, 10, 30, 20;
    Vector expect(5);
    expect << 1.5, 3.5, 1.5, 5, 3.5;
    EXPECT_EQ(average_ranks(x), expect);
}

TEST(SingularSpectrum, IdentityAndRankOne) {
    const auto id = singular_spectrum(Matrix::Identity(2, 2), PcorOptions{});
    EXPECT_EQ(id.values, (std::vector<double>{1.0, 1.0}));
    EXPECT_FALSE(id.truncated);

    // all-ones 3x3 = 3 * u u^T with unit u: sigma_1 = 3.
    const auto ones = singular_spectrum(Matrix::Ones(3, 3), PcorOptions{});
    ASSERT_EQ(ones.d(), 3u);
    EXPECT_NEAR(ones.values[0], 3.0, 1e-12);
    EXPECT_EQ(ones.values[1], 0.0);
    EXPECT_EQ(ones.values[2], 0.0);
}

TEST(SingularSpectrum, TruncationPadsWithZeros) {
    const Matrix x = synthetic::latent_factors(200, 150, 3, 0.3, 11);
    const Matrix c = self_correlation(x, CorrelationKind::pearson);
    PcorOptions t;
    t.exact_dim_threshold = 100;
    t.truncate_rank = 20;
    const auto s = singular_spectrum(c, t);
    EXPECT_TRUE(s.truncated);
    ASSERT_EQ(s.d(), 150u);
    for (std::size_t i = 20; i < 150; ++i) EXPECT_EQ(s.values[i], 0.0);
    PcorOptions exact;
    exact.truncate_rank = 150;
    const auto e = singular_spectrum(c, exact);
    EXPECT_FALSE(e.truncated);
    for (std::size_t i = 0; i < 20; ++i) EXPECT_NEAR(s.values[i], e.values[i], 1e-8 * e.values[0]);
}

TEST(SingularSpectrum, TruncationCoveringDimensionIsExact) {
    const Matrix x = synthetic::latent_factors(200, 120, 3, 0.3, 12);
    PcorOptions a;
    a.truncate_rank = 120;
    PcorOptions b;
    b.truncate_rank = 400;
    b.exact_dim_threshold = 5;
    EXPECT_EQ(pcor(x, x, a), pcor(x, x, b));
}

TEST(Pcor, CopiesOfOneColumnArePerfectlyCorrelated) {
    // spectrum {3,0,0}: mean 1, squared deviations 4+1+1 = 6, sqrt(6/2)/sqrt(3) = 1
    const Matrix base = synthetic::gaussian(30, 1, 2);
    const Matrix x = base.replicate(1, 3);
    EXPECT_NEAR(pcor(x, x, PcorOptions{}), 1.0, 1e-12);
    EXPECT_NEAR(pcor_formula({3, 0, 0}), 1.0, 1e-15);
}

TEST(Pcor, SingleMonotoneColumnsUseTheSingularValue) {
    const Matrix a = synthetic::gaussian(25, 1, 3);
    const Matrix b = a.array().cube();
    EXPECT_NEAR(pcor(a, b, PcorOptions{}), 1.0, 1e-12);
    PcorOptions p;
    p.kind = CorrelationKind::pearson;
    const double r = column_correlation(a, b, CorrelationKind::pearson)(0, 0);
    EXPECT_NEAR(pcor(a, b, p), std::abs(r), 1e-15);
}

TEST(Pcor, IndependentColumnsNearZero) {
    const Matrix x = synthetic::gaussian(10000, 6, 4);
    EXPECT_LT(pcor(x, x, PcorOptions{}), 0.05);
}

TEST(Pcor, MatchesGramSpectrumOracle) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 30; ++t) {
        const std::size_t mi = 1 + rng() % 9, mj = 1 + rng() % 9;
        const Matrix x = synthetic::latent_factors(60, mi + mj, 2, 0.8, rng());
        const Matrix xi = x.leftCols(static_cast<Eigen::Index>(mi));
        const Matrix xj = x.rightCols(static_cast<Eigen::Index>(mj));
        PcorOptions o;
        o.kind = t % 2 ? CorrelationKind::pearson : CorrelationKind::spearman;
        auto s = spectrum_via_gram(column_correlation(xi, xj, o.kind));
        for (double& v : s)
            if (v < 1e-7) v = 0.0;  // gram squares the conditioning
        EXPECT_NEAR(pcor(xi, xj, o), std::clamp(pcor_formula(s), 0.0, 1.0), 1e-7);
    }
}

TEST(Pcor, RangeAndSymmetryProperty) {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 3 + rng() % 50, mi = 1 + rng() % 12, mj = 1 + rng() % 12;
        Matrix x = t % 3 ? synthetic::gaussian(n, mi + mj, rng()) : synthetic::latent_factors(n, mi + mj, 1, 0.1, rng());
        if (t % 4 == 0) x.col(0).setConstant(1.0);
        const Matrix xi = x.leftCols(static_cast<Eigen::Index>(mi));
        const Matrix xj = x.rightCols(static_cast<Eigen::Index>(mj));
        PcorOptions o;
        o.kind = t % 2 ? CorrelationKind::pearson : CorrelationKind::spearman;
        const double a = pcor(xi, xj, o);
        const double b = pcor(xj, xi, o);
        ASSERT_GE(a, 0.0);
        ASSERT_LE(a, 1.0);
        EXPECT_NEAR(a, b, 1e-12);
    }
}

TEST(Pcor, SpearmanInvariantUnderMonotoneMaps) {
    const auto blocks = synthetic::independent_blocks(2, 4, 80, 21);
    Matrix x = blocks.data.features;
    Matrix y = x;
    y.col(0) = y.col(0).array().exp();
    y.col(3) = y.col(3).array().cube() * 2.0 + 7.0;
    y.col(5) = (y.col(5).array() / 3.0).tanh();
    EXPECT_EQ(column_correlation(x, x, CorrelationKind::spearman), column_correlation(y, y, CorrelationKind::spearman));
    const Matrix xi = x.leftCols(3), xj = x.rightCols(5), yi = y.leftCols(3), yj = y.rightCols(5);
    EXPECT_EQ(pcor(xi, xj, PcorOptions{}), pcor(yi, yj, PcorOptions{}));
    const PartyPartition part({0, 1, 0, 1, 0, 1, 1, 0}, 2);
    EXPECT_EQ(icor(GlobalDataset::make(x), part, PcorOptions{}), icor(GlobalDataset::make(y), part, PcorOptions{}));
}

TEST(Mcor, ExamplesAndEquivalenceWithPcor) {
    const auto ortho = synthetic::two_block_copies(1);  // two exactly uncorrelated columns
    EXPECT_NEAR(mcor(ortho.features, CorrelationKind::pearson), 0.0, 1e-12);
    const Matrix copies = synthetic::gaussian(40, 1, 5).replicate(1, 5);
    EXPECT_NEAR(mcor(copies, CorrelationKind::spearman), 1.0, 1e-12);
    const Matrix x = synthetic::gaussian(50, 8, 6);
    for (auto kind : {CorrelationKind::spearman, CorrelationKind::pearson}) {
        PcorOptions o;
        o.kind = kind;
        EXPECT_NEAR(mcor(x, kind), pcor(x, x, o), 1e-9);
    }
    EXPECT_THROW(mcor(Matrix::Ones(5, 1), CorrelationKind::pearson), InvalidArgument);
}

TEST(Icor, TwoBlockExamples) {
    const auto ds = synthetic::two_block_copies(2);  // columns a, a, b, b
    EXPECT_NEAR(icor(ds, PartyPartition({0, 0, 1, 1}, 2), PcorOptions{}), -1.0, 1e-12);
    EXPECT_NEAR(icor(ds, PartyPartition({0, 1, 0, 1}, 2), PcorOptions{}), 0.0, 1e-12);
}

TEST(Icor, InvariantUnderPartyRelabeling) {
    const auto blocks = synthetic::independent_blocks(3, 4, 100, 2);
    const PartyPartition p({0, 1, 2, 0, 1, 2, 2, 2, 1, 0, 0, 1}, 3);
    std::vector<int> relabeled = p.assignment();
    for (int& a : relabeled) a = (a + 1) % 3;
    EXPECT_NEAR(icor(blocks.data, p, PcorOptions{}), icor(blocks.data, PartyPartition(relabeled, 3), PcorOptions{}),
                1e-14);
}

TEST(Icor, Preconditions) {
    const auto ds = synthetic::two_block_copies(2);
    EXPECT_THROW(icor(ds, PartyPartition({0, 0, 0, 0}, 1), PcorOptions{}), InvalidArgument);
    EXPECT_THROW(icor(ds, PartyPartition({0, 0, 0, 0}, 2), PcorOptions{}), InvalidArgument);
}

// Party 0 holds u copies of a and v = m - u copies of b; party 1 the rest.
// Self spectrum {u, v, 0...}, cross spectrum {sqrt(uv), sqrt(uv), 0...}.
double two_block_icor_closed_form(double u, double m) {
    const double v = m - u;
    const double cross = std::sqrt(2 * u * v * (1 - 2 / m));
    const double inner = std::sqrt(u * u + v * v - m);
    return (cross - inner) / std::sqrt(m * (m - 1));
}

TEST(Icor, EnumeratedTwoBlockLandscapeMatchesClosedForm) {
    for (std::size_t m : {2, 3, 4, 5}) {
        const auto ds = synthetic::two_block_copies(m);
        const std::size_t total = 2 * m;
        double vmin = 1e9, vmax = -1e9;
        for (unsigned mask = 0; mask < (1u << total); ++mask) {
            if (static_cast<std::size_t>(std::popcount(mask)) != m) continue;
            std::vector<int> a(total);
            std::size_t u = 0;
            for (std::size_t j = 0; j < total; ++j) {
                a[j] = (mask >> j) & 1u ? 0 : 1;
                if (a[j] == 0 && j < m) ++u;
            }
            const double v = icor(ds, PartyPartition(a, 2), PcorOptions{});
            EXPECT_NEAR(v, two_block_icor_closed_form(static_cast<double>(u), static_cast<double>(m)), 1e-12);
            EXPECT_LE(v, 1e-9);
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
        EXPECT_NEAR(vmin, two_block_icor_closed_form(0, static_cast<double>(m)), 1e-12);
        EXPECT_NEAR(vmax, two_block_icor_closed_form(static_cast<double>(m / 2), static_cast<double>(m)), 1e-12);
    }
}

TEST(IcorEvaluator, AgreesWithDirectPcor) {
    const auto blocks = synthetic::independent_blocks(2, 5, 120, 4);
    const IcorEvaluator eval(blocks.data.features, PcorOptions{});
    const std::vector<std::size_t> a{0, 3, 7}, b{1, 2, 9, 4};
    const Matrix xa = select_columns(blocks.data.features, a), xb = select_columns(blocks.data.features, b);
    EXPECT_NEAR(eval.pcor(a, b), pcor(xa, xb, PcorOptions{}), 1e-12);
    EXPECT_NEAR(eval.pcor_inner(a), pcor(xa, xa, PcorOptions{}), 1e-12);
}

TEST(RelativeError, Examples) {
    EXPECT_EQ(*pcor_relative_error(0.5, 0.5), 0.0);
    EXPECT_NEAR(*pcor_relative_error(0.5, 0.4), 0.2, 1e-15);
    EXPECT_FALSE(pcor_relative_error(0.0, 0.1).has_value());
}

TEST(RelativeError, NonIncreasingInTruncationRank) {
    const Matrix x = synthetic::latent_factors(600, 300, 15, 1.0, 13);
    const Matrix c = self_correlation(x, CorrelationKind::spearman);
    PcorOptions exact;
    exact.truncate_rank = 300;
    const double e = pcor_from_correlation(c, exact);
    double prev = 1e9;
    for (std::size_t dt : {25, 50, 100, 200, 300}) {
        PcorOptions t;
        t.truncate_rank = dt;
        const double err = *pcor_relative_error(e, pcor_from_correlation(c, t));
        EXPECT_LE(err, prev) << "d_t = " << dt;
        prev = err;
    }
    EXPECT_EQ(prev, 0.0);
}

}  // namespace
}  // namespace vsplit
