#include "vertisplit/synthetic.hpp"

#include <algorithm>
#include <numeric>

#include "vertisplit/errors.hpp"
#include "vertisplit/random.hpp"

namespace vsplit::synthetic {

GlobalDataset two_block_copies(std::size_t copies, std::size_t tiles) {
    if (copies < 1 || tiles < 1) throw InvalidArgument("need at least one copy and one tile");
    // Centered, a = (-1.5, -0.5, 0.5, 1.5) and b = (-0.5, 1.5, -1.5, 0.5): a.b = 0 exactly.
    static constexpr double kA[4] = {1.0, 2.0, 3.0, 4.0};
    static constexpr double kB[4] = {2.0, 4.0, 1.0, 3.0};
    const auto n = static_cast<Eigen::Index>(4 * tiles);
    Matrix x(n, static_cast<Eigen::Index>(2 * copies));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < copies; ++c) {
            x(i, static_cast<Eigen::Index>(c)) = kA[i % 4];
            x(i, static_cast<Eigen::Index>(copies + c)) = kB[i % 4];
        }
    }
    return GlobalDataset::make(std::move(x));
}

Matrix gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    Matrix x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = standard_normal(rng);
    return x;
}

Matrix latent_factors(std::size_t rows, std::size_t cols, std::size_t factors, double noise,
                      std::uint64_t seed) {
    const Matrix f = gaussian(rows, factors, mix_seed(seed, 0));
    const Matrix load = gaussian(factors, cols, mix_seed(seed, 1));
    return f * load + noise * gaussian(rows, cols, mix_seed(seed, 2));
}

BlockDataset independent_blocks(std::size_t blocks, std::size_t per_block, std::size_t rows,
                                std::uint64_t seed, std::size_t factors, double noise, bool shuffle) {
    if (blocks < 1 || per_block < 1 || rows < 2 || factors < 1)
        throw InvalidArgument("degenerate block dataset shape");
    const std::size_t m = blocks * per_block;
    Matrix x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(m));
    Vector y = Vector::Zero(static_cast<Eigen::Index>(rows));
    std::vector<int> block_of(m);
    for (std::size_t b = 0; b < blocks; ++b) {
        const Matrix f = gaussian(rows, factors, mix_seed(seed, 3 * b));
        const Matrix load = gaussian(factors, per_block, mix_seed(seed, 3 * b + 1));
        const Matrix e = gaussian(rows, per_block, mix_seed(seed, 3 * b + 2));
        x.middleCols(static_cast<Eigen::Index>(b * per_block), static_cast<Eigen::Index>(per_block)) =
            f * load + noise * e;
        y += f.col(0) * (1.0 + static_cast<double>(b));
        for (std::size_t j = 0; j < per_block; ++j) block_of[b * per_block + j] = static_cast<int>(b);
    }
    y += 0.1 * gaussian(rows, 1, mix_seed(seed, 3 * blocks)).col(0);

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    if (shuffle) {
        Rng rng(mix_seed(seed, 3 * blocks + 1));
        for (std::size_t i = m - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i + 1));
            std::swap(order[i], order[std::min(j, i)]);
        }
    }
    BlockDataset out;
    out.block_of.resize(m);
    Matrix shuffled = select_columns(x, order);
    for (std::size_t j = 0; j < m; ++j) out.block_of[j] = block_of[order[j]];
    out.data = GlobalDataset::make(std::move(shuffled), std::move(y));
    return out;
}

}  // namespace vsplit::synthetic
