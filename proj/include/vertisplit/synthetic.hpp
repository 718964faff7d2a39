#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vertisplit/dataset_io.hpp"

namespace vsplit::synthetic {

// Two latent signals a and b with zero sample correlation under both Pearson
// and Spearman (tiled 4-row pattern), each copied `copies` times: columns
// [0, copies) carry a, [copies, 2 * copies) carry b. n = 4 * tiles.
GlobalDataset two_block_copies(std::size_t copies, std::size_t tiles = 16);

// Independent Gaussian matrix.
Matrix gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed);

struct BlockDataset {
    GlobalDataset data;
    std::vector<int> block_of;  // block id of every (shuffled) column
};

// `blocks` mutually independent groups of `per_block` features, each group
// driven by `factors` shared Gaussian factors plus noise of the given standard
// deviation. Columns are shuffled when `shuffle` is set. Labels are a noisy
// linear function of the first factor of every block.
BlockDataset independent_blocks(std::size_t blocks, std::size_t per_block, std::size_t rows,
                                std::uint64_t seed, std::size_t factors = 2, double noise = 0.5,
                                bool shuffle = true);

// rows x cols matrix from `factors` latent Gaussian factors plus unit-variance
// noise scaled by `noise`.
Matrix latent_factors(std::size_t rows, std::size_t cols, std::size_t factors, double noise,
                      std::uint64_t seed);

}  // namespace vsplit::synthetic
