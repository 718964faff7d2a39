#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace vsplit {

struct TruncatedSvdOptions {
    std::size_t rank = 1;
    std::size_t oversample = 10;
    std::size_t max_iterations = 500;
    // Stop once no leading value moves by more than tolerance * sigma_1.
    double tolerance = 1e-10;
    std::uint64_t seed = 0;
};

// Largest `rank` singular values of a, non-increasing, by randomized block
// subspace iteration with Rayleigh-Ritz extraction. Throws NumericError naming
// the iteration count when the leading values fail to settle.
std::vector<double> top_singular_values(const Eigen::MatrixXd& a, const TruncatedSvdOptions& options);

}  // namespace vsplit
