#include "vertisplit/truncated_svd.hpp"

#include <algorithm>
#include <cmath>

#include "vertisplit/errors.hpp"
#include "vertisplit/random.hpp"

namespace vsplit {

namespace {

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& y) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

std::vector<double> ritz_values(const Eigen::MatrixXd& q, const Eigen::MatrixXd& a, std::size_t rank) {
    const Eigen::MatrixXd b = q.transpose() * a;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(b);
    const auto& s = svd.singularValues();
    std::vector<double> out(rank, 0.0);
    for (std::size_t i = 0; i < rank && static_cast<Eigen::Index>(i) < s.size(); ++i)
        out[i] = s[static_cast<Eigen::Index>(i)];
    return out;
}

}  // namespace

std::vector<double> top_singular_values(const Eigen::MatrixXd& a, const TruncatedSvdOptions& options) {
    const auto d = static_cast<std::size_t>(std::min(a.rows(), a.cols()));
    if (options.rank == 0) throw InvalidArgument("truncation rank must be >= 1");
    if (d == 0) return {};
    const std::size_t rank = std::min(options.rank, d);
    const std::size_t block = std::min(rank + options.oversample, d);

    Rng rng(options.seed);
    Eigen::MatrixXd omega(a.cols(), static_cast<Eigen::Index>(block));
    for (Eigen::Index j = 0; j < omega.cols(); ++j)
        for (Eigen::Index i = 0; i < omega.rows(); ++i) omega(i, j) = standard_normal(rng);

    Eigen::MatrixXd q = orthonormal_basis(a * omega);
    std::vector<double> prev = ritz_values(q, a, rank);
    if (prev.front() == 0.0) return prev;

    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        const Eigen::MatrixXd qt = orthonormal_basis(a.transpose() * q);
        q = orthonormal_basis(a * qt);
        std::vector<double> cur = ritz_values(q, a, rank);
        double change = 0.0;
        for (std::size_t i = 0; i < rank; ++i) change = std::max(change, std::abs(cur[i] - prev[i]));
        if (change <= options.tolerance * cur.front()) return cur;
        prev = std::move(cur);
    }
    throw NumericError("truncated SVD did not converge after " +
                       std::to_string(options.max_iterations) + " iterations");
}

}  // namespace vsplit
