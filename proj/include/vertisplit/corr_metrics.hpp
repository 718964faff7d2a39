#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "vertisplit/common.hpp"
#include "vertisplit/dataset_io.hpp"

namespace vsplit {

struct PcorOptions {
    CorrelationKind kind = CorrelationKind::spearman;
    // Spectra with min(p, q) at or below this size are computed exactly.
    std::size_t exact_dim_threshold = 100;
    // Number of leading singular values kept by the truncated path.
    std::size_t truncate_rank = 400;
    // Seed of the truncated path's random start; fixed so pcor is a pure function.
    std::uint64_t svd_seed = 0;

    void validate() const;
};

struct SingularSpectrum {
    std::vector<double> values;  // non-increasing, >= 0, length d
    bool truncated = false;

    std::size_t d() const { return values.size(); }
};

// Singular values below this are treated as exact zeros.
inline constexpr double kSingularFloor = 1e-12;

// Average ranks (1-based) with ties sharing the mean of their positions.
Vector average_ranks(const Eigen::Ref<const Vector>& x);

// Each column mapped to ranks (spearman) or left as is (pearson), centered and
// scaled to unit Euclidean norm. Constant columns become all-zero.
Matrix standardize_columns(const Matrix& x, CorrelationKind kind);

// Column-wise correlation between the columns of a (n x p) and b (n x q).
// Constant columns correlate 0 with everything. Throws InvalidArgument when
// the row counts differ or n < 2.
Matrix column_correlation(const Matrix& a, const Matrix& b, CorrelationKind kind);
// Single-threaded reference for column_correlation; results are bit-identical.
Matrix column_correlation_serial(const Matrix& a, const Matrix& b, CorrelationKind kind);

// Correlation of x with itself; exactly symmetric with a unit diagonal,
// constant columns included.
Matrix self_correlation(const Matrix& x, CorrelationKind kind);

// Cross products of already standardized columns, clamped to [-1, 1].
Matrix correlation_from_standardized(const Matrix& za, const Matrix& zb);

SingularSpectrum singular_spectrum(const Matrix& c, const PcorOptions& opts);

// Normalized standard deviation of the spectrum; for d = 1 the single value.
double pcor_from_spectrum(const SingularSpectrum& spectrum);
double pcor_from_correlation(const Matrix& c, const PcorOptions& opts);

// Pcor between two parties. Identical inputs are scored through their
// self-correlation matrix.
double pcor(const Matrix& xi, const Matrix& xj, const PcorOptions& opts);

// Eigenvalue counterpart of pcor on the m x m self-correlation matrix (m >= 2).
double mcor(const Matrix& x, CorrelationKind kind);

// Icor from a K x K table whose (i, j) entry is Pcor(X_i, X_j).
double icor_from_table(const Matrix& pcor_table);

// Icor of a partition: mean over ordered pairs of Pcor(X_i, X_j) - Pcor(X_i, X_i).
// Throws InvalidArgument for K < 2 or an empty party.
double icor(const GlobalDataset& ds, const PartyPartition& part, const PcorOptions& opts);

// |approx - exact| / exact; nullopt when exact is zero.
std::optional<double> pcor_relative_error(double exact, double approx);

// Scores many partitions of one dataset against a precomputed m x m
// correlation matrix. Thread-safe for concurrent const use.
class IcorEvaluator {
public:
    IcorEvaluator(const Matrix& features, const PcorOptions& opts);
    // Uses a caller-supplied m x m self-correlation matrix.
    static IcorEvaluator from_correlation(Matrix correlation, const PcorOptions& opts);

    const Matrix& correlation() const { return corr_; }
    const PcorOptions& options() const { return opts_; }
    std::size_t num_features() const { return static_cast<std::size_t>(corr_.cols()); }

    double pcor(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) const;
    double pcor_inner(const std::vector<std::size_t>& a) const { return pcor(a, a); }

    // K x K Pcor table; parallel over pairs when `parallel` is set.
    Matrix table(const std::vector<std::vector<std::size_t>>& groups, bool parallel = false) const;
    double icor(const std::vector<std::vector<std::size_t>>& groups, bool parallel = false) const;
    double icor(const PartyPartition& part, bool parallel = false) const;

private:
    IcorEvaluator() = default;

    Matrix corr_;
    PcorOptions opts_;
};

}  // namespace vsplit
