#include "vertisplit/corr_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <lapacke.h>

#include "vertisplit/errors.hpp"
#include "vertisplit/truncated_svd.hpp"

namespace vsplit {

void PcorOptions::validate() const {
    if (truncate_rank < 1) throw InvalidArgument("truncate rank must be >= 1");
    if (exact_dim_threshold < 1) throw InvalidArgument("exact dimension threshold must be >= 1");
}

Vector average_ranks(const Eigen::Ref<const Vector>& x) {
    const auto n = static_cast<std::size_t>(x.size());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    Vector ranks(x.size());
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && x[order[j]] == x[order[i]]) ++j;
        // positions i..j-1 hold 1-based ranks i+1..j
        const double avg = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t t = i; t < j; ++t) ranks[order[t]] = avg;
        i = j;
    }
    return ranks;
}

Matrix standardize_columns(const Matrix& x, CorrelationKind kind) {
    Matrix z(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        Vector col = kind == CorrelationKind::spearman ? average_ranks(x.col(j)) : Vector(x.col(j));
        const bool constant = (col.array() == col[0]).all();
        if (constant) {
            z.col(j).setZero();
            continue;
        }
        col.array() -= col.mean();
        const double norm = col.norm();
        z.col(j) = norm > 0.0 ? Vector(col / norm) : Vector::Zero(col.size());
    }
    return z;
}

namespace {

void check_rows(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows())
        throw InvalidArgument("row count mismatch: " + std::to_string(a.rows()) + " vs " +
                              std::to_string(b.rows()));
    if (a.rows() < 2) throw InvalidArgument("correlation needs at least 2 samples");
}

inline double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

}  // namespace

Matrix correlation_from_standardized(const Matrix& za, const Matrix& zb) {
    Matrix c(za.cols(), zb.cols());
    const Eigen::Index q = zb.cols();
#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < q; ++b)
        for (Eigen::Index a = 0; a < za.cols(); ++a) c(a, b) = clamp_unit(za.col(a).dot(zb.col(b)));
    return c;
}

Matrix column_correlation(const Matrix& a, const Matrix& b, CorrelationKind kind) {
    check_rows(a, b);
    return correlation_from_standardized(standardize_columns(a, kind), standardize_columns(b, kind));
}

Matrix column_correlation_serial(const Matrix& a, const Matrix& b, CorrelationKind kind) {
    check_rows(a, b);
    const Matrix za = standardize_columns(a, kind);
    const Matrix zb = standardize_columns(b, kind);
    Matrix c(za.cols(), zb.cols());
    for (Eigen::Index j = 0; j < zb.cols(); ++j)
        for (Eigen::Index i = 0; i < za.cols(); ++i) c(i, j) = clamp_unit(za.col(i).dot(zb.col(j)));
    return c;
}

Matrix self_correlation(const Matrix& x, CorrelationKind kind) {
    check_rows(x, x);
    const Matrix z = standardize_columns(x, kind);
    const Eigen::Index m = z.cols();
    Matrix c(m, m);
#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index j = 0; j < m; ++j) {
        c(j, j) = 1.0;
        for (Eigen::Index i = 0; i < j; ++i) c(i, j) = clamp_unit(z.col(i).dot(z.col(j)));
    }
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = j + 1; i < m; ++i) c(i, j) = c(j, i);
    return c;
}

namespace {

// All min(rows, cols) singular values, non-increasing (LAPACK dgesvd, no vectors).
std::vector<double> exact_singular_values(const Matrix& c) {
    const auto d = static_cast<std::size_t>(std::min(c.rows(), c.cols()));
    std::vector<double> out(d), superb(d > 1 ? d - 1 : 1);
    Matrix work = c;
    const auto rows = static_cast<lapack_int>(c.rows());
    const auto info = LAPACKE_dgesvd(LAPACK_COL_MAJOR, 'N', 'N', rows, static_cast<lapack_int>(c.cols()),
                                     work.data(), rows, out.data(), nullptr, 1, nullptr, 1, superb.data());
    if (info != 0) throw NumericError("SVD failed (LAPACK dgesvd info " + std::to_string(info) + ")");
    return out;
}

}  // namespace

SingularSpectrum singular_spectrum(const Matrix& c, const PcorOptions& opts) {
    opts.validate();
    if (!c.allFinite()) throw InvalidArgument("correlation matrix has non-finite entries");
    const auto d = static_cast<std::size_t>(std::min(c.rows(), c.cols()));
    SingularSpectrum out;
    out.values.assign(d, 0.0);
    if (d == 0) return out;

    if (d <= opts.exact_dim_threshold || opts.truncate_rank >= d) {
        out.values = exact_singular_values(c);
    } else {
        TruncatedSvdOptions t;
        t.rank = opts.truncate_rank;
        t.seed = opts.svd_seed;
        const auto top = top_singular_values(c, t);
        std::copy(top.begin(), top.end(), out.values.begin());
        out.truncated = true;
    }
    for (double& v : out.values)
        if (!(v >= kSingularFloor)) v = 0.0;
    std::sort(out.values.begin(), out.values.end(), std::greater<>());
    return out;
}

double pcor_from_spectrum(const SingularSpectrum& spectrum) {
    const std::size_t d = spectrum.d();
    if (d == 0) throw InvalidArgument("empty spectrum");
    if (d == 1) return std::clamp(spectrum.values.front(), 0.0, 1.0);
    const double dd = static_cast<double>(d);
    const double mean = std::accumulate(spectrum.values.begin(), spectrum.values.end(), 0.0) / dd;
    double ss = 0.0;
    for (double v : spectrum.values) ss += (v - mean) * (v - mean);
    const double value = std::sqrt(ss / (dd - 1.0)) / std::sqrt(dd);
    return std::clamp(value, 0.0, 1.0);
}

double pcor_from_correlation(const Matrix& c, const PcorOptions& opts) {
    return pcor_from_spectrum(singular_spectrum(c, opts));
}

double pcor(const Matrix& xi, const Matrix& xj, const PcorOptions& opts) {
    if (xi.cols() < 1 || xj.cols() < 1) throw InvalidArgument("pcor needs non-empty parties");
    const bool same = &xi == &xj || (xi.rows() == xj.rows() && xi.cols() == xj.cols() && xi == xj);
    if (same) return pcor_from_correlation(self_correlation(xi, opts.kind), opts);
    return pcor_from_correlation(column_correlation(xi, xj, opts.kind), opts);
}

double mcor(const Matrix& x, CorrelationKind kind) {
    if (x.cols() < 2) throw InvalidArgument("mcor needs at least 2 columns");
    Matrix r = self_correlation(x, kind);
    const double asym = (r - r.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9) throw NumericError("self-correlation matrix is not symmetric");
    r = 0.5 * (r + r.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(r, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
    const Vector& lambda = eig.eigenvalues();
    const double m = static_cast<double>(lambda.size());
    const double mean = lambda.mean();
    const double ss = (lambda.array() - mean).square().sum();
    return std::sqrt(ss / (m - 1.0)) / std::sqrt(m);
}

double icor_from_table(const Matrix& t) {
    const Eigen::Index k = t.rows();
    if (k < 2 || t.cols() != k) throw InvalidArgument("Icor requires K >= 2 parties");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
            if (i != j) sum += t(i, j) - t(i, i);
    return sum / static_cast<double>(k * (k - 1));
}

double icor(const GlobalDataset& ds, const PartyPartition& part, const PcorOptions& opts) {
    if (part.num_features() != ds.cols())
        throw InvalidArgument("assignment length does not match feature count");
    if (part.num_parties() < 2) throw InvalidArgument("Icor requires K >= 2 parties");
    if (!part.all_nonempty()) throw InvalidArgument("Icor requires every party to be non-empty");
    IcorEvaluator eval(ds.features, opts);
    return eval.icor(part, true);
}

std::optional<double> pcor_relative_error(double exact, double approx) {
    if (exact == 0.0) return std::nullopt;
    return std::abs(approx - exact) / exact;
}

IcorEvaluator::IcorEvaluator(const Matrix& features, const PcorOptions& opts)
    : corr_(self_correlation(features, opts.kind)), opts_(opts) {
    opts_.validate();
}

IcorEvaluator IcorEvaluator::from_correlation(Matrix correlation, const PcorOptions& opts) {
    if (correlation.rows() != correlation.cols())
        throw InvalidArgument("correlation matrix must be square");
    opts.validate();
    IcorEvaluator e;
    e.corr_ = std::move(correlation);
    e.opts_ = opts;
    return e;
}

double IcorEvaluator::pcor(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) const {
    if (a.empty() || b.empty()) throw InvalidArgument("pcor needs non-empty parties");
    Matrix c(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
    for (std::size_t j = 0; j < b.size(); ++j)
        for (std::size_t i = 0; i < a.size(); ++i)
            c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                corr_(static_cast<Eigen::Index>(a[i]), static_cast<Eigen::Index>(b[j]));
    return pcor_from_correlation(c, opts_);
}

Matrix IcorEvaluator::table(const std::vector<std::vector<std::size_t>>& groups, bool parallel) const {
    const auto k = static_cast<Eigen::Index>(groups.size());
    for (const auto& g : groups)
        if (g.empty()) throw InvalidArgument("Icor requires every party to be non-empty");
    // Upper triangle including the diagonal, as one flat range.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = i; j < k; ++j) pairs.emplace_back(i, j);
    Matrix t(k, k);
    const auto np = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::ptrdiff_t p = 0; p < np; ++p) {
        const auto [i, j] = pairs[static_cast<std::size_t>(p)];
        const double v = pcor(groups[static_cast<std::size_t>(i)], groups[static_cast<std::size_t>(j)]);
        t(i, j) = v;
        t(j, i) = v;
    }
    return t;
}

double IcorEvaluator::icor(const std::vector<std::vector<std::size_t>>& groups, bool parallel) const {
    if (groups.size() < 2) throw InvalidArgument("Icor requires K >= 2 parties");
    return icor_from_table(table(groups, parallel));
}

double IcorEvaluator::icor(const PartyPartition& part, bool parallel) const {
    if (part.num_features() != num_features())
        throw InvalidArgument("assignment length does not match feature count");
    return icor(part.groups(), parallel);
}

}  // namespace vsplit
