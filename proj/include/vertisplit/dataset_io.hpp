#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vertisplit/manifest.hpp"

namespace vsplit {

// Column-major: one feature per contiguous column.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// The global dataset being split: n samples by m features plus optional labels.
// Immutable after construction; make() checks the invariants.
struct GlobalDataset {
    Matrix features;
    std::optional<Vector> labels;
    std::vector<std::string> column_names;  // empty or exactly m entries
    std::string label_name = "label";

    std::size_t rows() const { return static_cast<std::size_t>(features.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(features.cols()); }

    // Throws InvalidArgument on empty shape, non-finite entries, label length
    // mismatch or a wrong number of column names.
    static GlobalDataset make(Matrix features, std::optional<Vector> labels = std::nullopt,
                              std::vector<std::string> column_names = {});

    // Name of column j, falling back to "f<j>".
    std::string column_name(std::size_t j) const;
};

// Assignment of every feature column to exactly one of K parties.
class PartyPartition {
public:
    PartyPartition() = default;

    // Throws InvalidArgument when an entry falls outside [0, K) or, with
    // require_nonempty, when some party owns no feature.
    PartyPartition(std::vector<int> assignment, int num_parties, bool require_nonempty = false);

    // Contiguous cut of `order` into consecutive blocks of the given sizes.
    static PartyPartition from_blocks(const std::vector<std::size_t>& order,
                                      const std::vector<std::size_t>& counts);

    int num_parties() const { return num_parties_; }
    std::size_t num_features() const { return assignment_.size(); }
    const std::vector<int>& assignment() const { return assignment_; }

    // Original column indices owned by party k, ascending.
    std::vector<std::size_t> columns_of(int party) const;
    std::vector<std::vector<std::size_t>> groups() const;
    std::vector<std::size_t> counts() const;
    bool all_nonempty() const;

    bool operator==(const PartyPartition&) const = default;

private:
    std::vector<int> assignment_;
    int num_parties_ = 0;
};

// Geometry of image samples stored as flattened feature vectors.
struct ImageLayout {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 1;
    double background_value = 0.0;

    std::size_t size() const { return height * width * channels; }
    // Feature index of (channel, row, col); channel-major then row-major.
    std::size_t index(std::size_t channel, std::size_t row, std::size_t col) const {
        return (channel * height + row) * width + col;
    }
};

struct CsvOptions {
    // Either a header name or a zero-based column index given as digits.
    std::optional<std::string> label_column;
    // nullopt: detect (first row has a non-numeric cell).
    std::optional<bool> has_header;
};

GlobalDataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
GlobalDataset load_libsvm(const std::filesystem::path& path);

// Gather the given columns into a new dense matrix, preserving their order.
Matrix select_columns(const Matrix& features, const std::vector<std::size_t>& columns);

// Writes party<k>.csv for every party (plus labels.csv when labels exist) and
// manifest.json into out_dir. `manifest` carries the run description; its
// assignment and source shape fields are filled in here.
SplitManifest materialize_parties(const GlobalDataset& ds, const PartyPartition& part,
                                  const std::filesystem::path& out_dir,
                                  SplitManifest manifest = {});

// Samples of `ds` with every pixel not owned by `party` replaced by the
// layout's background value. Rows are samples in channel-major order.
Matrix flatten_image_split(const Matrix& features, const PartyPartition& part,
                           const ImageLayout& layout, int party);

// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace vsplit
