#include "vertisplit/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "vertisplit/errors.hpp"

namespace vsplit {

namespace fs = std::filesystem;

GlobalDataset GlobalDataset::make(Matrix features, std::optional<Vector> labels,
                                  std::vector<std::string> column_names) {
    if (features.rows() < 1 || features.cols() < 1)
        throw InvalidArgument("dataset must have at least one row and one column");
    if (!features.allFinite()) throw InvalidArgument("dataset contains NaN or Inf");
    if (labels) {
        if (labels->size() != features.rows())
            throw InvalidArgument("label count " + std::to_string(labels->size()) +
                                  " does not match row count " +
                                  std::to_string(features.rows()));
        if (!labels->allFinite()) throw InvalidArgument("labels contain NaN or Inf");
    }
    if (!column_names.empty() && column_names.size() != static_cast<std::size_t>(features.cols()))
        throw InvalidArgument("column name count does not match column count");
    GlobalDataset ds;
    ds.features = std::move(features);
    ds.labels = std::move(labels);
    ds.column_names = std::move(column_names);
    return ds;
}

std::string GlobalDataset::column_name(std::size_t j) const {
    if (j < column_names.size()) return column_names[j];
    return "f" + std::to_string(j);
}

PartyPartition::PartyPartition(std::vector<int> assignment, int num_parties, bool require_nonempty)
    : assignment_(std::move(assignment)), num_parties_(num_parties) {
    if (num_parties_ < 1) throw InvalidArgument("number of parties must be >= 1");
    for (std::size_t j = 0; j < assignment_.size(); ++j) {
        if (assignment_[j] < 0 || assignment_[j] >= num_parties_)
            throw InvalidArgument("feature " + std::to_string(j) + " assigned to party " +
                                  std::to_string(assignment_[j]) + " outside [0, " +
                                  std::to_string(num_parties_) + ")");
    }
    if (require_nonempty && !all_nonempty()) throw InvalidArgument("a party owns no feature");
}

PartyPartition PartyPartition::from_blocks(const std::vector<std::size_t>& order,
                                           const std::vector<std::size_t>& counts) {
    std::size_t total = 0;
    for (auto c : counts) total += c;
    if (total != order.size())
        throw InvalidArgument("party sizes sum to " + std::to_string(total) + ", expected " +
                              std::to_string(order.size()));
    std::vector<int> assignment(order.size(), -1);
    std::size_t pos = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        for (std::size_t c = 0; c < counts[k]; ++c, ++pos) {
            const auto col = order[pos];
            if (col >= order.size() || assignment[col] != -1)
                throw InvalidArgument("order is not a permutation");
            assignment[col] = static_cast<int>(k);
        }
    }
    return PartyPartition(std::move(assignment), static_cast<int>(counts.size()));
}

std::vector<std::size_t> PartyPartition::columns_of(int party) const {
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < assignment_.size(); ++j)
        if (assignment_[j] == party) cols.push_back(j);
    return cols;
}

std::vector<std::vector<std::size_t>> PartyPartition::groups() const {
    std::vector<std::vector<std::size_t>> g(static_cast<std::size_t>(num_parties_));
    for (std::size_t j = 0; j < assignment_.size(); ++j)
        g[static_cast<std::size_t>(assignment_[j])].push_back(j);
    return g;
}

std::vector<std::size_t> PartyPartition::counts() const {
    std::vector<std::size_t> c(static_cast<std::size_t>(num_parties_), 0);
    for (int a : assignment_) ++c[static_cast<std::size_t>(a)];
    return c;
}

bool PartyPartition::all_nonempty() const {
    const auto c = counts();
    return std::all_of(c.begin(), c.end(), [](std::size_t x) { return x > 0; });
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

// Splits one CSV record. Quoted fields may contain commas and doubled quotes;
// embedded newlines are not supported.
std::vector<std::string> split_csv_record(const std::string& line, std::size_t line_no) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            cells.push_back(was_quoted ? cur : trim(cur));
            cur.clear();
            was_quoted = false;
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) throw ParseError("row " + std::to_string(line_no) + ": unterminated quote");
    cells.push_back(was_quoted ? cur : trim(cur));
    return cells;
}

bool parse_real(std::string_view text, double& out) {
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return false;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && ptr == end;
}

std::size_t resolve_label_column(const std::string& wanted, const std::vector<std::string>& header,
                                 std::size_t arity) {
    if (auto it = std::find(header.begin(), header.end(), wanted); it != header.end())
        return static_cast<std::size_t>(it - header.begin());
    if (!wanted.empty() && std::all_of(wanted.begin(), wanted.end(), ::isdigit)) {
        const auto idx = static_cast<std::size_t>(std::stoul(wanted));
        if (idx < arity) return idx;
    }
    throw InvalidArgument("label column '" + wanted + "' not found");
}

}  // namespace

GlobalDataset load_csv(const fs::path& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::vector<std::vector<std::string>> records;
    std::vector<std::size_t> line_numbers;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        records.push_back(split_csv_record(line, line_no));
        line_numbers.push_back(line_no);
    }
    if (records.empty()) throw ParseError(path.string() + ": no samples");

    const std::size_t arity = records.front().size();
    bool has_header = false;
    if (options.has_header) {
        has_header = *options.has_header;
    } else {
        double tmp = 0.0;
        has_header = std::any_of(records.front().begin(), records.front().end(),
                                 [&](const std::string& c) { return !parse_real(c, tmp); });
    }
    std::vector<std::string> header;
    if (has_header) {
        header = records.front();
    } else {
        for (std::size_t j = 0; j < arity; ++j) header.push_back("f" + std::to_string(j));
    }

    std::optional<std::size_t> label_idx;
    if (options.label_column) label_idx = resolve_label_column(*options.label_column, header, arity);

    const std::size_t first = has_header ? 1 : 0;
    const std::size_t n = records.size() - first;
    if (n == 0) throw ParseError(path.string() + ": no samples");
    const std::size_t m = arity - (label_idx ? 1 : 0);
    if (m == 0) throw ParseError(path.string() + ": no feature columns");

    Matrix features(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    Vector labels(static_cast<Eigen::Index>(label_idx ? n : 0));
    for (std::size_t r = first; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.size() != arity)
            throw ParseError(path.string() + ": row " + std::to_string(line_numbers[r]) + " has " +
                             std::to_string(rec.size()) + " cells, expected " +
                             std::to_string(arity));
        const auto i = static_cast<Eigen::Index>(r - first);
        Eigen::Index col = 0;
        for (std::size_t c = 0; c < arity; ++c) {
            double v = 0.0;
            if (!parse_real(rec[c], v) || !std::isfinite(v))
                throw ParseError(path.string() + ": row " + std::to_string(line_numbers[r]) +
                                 ", column \"" + header[c] + "\": cannot parse '" + rec[c] +
                                 "' as a finite number");
            if (label_idx && c == *label_idx)
                labels[i] = v;
            else
                features(i, col++) = v;
        }
    }

    std::vector<std::string> names;
    for (std::size_t c = 0; c < arity; ++c)
        if (!label_idx || c != *label_idx) names.push_back(header[c]);

    auto ds = GlobalDataset::make(std::move(features),
                                  label_idx ? std::optional<Vector>(std::move(labels)) : std::nullopt,
                                  std::move(names));
    if (label_idx) ds.label_name = header[*label_idx];
    return ds;
}

GlobalDataset load_libsvm(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::vector<double> labels;
    std::vector<std::vector<std::pair<std::size_t, double>>> rows;
    std::size_t max_index = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream tokens(line);
        std::string tok;
        if (!(tokens >> tok)) continue;
        double label = 0.0;
        if (!parse_real(tok, label) || !std::isfinite(label))
            throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                             ": bad label '" + tok + "'");
        std::vector<std::pair<std::size_t, double>> entries;
        std::size_t prev = 0;
        while (tokens >> tok) {
            const auto colon = tok.find(':');
            std::size_t idx = 0;
            double val = 0.0;
            const bool ok_idx =
                colon != std::string::npos && colon > 0 &&
                std::from_chars(tok.data(), tok.data() + colon, idx).ptr == tok.data() + colon;
            if (!ok_idx || !parse_real(std::string_view(tok).substr(colon + 1), val) ||
                !std::isfinite(val) || idx == 0)
                throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                                 ": unparsable token '" + tok + "'");
            if (idx <= prev)
                throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                                 ": indices not increasing at '" + tok + "'");
            prev = idx;
            max_index = std::max(max_index, idx);
            entries.emplace_back(idx - 1, val);
        }
        labels.push_back(label);
        rows.push_back(std::move(entries));
    }
    if (rows.empty()) throw ParseError(path.string() + ": no samples");
    if (max_index == 0) throw ParseError(path.string() + ": no features");

    Matrix features = Matrix::Zero(static_cast<Eigen::Index>(rows.size()),
                                   static_cast<Eigen::Index>(max_index));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (const auto& [j, v] : rows[i])
            features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    Vector y = Eigen::Map<const Vector>(labels.data(), static_cast<Eigen::Index>(labels.size()));
    return GlobalDataset::make(std::move(features), std::move(y));
}

Matrix select_columns(const Matrix& features, const std::vector<std::size_t>& columns) {
    Matrix out(features.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c)
        out.col(static_cast<Eigen::Index>(c)) = features.col(static_cast<Eigen::Index>(columns[c]));
    return out;
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw NumericError("cannot format value");
    return std::string(buf, ptr);
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_party_csv(const fs::path& path, const GlobalDataset& ds,
                     const std::vector<std::size_t>& cols, bool with_labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    std::string text;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c) text.push_back(',');
        text += csv_escape(ds.column_name(cols[c]));
    }
    if (with_labels) {
        if (!cols.empty()) text.push_back(',');
        text += csv_escape(ds.label_name);
    }
    text.push_back('\n');
    for (Eigen::Index i = 0; i < ds.features.rows(); ++i) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) text.push_back(',');
            text += format_double(ds.features(i, static_cast<Eigen::Index>(cols[c])));
        }
        if (with_labels) {
            if (!cols.empty()) text.push_back(',');
            text += format_double((*ds.labels)[i]);
        }
        text.push_back('\n');
    }
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

SplitManifest materialize_parties(const GlobalDataset& ds, const PartyPartition& part,
                                  const fs::path& out_dir, SplitManifest manifest) {
    if (part.num_features() != ds.cols())
        throw InvalidArgument("assignment length " + std::to_string(part.num_features()) +
                              " does not match feature count " + std::to_string(ds.cols()));
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    const auto groups = part.groups();
    for (int k = 0; k < part.num_parties(); ++k) {
        write_party_csv(out_dir / ("party" + std::to_string(k) + ".csv"), ds,
                        groups[static_cast<std::size_t>(k)], k == 0 && ds.labels.has_value());
    }
    if (ds.labels) write_party_csv(out_dir / "labels.csv", ds, {}, true);

    manifest.assignment = part.assignment();
    manifest.source.rows = ds.rows();
    manifest.source.cols = ds.cols();
    write_manifest(manifest, out_dir / "manifest.json");
    return manifest;
}

Matrix flatten_image_split(const Matrix& features, const PartyPartition& part,
                           const ImageLayout& layout, int party) {
    const auto m = static_cast<std::size_t>(features.cols());
    if (layout.size() != m || part.num_features() != m)
        throw InvalidArgument("image layout " + std::to_string(layout.channels) + "x" +
                              std::to_string(layout.height) + "x" + std::to_string(layout.width) +
                              " does not match " + std::to_string(m) + " features");
    if (party < 0 || party >= part.num_parties()) throw InvalidArgument("party index out of range");
    Matrix out = features;
    const auto& a = part.assignment();
    for (std::size_t j = 0; j < m; ++j)
        if (a[j] != party) out.col(static_cast<Eigen::Index>(j)).setConstant(layout.background_value);
    return out;
}

}  // namespace vsplit
