#include "vertisplit/manifest.hpp"

#include <fstream>
#include <sstream>

#include "vertisplit/errors.hpp"

namespace vsplit {

std::string_view to_string(CorrelationKind kind) {
    return kind == CorrelationKind::spearman ? "spearman" : "pearson";
}

CorrelationKind parse_correlation_kind(std::string_view text) {
    if (text == "spearman") return CorrelationKind::spearman;
    if (text == "pearson") return CorrelationKind::pearson;
    throw InvalidArgument("unknown correlation kind '" + std::string(text) + "'");
}

std::string_view to_string(SplitMode mode) {
    return mode == SplitMode::importance ? "importance" : "correlation";
}

SplitMode parse_split_mode(std::string_view text) {
    if (text == "importance") return SplitMode::importance;
    if (text == "correlation") return SplitMode::correlation;
    throw InvalidArgument("unknown split mode '" + std::string(text) + "'");
}

nlohmann::json to_json(const SplitManifest& m) {
    nlohmann::json j;
    j["version"] = m.version;
    j["seed"] = m.seed;
    j["mode"] = std::string(to_string(m.mode));
    j["params"] = m.params;
    j["corr_kind"] = m.corr_kind ? nlohmann::json(std::string(to_string(*m.corr_kind)))
                                 : nlohmann::json(nullptr);
    j["assignment"] = m.assignment;
    if (m.achieved) {
        j["achieved"] = {{"icor_achieved", m.achieved->icor_achieved},
                         {"icor_min", m.achieved->icor_min},
                         {"icor_max", m.achieved->icor_max},
                         {"target", m.achieved->target},
                         {"optimizer_gap", m.achieved->optimizer_gap}};
    } else {
        j["achieved"] = nullptr;
    }
    j["source"] = {{"path", m.source.path}, {"rows", m.source.rows}, {"cols", m.source.cols}};
    return j;
}

SplitManifest manifest_from_json(const nlohmann::json& j) {
    try {
        SplitManifest m;
        m.version = j.at("version").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.mode = parse_split_mode(j.at("mode").get<std::string>());
        m.params = j.at("params");
        if (!j.at("corr_kind").is_null())
            m.corr_kind = parse_correlation_kind(j.at("corr_kind").get<std::string>());
        m.assignment = j.at("assignment").get<std::vector<int>>();
        if (const auto& a = j.at("achieved"); !a.is_null()) {
            m.achieved = AchievedMetrics{a.at("icor_achieved").get<double>(),
                                         a.at("icor_min").get<double>(),
                                         a.at("icor_max").get<double>(),
                                         a.at("target").get<double>(),
                                         a.at("optimizer_gap").get<double>()};
        }
        const auto& s = j.at("source");
        m.source = {s.at("path").get<std::string>(), s.at("rows").get<std::size_t>(),
                    s.at("cols").get<std::size_t>()};
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed manifest: ") + e.what());
    }
}

std::string dump_manifest(const SplitManifest& manifest) {
    return to_json(manifest).dump(2) + "\n";
}

void write_manifest(const SplitManifest& manifest, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << dump_manifest(manifest);
    if (!out) throw IoError("write failed for " + path.string());
}

SplitManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return manifest_from_json(j);
}

}  // namespace vsplit
