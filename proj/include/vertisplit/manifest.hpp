#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vertisplit/common.hpp"

namespace vsplit {

inline constexpr const char* kManifestVersion = "1.0";

struct AchievedMetrics {
    double icor_achieved = 0.0;
    double icor_min = 0.0;
    double icor_max = 0.0;
    double target = 0.0;
    double optimizer_gap = 0.0;
};

struct SourceInfo {
    std::string path;
    std::size_t rows = 0;
    std::size_t cols = 0;
};

// Reproducibility record of one split. `params` holds the mode-specific
// parameters (alpha vector or beta, counts, optimizer and metric settings).
struct SplitManifest {
    std::string version = kManifestVersion;
    std::uint64_t seed = 0;
    SplitMode mode = SplitMode::importance;
    nlohmann::json params = nlohmann::json::object();
    std::optional<CorrelationKind> corr_kind;
    std::vector<int> assignment;
    std::optional<AchievedMetrics> achieved;
    SourceInfo source;
};

nlohmann::json to_json(const SplitManifest& manifest);
SplitManifest manifest_from_json(const nlohmann::json& j);

// Serialization is canonical: sorted keys, two-space indent, trailing newline.
std::string dump_manifest(const SplitManifest& manifest);
void write_manifest(const SplitManifest& manifest, const std::filesystem::path& path);
SplitManifest read_manifest(const std::filesystem::path& path);

}  // namespace vsplit
