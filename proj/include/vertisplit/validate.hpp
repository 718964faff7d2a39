#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace vsplit::validate {

struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string summary;      // one line
    nlohmann::json details;   // measured values
    double seconds = 0.0;
};

struct SuiteOptions {
    std::uint64_t seed = 0;
    bool parallel = true;
};

// Names accepted by run_suite, in execution order.
const std::vector<std::string>& suite_names();

// Runs one self-contained harness on procedurally generated fixtures.
// Throws InvalidArgument for an unknown name.
SuiteResult run_suite(const std::string& name, const SuiteOptions& options = {});

}  // namespace vsplit::validate
