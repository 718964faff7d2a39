#pragma once

#include <string>
#include <string_view>

namespace vsplit {

enum class CorrelationKind { spearman, pearson };

std::string_view to_string(CorrelationKind kind);
// Throws InvalidArgument for anything other than "spearman" or "pearson".
CorrelationKind parse_correlation_kind(std::string_view text);

enum class SplitMode { importance, correlation };

std::string_view to_string(SplitMode mode);
SplitMode parse_split_mode(std::string_view text);

}  // namespace vsplit
