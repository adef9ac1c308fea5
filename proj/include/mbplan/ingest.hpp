#pragma once

#include <string>
#include <string_view>

#include "mbplan/diagnostic.hpp"
#include "mbplan/model.hpp"

namespace mbplan::ingest {

inline constexpr std::string_view kFormatVersion = "1";

/// Parses a `.pm1` document (JSON, schema in docs/interchange-schema.json).
/// Never throws; failures come back as `ingest.*` diagnostics.
Result<model::ModelGraph> load_model(std::string_view text);

/// Canonical serialization: sorted lists, fixed key order, empty lists omitted.
std::string save_model(const model::ModelGraph& model);

/// 1-based line/column of a byte offset.
std::pair<int, int> line_column(std::string_view text, std::size_t offset);

}  // namespace mbplan::ingest
