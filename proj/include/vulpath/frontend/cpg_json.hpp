#pragma once

#include <json.hpp>

#include "vulpath/frontend/cpg.hpp"

namespace vulpath::frontend {

nlohmann::json cpg_to_json(const CodePropertyGraph& g);

/// Validates `doc` against the CPG schema and builds the graph. Throws
/// SchemaError naming the JSON path of the first violation.
CodePropertyGraph cpg_from_json(const nlohmann::json& doc);

}  // namespace vulpath::frontend
