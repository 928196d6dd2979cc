#pragma once

// Validation of a JSON document against the subset of JSON Schema used by
// docs/run_config.schema.json: type, enum, properties, required,
// additionalProperties (false), anyOf, items, minItems, maxItems,
// minProperties, maxProperties, minimum, maximum, exclusiveMinimum.

#include <string>
#include <vector>

#include <json.hpp>

namespace mamv::cli {

/// One message per violation, each prefixed with the JSON pointer of the
/// offending value. Empty when the document conforms.
std::vector<std::string> schema_errors(const nlohmann::json& schema, const nlohmann::json& doc);

}  // namespace mamv::cli
