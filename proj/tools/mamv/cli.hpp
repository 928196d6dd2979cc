#pragma once

// Batch front end: run configurations validated against the published
// schema, the example / rate / solve / sweep commands, and flag parsing.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mamv/geometry.hpp"
#include "mamv/operators.hpp"
#include "mamv/quadrature.hpp"

namespace mamv::cli {

enum ExitCode { kOk = 0, kValidation = 2, kNumerical = 3 };

/// Parsed docs/run_config.schema.json, embedded at build time.
const nlohmann::json& run_config_schema();

/// rect:x0,y0,x1,y1 | disc:cx,cy,r | polygon:x1,y1,x2,y2,... | whole.
ConvexDomain parse_domain(const std::string& text);
/// A string as above, or {"disc":{"center":[..],"radius":r}},
/// {"rect":{"lo":[..],"hi":[..]}}, {"polygon":[[x,y],...]}, {"whole_space":true}.
ConvexDomain parse_domain(const nlohmann::json& literal);
inline ConvexDomain parse_domain(const char* text) { return parse_domain(std::string(text)); }
/// power:a | const:c | table:e1=p1;e2=p2;...
PhiSchedule parse_phi(const std::string& text);
/// const:c, or a catalog function name; `rhs` picks its right-hand side
/// instead of its values.
ScalarField parse_field(const std::string& text, bool rhs);

/// Validates, executes and writes artifacts. CSV goes to out.csv (stdout when
/// absent or "-"), progress lines and error JSON to `err`.
int run(const nlohmann::json& config, std::ostream& out, std::ostream& err);

/// Command-line entry: `mamv <command> [--key value ...] [--config file]`.
/// Dotted flags address nested keys (--search.rotations 32); a config file
/// supersedes flags.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mamv::cli
