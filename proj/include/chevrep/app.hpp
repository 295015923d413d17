#pragma once

// Config validation, command dispatch and report rendering shared by the C API
// and the tests.
//
// A run produces an envelope:
//   { schema_version, tool {name, version}, command, config, seed,
//     payload, run { certificates, timing? } }
// The payload depends only on the config minus its seed; certificates depend
// on the seed; timing appears only when the config asks for it.

#include <string>

#include "json.hpp"

namespace chevrep::app {

using json = nlohmann::json;

inline constexpr const char* kToolName = "chevrep";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

// Validates a raw config and fills in defaults. Throws Error(Config) on
// unknown fields, wrong types or out-of-range values.
json normalize_config(const json& raw);

// Planned work for a normalized config, without computing anything.
json plan(const json& config);

// Runs a normalized config and returns the envelope.
json run(const json& config);

// "json" (2-space indent, sorted keys, trailing newline) or "table".
std::string render(const json& envelope, const std::string& format);

}  // namespace chevrep::app
