#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace qcsim {

inline constexpr int kRunRecordSchemaVersion = 1;

const char* library_version();

// Validates `instance` against the subset of JSON Schema draft-07 used by the
// shipped schema: type, enum, minimum, required, properties,
// additionalProperties (boolean form), items (single schema). Returns one
// message per violation; empty means valid.
std::vector<std::string> schema_validate(const nlohmann::json& instance,
                                         const nlohmann::json& schema,
                                         const std::string& path = "$");

// Parsed copy of schemas/run_record.schema.json embedded in the library.
const nlohmann::json& run_record_schema();

struct RunRecord {
  std::string command;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json outputs = nlohmann::json::object();
  double wall_time_ms = 0.0;
};

// Full record as JSON, checked against the schema (throws std::logic_error
// listing the violations if the record does not conform).
nlohmann::json to_json(const RunRecord& record);

}  // namespace qcsim
