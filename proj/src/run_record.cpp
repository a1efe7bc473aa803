#include "qcsim/run_record.hpp"

#include <stdexcept>

namespace qcsim {

namespace {

// Keep byte-identical with schemas/run_record.schema.json (enforced by a
// test); the CLI validates against this copy so the binary stays
// self-contained.
constexpr const char* kRunRecordSchemaText = R"JSON({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "qcsim RunRecord",
  "description": "Machine-readable result of one qcsim CLI invocation.",
  "type": "object",
  "required": [
    "schema_version",
    "command",
    "seed",
    "config",
    "outputs",
    "wall_time_ms",
    "library_version"
  ],
  "additionalProperties": false,
  "properties": {
    "schema_version": { "type": "integer", "enum": [1] },
    "command": {
      "type": "string",
      "enum": ["run", "vqe", "qaoa", "qml", "qec", "zne", "qft-check"]
    },
    "seed": { "type": "integer", "minimum": 0 },
    "config": { "type": "object" },
    "outputs": { "type": "object" },
    "wall_time_ms": { "type": "number", "minimum": 0 },
    "library_version": { "type": "string" }
  }
}
)JSON";

bool type_matches(const nlohmann::json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "number") return value.is_number();
  if (type == "integer") return value.is_number_integer();
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  return false;
}

void validate_into(const nlohmann::json& instance, const nlohmann::json& schema,
                   const std::string& path, std::vector<std::string>* errors) {
  if (!schema.is_object()) return;

  if (auto it = schema.find("type"); it != schema.end()) {
    if (!type_matches(instance, it->get<std::string>())) {
      errors->push_back(path + ": expected type " + it->get<std::string>());
      return;
    }
  }
  if (auto it = schema.find("enum"); it != schema.end()) {
    bool found = false;
    for (const auto& candidate : *it) {
      if (instance == candidate) {
        found = true;
        break;
      }
    }
    if (!found) errors->push_back(path + ": value not in enum");
  }
  if (auto it = schema.find("minimum"); it != schema.end() && instance.is_number()) {
    if (instance.get<double>() < it->get<double>()) {
      errors->push_back(path + ": below minimum " + it->dump());
    }
  }
  if (instance.is_object()) {
    const auto props_it = schema.find("properties");
    if (auto it = schema.find("required"); it != schema.end()) {
      for (const auto& key : *it) {
        if (!instance.contains(key.get<std::string>())) {
          errors->push_back(path + ": missing required property '" + key.get<std::string>() +
                            "'");
        }
      }
    }
    for (const auto& [key, value] : instance.items()) {
      const bool declared = props_it != schema.end() && props_it->contains(key);
      if (declared) {
        validate_into(value, (*props_it)[key], path + "." + key, errors);
      } else if (auto ap = schema.find("additionalProperties");
                 ap != schema.end() && ap->is_boolean() && !ap->get<bool>()) {
        errors->push_back(path + ": unexpected property '" + key + "'");
      }
    }
  }
  if (instance.is_array()) {
    if (auto it = schema.find("items"); it != schema.end() && it->is_object()) {
      for (std::size_t i = 0; i < instance.size(); ++i) {
        validate_into(instance[i], *it, path + "[" + std::to_string(i) + "]", errors);
      }
    }
  }
}

}  // namespace

const char* library_version() { return "0.1.0"; }

std::vector<std::string> schema_validate(const nlohmann::json& instance,
                                         const nlohmann::json& schema, const std::string& path) {
  std::vector<std::string> errors;
  validate_into(instance, schema, path, &errors);
  return errors;
}

const nlohmann::json& run_record_schema() {
  static const nlohmann::json schema = nlohmann::json::parse(kRunRecordSchemaText);
  return schema;
}

nlohmann::json to_json(const RunRecord& record) {
  nlohmann::json j{{"schema_version", kRunRecordSchemaVersion},
                   {"command", record.command},
                   {"seed", record.seed},
                   {"config", record.config},
                   {"outputs", record.outputs},
                   {"wall_time_ms", record.wall_time_ms},
                   {"library_version", library_version()}};
  const std::vector<std::string> errors = schema_validate(j, run_record_schema());
  if (!errors.empty()) {
    std::string what = "run record does not match its schema:";
    for (const std::string& e : errors) what += "\n  " + e;
    throw std::logic_error(what);
  }
  return j;
}

}  // namespace qcsim
