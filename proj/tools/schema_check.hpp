#pragma once

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

// Validates against the subset of JSON Schema used in docs/schemas: type,
// enum, required, properties, additionalProperties, items, minItems,
// maxItems, minimum, maximum, anyOf and local "#/$defs/..." references.
class SchemaChecker {
public:
    explicit SchemaChecker(nlohmann::json schema) : root_(std::move(schema)) {}

    // Empty when the document conforms; otherwise one line per violation.
    std::vector<std::string> check(const nlohmann::json& doc) const;

private:
    void visit(const nlohmann::json& schema, const nlohmann::json& doc, const std::string& where,
               std::vector<std::string>& errors) const;
    const nlohmann::json& resolve(const std::string& ref) const;

    nlohmann::json root_;
};

// Looks up an embedded schema by name ("rank", "verdict", ...).
const SchemaChecker& schema_for(std::string_view name);
