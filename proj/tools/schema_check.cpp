#include "schema_check.hpp"

#include <map>
#include <stdexcept>

#include "schemas.inc"

using nlohmann::json;

namespace {

bool has_type(const json& doc, const std::string& type) {
    if (type == "object") return doc.is_object();
    if (type == "array") return doc.is_array();
    if (type == "string") return doc.is_string();
    if (type == "boolean") return doc.is_boolean();
    if (type == "null") return doc.is_null();
    if (type == "integer") return doc.is_number_integer();
    if (type == "number") return doc.is_number();
    throw std::logic_error("unsupported schema type " + type);
}

}  // namespace

std::vector<std::string> SchemaChecker::check(const json& doc) const {
    std::vector<std::string> errors;
    visit(root_, doc, "$", errors);
    return errors;
}

const json& SchemaChecker::resolve(const std::string& ref) const {
    const std::string prefix = "#/$defs/";
    if (ref.rfind(prefix, 0) != 0) throw std::logic_error("unsupported $ref " + ref);
    return root_.at("$defs").at(ref.substr(prefix.size()));
}

void SchemaChecker::visit(const json& schema, const json& doc, const std::string& where,
                          std::vector<std::string>& errors) const {
    if (schema.contains("$ref")) {
        visit(resolve(schema.at("$ref").get<std::string>()), doc, where, errors);
        return;
    }
    if (schema.contains("type")) {
        const auto& t = schema.at("type");
        bool ok = false;
        if (t.is_string()) {
            ok = has_type(doc, t.get<std::string>());
        } else {
            for (const auto& alt : t) ok = ok || has_type(doc, alt.get<std::string>());
        }
        if (!ok) {
            errors.push_back(where + ": expected type " + t.dump());
            return;
        }
    }
    if (schema.contains("enum")) {
        bool found = false;
        for (const auto& v : schema.at("enum")) found = found || v == doc;
        if (!found) errors.push_back(where + ": value " + doc.dump() + " not in " + schema.at("enum").dump());
    }
    if (schema.contains("anyOf")) {
        bool matched = false;
        for (const auto& alt : schema.at("anyOf")) {
            std::vector<std::string> sub;
            visit(alt, doc, where, sub);
            if (sub.empty()) {
                matched = true;
                break;
            }
        }
        if (!matched) errors.push_back(where + ": matches no alternative of anyOf");
    }
    if (doc.is_number()) {
        const double v = doc.get<double>();
        if (schema.contains("minimum") && v < schema.at("minimum").get<double>())
            errors.push_back(where + ": below minimum");
        if (schema.contains("maximum") && v > schema.at("maximum").get<double>())
            errors.push_back(where + ": above maximum");
    }
    if (doc.is_array()) {
        if (schema.contains("minItems") && doc.size() < schema.at("minItems").get<std::size_t>())
            errors.push_back(where + ": too few items");
        if (schema.contains("maxItems") && doc.size() > schema.at("maxItems").get<std::size_t>())
            errors.push_back(where + ": too many items");
        if (schema.contains("items"))
            for (std::size_t i = 0; i < doc.size(); ++i)
                visit(schema.at("items"), doc[i], where + "[" + std::to_string(i) + "]", errors);
    }
    if (doc.is_object()) {
        if (schema.contains("required"))
            for (const auto& key : schema.at("required"))
                if (!doc.contains(key.get<std::string>()))
                    errors.push_back(where + ": missing required key " + key.get<std::string>());
        const json empty = json::object();
        const auto& props = schema.contains("properties") ? schema.at("properties") : empty;
        for (const auto& [key, value] : doc.items()) {
            if (props.contains(key)) {
                visit(props.at(key), value, where + "." + key, errors);
            } else if (schema.contains("additionalProperties")) {
                const auto& extra = schema.at("additionalProperties");
                if (extra.is_boolean()) {
                    if (!extra.get<bool>()) errors.push_back(where + ": unexpected key " + key);
                } else {
                    visit(extra, value, where + "." + key, errors);
                }
            }
        }
    }
}

const SchemaChecker& schema_for(std::string_view name) {
    static const std::map<std::string, SchemaChecker, std::less<>> checkers = [] {
        std::map<std::string, SchemaChecker, std::less<>> m;
        for (const auto& [n, text] : kSchemas) m.emplace(std::string(n), SchemaChecker(json::parse(text)));
        return m;
    }();
    auto it = checkers.find(name);
    if (it == checkers.end()) throw std::logic_error("no embedded schema named " + std::string(name));
    return it->second;
}
