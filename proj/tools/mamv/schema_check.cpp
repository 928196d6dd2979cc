#include "schema_check.hpp"

namespace mamv::cli {

namespace {

using nlohmann::json;

bool has_type(const json& v, const std::string& type) {
    if (type == "object") return v.is_object();
    if (type == "array") return v.is_array();
    if (type == "string") return v.is_string();
    if (type == "boolean") return v.is_boolean();
    if (type == "integer") return v.is_number_integer() || v.is_number_unsigned();
    if (type == "number") return v.is_number();
    if (type == "null") return v.is_null();
    return false;
}

void check(const json& schema, const json& v, const std::string& path, std::vector<std::string>& errors) {
    const std::string where = path.empty() ? "/" : path;
    if (schema.contains("anyOf")) {
        std::vector<std::string> first;
        for (const json& branch : schema["anyOf"]) {
            std::vector<std::string> e;
            check(branch, v, path, e);
            if (e.empty()) return;
            if (first.empty() || (branch.contains("type") && has_type(v, branch["type"]))) first = e;
        }
        errors.push_back(where + ": matches none of the allowed forms");
        errors.insert(errors.end(), first.begin(), first.end());
        return;
    }
    if (schema.contains("type")) {
        const std::string type = schema["type"];
        if (!has_type(v, type)) {
            errors.push_back(where + ": expected " + type + ", got " + v.type_name());
            return;
        }
    }
    if (schema.contains("enum")) {
        bool found = false;
        for (const json& e : schema["enum"]) found = found || e == v;
        if (!found) errors.push_back(where + ": " + v.dump() + " is not one of " + schema["enum"].dump());
    }
    if (v.is_number()) {
        const double x = v.get<double>();
        if (schema.contains("minimum") && x < schema["minimum"].get<double>())
            errors.push_back(where + ": " + v.dump() + " is below the minimum " + schema["minimum"].dump());
        if (schema.contains("maximum") && x > schema["maximum"].get<double>())
            errors.push_back(where + ": " + v.dump() + " is above the maximum " + schema["maximum"].dump());
        if (schema.contains("exclusiveMinimum") && x <= schema["exclusiveMinimum"].get<double>())
            errors.push_back(where + ": " + v.dump() + " must exceed " + schema["exclusiveMinimum"].dump());
    }
    if (v.is_array()) {
        if (schema.contains("minItems") && v.size() < schema["minItems"].get<std::size_t>())
            errors.push_back(where + ": needs at least " + schema["minItems"].dump() + " items");
        if (schema.contains("maxItems") && v.size() > schema["maxItems"].get<std::size_t>())
            errors.push_back(where + ": allows at most " + schema["maxItems"].dump() + " items");
        if (schema.contains("items"))
            for (std::size_t i = 0; i < v.size(); ++i)
                check(schema["items"], v[i], path + "/" + std::to_string(i), errors);
    }
    if (v.is_object()) {
        const json props = schema.value("properties", json::object());
        if (schema.contains("required"))
            for (const json& key : schema["required"])
                if (!v.contains(key.get<std::string>()))
                    errors.push_back(where + ": missing required key \"" + key.get<std::string>() + "\"");
        if (schema.contains("minProperties") && v.size() < schema["minProperties"].get<std::size_t>())
            errors.push_back(where + ": needs at least " + schema["minProperties"].dump() + " keys");
        if (schema.contains("maxProperties") && v.size() > schema["maxProperties"].get<std::size_t>())
            errors.push_back(where + ": allows at most " + schema["maxProperties"].dump() + " keys");
        const bool closed = schema.contains("additionalProperties") && schema["additionalProperties"] == false;
        for (const auto& [key, value] : v.items()) {
            if (props.contains(key)) {
                check(props[key], value, path + "/" + key, errors);
            } else if (closed) {
                errors.push_back(where + ": unknown key \"" + key + "\"");
            }
        }
    }
}

}  // namespace

std::vector<std::string> schema_errors(const nlohmann::json& schema, const nlohmann::json& doc) {
    std::vector<std::string> errors;
    check(schema, doc, "", errors);
    return errors;
}

}  // namespace mamv::cli
