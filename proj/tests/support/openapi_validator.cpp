#include <regex>
#include <set>

#include "support/oracles.hpp"

namespace test_support {

namespace {

using nlohmann::json;

void check_schema_object(const json& schema, const std::string& where,
                         std::vector<std::string>& errors, int depth = 0) {
    if (depth > 16) return;
    if (!schema.is_object()) {
        errors.push_back(where + ": schema must be an object");
        return;
    }
    if (schema.contains("$ref")) {
        if (!schema["$ref"].is_string()) errors.push_back(where + ": $ref must be a string");
        return;
    }
    if (schema.contains("type")) {
        static const std::set<std::string> kTypes = {"string",  "number", "integer",
                                                     "boolean", "array",  "object"};
        if (!schema["type"].is_string() || !kTypes.count(schema["type"].get<std::string>())) {
            errors.push_back(where + ": invalid schema type");
        }
        if (schema["type"] == "array" && !schema.contains("items")) {
            errors.push_back(where + ": array schema requires items");
        }
    }
    if (schema.contains("properties")) {
        for (auto& [name, sub] : schema["properties"].items()) {
            check_schema_object(sub, where + ".properties." + name, errors, depth + 1);
        }
    }
    if (schema.contains("items")) {
        check_schema_object(schema["items"], where + ".items", errors, depth + 1);
    }
}

void check_parameter(const json& param, const std::string& where,
                     std::set<std::pair<std::string, std::string>>& seen,
                     std::vector<std::string>& errors) {
    if (!param.is_object()) {
        errors.push_back(where + ": parameter must be an object");
        return;
    }
    if (!param.contains("name") || !param["name"].is_string()) {
        errors.push_back(where + ": parameter requires a string name");
        return;
    }
    if (!param.contains("in") || !param["in"].is_string()) {
        errors.push_back(where + ": parameter requires 'in'");
        return;
    }
    static const std::set<std::string> kIn = {"query", "header", "path", "cookie"};
    std::string in = param["in"].get<std::string>();
    if (!kIn.count(in)) errors.push_back(where + ": invalid parameter location " + in);
    if (in == "path" && (!param.contains("required") || param["required"] != true)) {
        errors.push_back(where + ": path parameters must be required");
    }
    if (!param.contains("schema") && !param.contains("content")) {
        errors.push_back(where + ": parameter requires schema or content");
    }
    if (param.contains("schema")) check_schema_object(param["schema"], where + ".schema", errors);
    auto key = std::make_pair(param["name"].get<std::string>(), in);
    if (!seen.insert(key).second) {
        errors.push_back(where + ": duplicate parameter " + key.first + " in " + key.second);
    }
}

std::set<std::string> template_vars(const std::string& path) {
    std::set<std::string> out;
    static const std::regex var(R"(\{([^}/]+)\})");
    for (auto it = std::sregex_iterator(path.begin(), path.end(), var);
         it != std::sregex_iterator(); ++it) {
        out.insert((*it)[1]);
    }
    return out;
}

}  // namespace

std::vector<std::string> validate_openapi(const json& doc) {
    std::vector<std::string> errors;
    if (!doc.is_object()) return {"document must be an object"};

    if (!doc.contains("openapi") || !doc["openapi"].is_string() ||
        !std::regex_match(doc["openapi"].get<std::string>(), std::regex(R"(3\.0\.\d+)"))) {
        errors.push_back("openapi field must match 3.0.x");
    }
    if (!doc.contains("info") || !doc["info"].is_object()) {
        errors.push_back("info object is required");
    } else {
        if (!doc["info"].contains("title") || !doc["info"]["title"].is_string())
            errors.push_back("info.title is required");
        if (!doc["info"].contains("version") || !doc["info"]["version"].is_string())
            errors.push_back("info.version is required");
    }

    std::set<std::string> security_schemes;
    if (doc.contains("components") && doc["components"].contains("securitySchemes")) {
        for (auto& [name, scheme] : doc["components"]["securitySchemes"].items()) {
            security_schemes.insert(name);
            if (!scheme.contains("type") || !scheme["type"].is_string()) {
                errors.push_back("securityScheme " + name + " requires a type");
            }
        }
    }
    if (doc.contains("components") && doc["components"].contains("schemas")) {
        for (auto& [name, schema] : doc["components"]["schemas"].items()) {
            check_schema_object(schema, "components.schemas." + name, errors);
        }
    }

    if (!doc.contains("paths") || !doc["paths"].is_object()) {
        errors.push_back("paths object is required");
        return errors;
    }
    static const std::set<std::string> kOps = {"get",     "put",   "post", "delete",
                                               "options", "head",  "patch", "trace"};
    for (auto& [path, item] : doc["paths"].items()) {
        if (path.empty() || path[0] != '/') {
            errors.push_back("path key must start with '/': " + path);
        }
        if (!item.is_object()) {
            errors.push_back(path + ": path item must be an object");
            continue;
        }
        auto vars = template_vars(path);
        for (auto& [op_name, op] : item.items()) {
            if (op_name == "parameters" || op_name == "summary" || op_name == "description" ||
                op_name == "servers") {
                continue;
            }
            if (!kOps.count(op_name)) {
                errors.push_back(path + ": unknown operation " + op_name);
                continue;
            }
            std::string where = path + "." + op_name;
            if (!op.contains("responses") || !op["responses"].is_object() ||
                op["responses"].empty()) {
                errors.push_back(where + ": responses object is required and non-empty");
            } else {
                for (auto& [code, resp] : op["responses"].items()) {
                    if (code != "default" &&
                        !std::regex_match(code, std::regex(R"([1-5][0-9X]{2})"))) {
                        errors.push_back(where + ": invalid response code " + code);
                    }
                    if (!resp.contains("description")) {
                        errors.push_back(where + "." + code + ": description is required");
                    }
                }
            }
            std::set<std::pair<std::string, std::string>> seen;
            std::set<std::string> path_params_declared;
            if (op.contains("parameters")) {
                if (!op["parameters"].is_array()) {
                    errors.push_back(where + ": parameters must be an array");
                } else {
                    for (const auto& p : op["parameters"]) {
                        check_parameter(p, where, seen, errors);
                        if (p.is_object() && p.value("in", "") == "path") {
                            path_params_declared.insert(p.value("name", ""));
                        }
                    }
                }
            }
            for (const auto& v : vars) {
                if (!path_params_declared.count(v)) {
                    errors.push_back(where + ": template variable {" + v +
                                     "} lacks a path parameter");
                }
            }
            for (const auto& v : path_params_declared) {
                if (!vars.count(v)) {
                    errors.push_back(where + ": path parameter " + v +
                                     " missing from the template");
                }
            }
            if (op.contains("requestBody")) {
                if (!op["requestBody"].contains("content") ||
                    !op["requestBody"]["content"].is_object() ||
                    op["requestBody"]["content"].empty()) {
                    errors.push_back(where + ": requestBody requires content media types");
                }
            }
            if (op.contains("security")) {
                for (const auto& requirement : op["security"]) {
                    for (auto& [scheme, scopes] : requirement.items()) {
                        if (!security_schemes.count(scheme)) {
                            errors.push_back(where + ": unknown security scheme " + scheme);
                        }
                        if (!scopes.is_array()) {
                            errors.push_back(where + ": security scopes must be an array");
                        }
                    }
                }
            }
        }
    }
    return errors;
}

}  // namespace test_support
