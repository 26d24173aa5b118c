#include "firecrest/gateway/openapi.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace firecrest::gateway {

std::string openapi_path(const std::string& pattern) {
    std::string out = pattern;
    auto pos = out.find("...}");
    if (pos != std::string::npos) out.erase(pos, 3);
    return out;
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

nlohmann::ordered_json param_to_json(const http::RouteDoc::Param& p) {
    nlohmann::ordered_json j;
    j["name"] = p.name;
    j["in"] = p.in;
    if (p.required || p.in == "path") j["required"] = true;
    if (!p.description.empty()) j["description"] = p.description;
    j["schema"] = {{"type", "string"}};
    return j;
}

}  // namespace

nlohmann::ordered_json build_openapi_document(const std::vector<http::Route>& routes) {
    nlohmann::ordered_json doc;
    doc["openapi"] = "3.0.3";
    doc["info"] = {{"title", "FirecREST API"},
                   {"description",
                    "RESTful gateway for HPC resource access: job management, data "
                    "transfer, filesystem utilities, status and task tracking."},
                   {"version", "1.0.0"}};
    doc["servers"] = nlohmann::ordered_json::array({{{"url", "/"}}});
    doc["components"] = {
        {"securitySchemes",
         {{"bearerAuth", {{"type", "http"}, {"scheme", "bearer"}, {"bearerFormat", "JWT"}}}}},
        {"schemas",
         {{"ErrorEnvelope",
           {{"type", "object"},
            {"required", nlohmann::ordered_json::array({"status", "error_id", "message"})},
            {"properties",
             {{"status", {{"type", "integer"}}},
              {"error_id", {{"type", "string"}}},
              {"message", {{"type", "string"}}}}}}},
          {"Task",
           {{"type", "object"},
            {"properties",
             {{"task_id", {{"type", "string"}}},
              {"hash_id", {{"type", "string"}}},
              {"owner", {{"type", "string"}}},
              {"service", {{"type", "string"}}},
              {"status",
               {{"type", "string"},
                {"enum", nlohmann::ordered_json::array(
                             {"NEW", "PROGRESS", "WAITING_FOR_USER", "SUCCESS", "ERROR"})}}},
              {"description", {{"type", "string"}}},
              {"data", {{"type", "object"}}},
              {"created_at", {{"type", "string"}}},
              {"updated_at", {{"type", "string"}}}}}}},
          {"TaskReference",
           {{"type", "object"},
            {"properties",
             {{"task_id", {{"type", "string"}}},
              {"task_url", {{"type", "string"}}},
              {"status", {{"type", "string"}}}}}}}}}};

    nlohmann::ordered_json paths = nlohmann::ordered_json::object();
    // Stable path ordering independent of router specificity sorting.
    std::vector<const http::Route*> ordered;
    for (const auto& r : routes) ordered.push_back(&r);
    std::sort(ordered.begin(), ordered.end(), [](const http::Route* a, const http::Route* b) {
        if (a->pattern != b->pattern) return a->pattern < b->pattern;
        return a->method < b->method;
    });

    for (const auto* route : ordered) {
        nlohmann::ordered_json op;
        op["summary"] = route->doc.summary.empty() ? route->pattern : route->doc.summary;
        op["operationId"] = lower(route->method) + "_" +
                            [&] {
                                std::string id;
                                for (char c : openapi_path(route->pattern)) {
                                    if (std::isalnum(static_cast<unsigned char>(c))) id += c;
                                    else if (!id.empty() && id.back() != '_') id += '_';
                                }
                                while (!id.empty() && id.back() == '_') id.pop_back();
                                return id.empty() ? std::string("root") : id;
                            }();
        if (!route->doc.service.empty()) {
            op["tags"] = nlohmann::ordered_json::array({route->doc.service});
        }
        nlohmann::ordered_json params = nlohmann::ordered_json::array();
        for (const auto& p : route->doc.params) params.push_back(param_to_json(p));
        if (!params.empty()) op["parameters"] = params;
        if (!route->doc.request_body.empty()) {
            op["requestBody"] = {
                {"required", true},
                {"content", {{route->doc.request_body, {{"schema", {{"type", "object"}}}}}}}};
        }
        nlohmann::ordered_json responses = nlohmann::ordered_json::object();
        for (const auto& [code, description] : route->doc.responses) {
            nlohmann::ordered_json resp;
            resp["description"] = description;
            if (code >= 400) {
                resp["content"] = {{"application/json",
                                    {{"schema",
                                      {{"$ref", "#/components/schemas/ErrorEnvelope"}}}}}};
            }
            responses[std::to_string(code)] = resp;
        }
        if (responses.empty()) responses["200"] = {{"description", "success"}};
        op["responses"] = responses;
        if (route->auth_required) {
            op["security"] = nlohmann::ordered_json::array(
                {nlohmann::ordered_json{{"bearerAuth", nlohmann::ordered_json::array()}}});
        }
        paths[openapi_path(route->pattern)][lower(route->method)] = op;
    }
    doc["paths"] = paths;
    return doc;
}

namespace {

std::string yaml_quote(const std::string& s) {
    // Single-quoted style: only embedded quotes need doubling, and the
    // result never parses as a number/bool/null.
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "''";
        else out += c;
    }
    out += "'";
    return out;
}

void emit(const nlohmann::ordered_json& v, std::ostringstream& out, int indent);

void emit_scalar(const nlohmann::ordered_json& v, std::ostringstream& out) {
    if (v.is_string()) out << yaml_quote(v.get<std::string>());
    else if (v.is_boolean()) out << (v.get<bool>() ? "true" : "false");
    else if (v.is_null()) out << "null";
    else out << v.dump();
}

bool is_scalar(const nlohmann::ordered_json& v) {
    return !v.is_object() && !v.is_array();
}

void emit(const nlohmann::ordered_json& v, std::ostringstream& out, int indent) {
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    if (v.is_object()) {
        for (auto it = v.begin(); it != v.end(); ++it) {
            out << pad << yaml_quote(it.key()) << ":";
            if (is_scalar(it.value())) {
                out << " ";
                emit_scalar(it.value(), out);
                out << "\n";
            } else if (it.value().empty()) {
                out << (it.value().is_array() ? " []" : " {}") << "\n";
            } else {
                out << "\n";
                emit(it.value(), out, indent + 1);
            }
        }
    } else if (v.is_array()) {
        for (const auto& item : v) {
            if (is_scalar(item)) {
                out << pad << "- ";
                emit_scalar(item, out);
                out << "\n";
            } else if (item.empty()) {
                out << pad << "- " << (item.is_array() ? "[]" : "{}") << "\n";
            } else {
                out << pad << "-\n";
                emit(item, out, indent + 1);
            }
        }
    }
}

}  // namespace

std::string to_yaml(const nlohmann::ordered_json& value) {
    std::ostringstream out;
    if (is_scalar(value)) {
        emit_scalar(value, out);
        out << "\n";
    } else {
        emit(value, out, 0);
    }
    return out.str();
}

}  // namespace firecrest::gateway
