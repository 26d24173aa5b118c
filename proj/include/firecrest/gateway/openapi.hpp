#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "firecrest/http/router.hpp"

namespace firecrest::gateway {

// Builds the OpenAPI 3.0 description straight from the route table, so every
// registered route appears in the served document by construction.
nlohmann::ordered_json build_openapi_document(const std::vector<http::Route>& routes);

// OpenAPI path template for a route pattern ("{key...}" -> "{key}").
std::string openapi_path(const std::string& pattern);

// Minimal YAML emitter for JSON-shaped documents: block style, quoted strings.
std::string to_yaml(const nlohmann::ordered_json& value);

}  // namespace firecrest::gateway
