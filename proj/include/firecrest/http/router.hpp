#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "firecrest/http/types.hpp"

namespace firecrest::http {

using Handler = std::function<ApiResponse(ApiRequest&)>;

// Per-route metadata feeding the served API document.
struct RouteDoc {
    std::string summary;
    std::string service;  // owning microservice name
    struct Param {
        std::string name;
        std::string in;  // "query" | "header" | "path"
        bool required = false;
        std::string description;
    };
    std::vector<Param> params;
    std::string request_body;  // media type, empty when none
    std::map<int, std::string> responses;
};

struct Route {
    std::string method;
    std::string pattern;  // e.g. "/jobs/{jobid}", "/staging/{object_key...}"
    bool auth_required = true;
    Handler handler;
    RouteDoc doc;
    // Test instrumentation: counts handler invocations after auth passed.
    std::shared_ptr<std::atomic<std::uint64_t>> invocations =
        std::make_shared<std::atomic<std::uint64_t>>(0);
};

class Router {
public:
    enum class Outcome { matched, not_found, method_not_allowed };

    struct Match {
        Outcome outcome = Outcome::not_found;
        const Route* route = nullptr;
        std::map<std::string, std::string> params;
    };

    void add(Route route);
    Match resolve(const std::string& method, const std::string& path) const;

    const std::vector<Route>& routes() const { return routes_; }

private:
    static bool match_pattern(const std::string& pattern, const std::string& path,
                              std::map<std::string, std::string>& params);
    std::vector<Route> routes_;
};

std::vector<std::string> split_path(const std::string& path);

}  // namespace firecrest::http
