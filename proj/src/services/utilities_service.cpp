#include "firecrest/services/utilities_service.hpp"

#include <chrono>
#include <future>
#include <memory>
#include <thread>

#include "firecrest/services/compute_service.hpp"
#include "firecrest/util/shellwords.hpp"

namespace firecrest::services {

using delegation::ExecutionResult;
using shellwords::quote;

UtilitiesService::UtilitiesService(delegation::DelegationService& delegation,
                                   machine::MachineRegistry& machines, UtilitiesConfig config)
    : delegation_(delegation), machines_(machines), config_(config) {}

ExecutionResult UtilitiesService::run(const identity::Claims& claims, machine::Machine& m,
                                      const std::string& command, const std::string& input) {
    auto promise = std::make_shared<std::promise<ExecutionResult>>();
    auto future = promise->get_future();
    auto* machine = &m;
    auto* svc = &delegation_;
    // Detached worker: on timeout the response returns while the straggler
    // finishes against the sandbox on its own.
    std::thread([promise, svc, claims, machine, command, input] {
        try {
            auto cert = svc->mint_certificate(claims, command,
                                              svc->max_ttl() < 120 ? svc->max_ttl() : 120);
            promise->set_value(svc->verify_and_execute(cert, command, machine->executor(),
                                                       input));
        } catch (...) {
            try {
                promise->set_exception(std::current_exception());
            } catch (...) {
            }
        }
    }).detach();

    if (future.wait_for(std::chrono::seconds(config_.timeout_seconds)) !=
        std::future_status::ready) {
        throw ApiError(408, "timeout", "operation exceeded the utilities timeout");
    }
    auto result = future.get();
    if (!result.ok()) {
        throw ApiError(result.http_status > 0 ? result.http_status : 500,
                       result.error_id.empty() ? "command_failed" : result.error_id,
                       result.error.empty() ? "command failed" : result.error);
    }
    return result;
}

namespace {

std::string required_query(const http::ApiRequest& req, const std::string& name) {
    std::string v = req.query_param(name);
    if (v.empty()) {
        throw firecrest::ApiError(400, "missing_parameter",
                                  "query parameter '" + name + "' is required");
    }
    return v;
}

nlohmann::json required_json_body(const http::ApiRequest& req) {
    nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
        throw firecrest::ApiError(400, "bad_request", "JSON body required");
    }
    return body;
}

std::string required_field(const nlohmann::json& body, const std::string& name) {
    if (!body.contains(name) || !body.at(name).is_string() ||
        body.at(name).get<std::string>().empty()) {
        throw firecrest::ApiError(400, "missing_parameter",
                                  "field '" + name + "' is required");
    }
    return body.at(name).get<std::string>();
}

}  // namespace

http::ApiResponse UtilitiesService::ls(http::ApiRequest& req) {
    const auto claims = req.require_claims();
    auto& m = machines_.require(ComputeService::machine_name(req));
    auto r = run(claims, m, "ls " + quote(required_query(req, "path")));
    return http::json_response(200, {{"entries", nlohmann::json::parse(r.output)}});
}

http::ApiResponse UtilitiesService::file_type(http::ApiRequest& req) {
    const auto claims = req.require_claims();
    auto& m = machines_.require(ComputeService::machine_name(req));
    auto r = run(claims, m, "file " + quote(required_query(req, "path")));
    return http::json_response(200, {{"type", r.output}});
}

http::ApiResponse UtilitiesService::mkdir(http::ApiRequest& req) {
    const auto claims = req.require_claims();
    auto& m = machines_.require(ComputeService::machine_name(req));
    auto body = required_json_body(req);
    bool parents = body.value("parents", false);
    std::string cmd = parents ? "mkdir -p " : "mkdir ";
    run(claims, m, cmd + quote(required_field(body, "path")));
    return http::json_response(201, nlohmann::json::object());
}

http::ApiResponse UtilitiesService::rename(http::ApiRequest& req) {
    const auto claims = req.require_claims();
    auto& m = machines_.require(ComputeService::machine_name(req));
    auto body = required_json_body(req);
    run(claims, m,
        "mv " + quote(required_field(body, "source")) + " " +
            quote(required_field(body, "target")));
    return http::json_response(200, nlohmann::json::object());
}

http::ApiResponse UtilitiesService::chmod(http::ApiRequest& req) {
    const auto claims = req.require_claims();
    auto& m = machines_.require(ComputeService::machine_name(req));
    auto body = required_json_body(req);
    run(claims, m,
        "chmod " + quote(required_field(body, "mode")) + " " +
            quote(required_field(body, "path")));
    return http::json_response(200, nlohmann::json::object());
}

http::ApiResponse UtilitiesService::chown(http::ApiRequest& req) {
    const auto claims = req.require_claims();
    auto& m = machines_.require(ComputeService::machine_name(req));
    auto body = required_json_body(req);
    std::string owner = body.value("owner", "");
    std::string group = body.value("group", "");
    if (owner.empty() && group.empty()) {
        throw ApiError(400, "missing_argument", "chown requires an owner and/or group");
    }
    run(claims, m,
        "chown " + quote(owner + ":" + group) + " " + quote(required_field(body, "path")));
    return http::json_response(200, nlohmann::json::object());
}

http::ApiResponse UtilitiesService::symlink(http::ApiRequest& req) {
    const auto claims = req.require_claims();
    auto& m = machines_.require(ComputeService::machine_name(req));
    auto body = required_json_body(req);
    run(claims, m,
        "ln -s " + quote(required_field(body, "target")) + " " +
            quote(required_field(body, "link_path")));
    return http::json_response(201, nlohmann::json::object());
}

http::ApiResponse UtilitiesService::upload_small(http::ApiRequest& req) {
    const auto claims = req.require_claims();
    auto& m = machines_.require(ComputeService::machine_name(req));
    auto file = req.files.find("file");
    if (file == req.files.end()) {
        throw ApiError(400, "missing_file", "multipart file part 'file' is required");
    }
    auto path_it = req.form.find("path");
    if (path_it == req.form.end() || path_it->second.empty()) {
        throw ApiError(400, "missing_parameter", "form field 'path' is required");
    }
    if (file->second.content.size() > config_.small_file_cap_bytes) {
        throw ApiError(413, "too_large",
                       "file exceeds the small-file cap; use /storage/xfer-external/upload");
    }
    std::string filename = file->second.filename.empty() ? "upload" : file->second.filename;
    run(claims, m, "put " + quote(path_it->second + "/" + filename), file->second.content);
    return http::json_response(201, nlohmann::json::object());
}

http::ApiResponse UtilitiesService::download_small(http::ApiRequest& req) {
    const auto claims = req.require_claims();
    auto& m = machines_.require(ComputeService::machine_name(req));
    auto r = run(claims, m, "get " + quote(required_query(req, "path")));
    if (r.output.size() > config_.small_file_cap_bytes) {
        throw ApiError(413, "too_large",
                       "file exceeds the small-file cap; use /storage/xfer-external/download");
    }
    http::ApiResponse resp;
    resp.status = 200;
    resp.body = r.output;
    resp.content_type = "application/octet-stream";
    return resp;
}

}  // namespace firecrest::services
