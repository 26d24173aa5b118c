#include "firecrest/services/storage_service.hpp"

#include "firecrest/services/compute_service.hpp"
#include "firecrest/services/tasks_service.hpp"
#include "firecrest/util/shellwords.hpp"

namespace firecrest::services {

using delegation::run_delegated;
using tasks::TaskStatus;

StorageService::StorageService(tasks::TaskStore& tasks,
                               delegation::DelegationService& delegation,
                               machine::MachineRegistry& machines,
                               storage::StagingStore& staging, ThreadPool& pool,
                               StorageConfig config, ClockFn clock)
    : tasks_(tasks),
      delegation_(delegation),
      machines_(machines),
      staging_(staging),
      pool_(pool),
      config_(std::move(config)),
      clock_(std::move(clock)) {}

void StorageService::fail_task(const std::string& task_id, const std::string& step,
                               const std::string& message) {
    try {
        tasks_.update(task_id, TaskStatus::ERROR, {{"step", step}, {"error", message}});
    } catch (const std::exception&) {
        // Terminal already; nothing left to record.
    }
}

http::ApiResponse StorageService::request_upload(http::ApiRequest& req) {
    const auto claims = req.require_claims();
    auto& m = machines_.require(ComputeService::machine_name(req));
    nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
        throw ApiError(400, "bad_request", "JSON body required");
    }
    std::string target_path = body.value("target_path", "");
    std::string filename = body.value("filename", "");
    std::uint64_t size = body.value("size", std::uint64_t{0});
    if (target_path.empty() || filename.empty() || filename.find('/') != std::string::npos) {
        throw ApiError(400, "bad_request", "target_path and a bare filename are required");
    }
    if (size > config_.external_size_cap_bytes) {
        throw ApiError(413, "too_large", "declared size exceeds the external transfer cap");
    }
    // Destination is target_path/filename; reject escapes before staging.
    m.fs().validate_path(claims.username, target_path + "/" + filename);

    auto task = tasks_.create(claims.username, "storage", "external upload");
    tasks_.update(task.task_id, TaskStatus::PROGRESS, {{"step", "allocating"}});
    std::string object_key = claims.username + "/" + task.task_id + "/" + filename;
    auto url = staging_.make_temp_url("PUT", object_key, config_.upload_url_ttl_seconds);
    staging_.set_expiry(object_key, url.expires);  // GC backstop if never completed
    auto updated = tasks_.update(task.task_id, TaskStatus::WAITING_FOR_USER,
                                 {{"upload_url", url.to_url()},
                                  {"object_key", object_key},
                                  {"target_path", target_path},
                                  {"filename", filename},
                                  {"expires", url.expires}});
    return task_reference_response(updated);
}

http::ApiResponse StorageService::complete_upload(http::ApiRequest& req) {
    const auto claims = req.require_claims();
    const std::string task_id = req.path_params.at("task_id");
    auto task = tasks_.get(claims.username, task_id);  // 404 on foreign/unknown
    if (task.status != TaskStatus::WAITING_FOR_USER) {
        throw ApiError(409, "invalid_state", "upload task is not waiting for an object");
    }
    std::string object_key = task.data.value("object_key", "");
    std::string machine = ComputeService::machine_name(req);
    auto& m = machines_.require(machine);
    if (!staging_.exists(object_key)) {
        // Task stays WAITING_FOR_USER; the client has not staged the object.
        throw ApiError(409, "object_missing", "no object has been staged for this task");
    }
    std::string destination =
        task.data.value("target_path", "") + "/" + task.data.value("filename", "");
    auto updated = tasks_.update(task_id, TaskStatus::PROGRESS, {{"step", "transferring"}});
    auto* mp = &m;

    pool_.submit([this, claims, mp, task_id, object_key, destination] {
        try {
            auto bytes = staging_.fetch(object_key);
            if (!bytes) return fail_task(task_id, "fetch_object", "staged object vanished");
            std::string cmd = "put -p " + shellwords::quote(destination);
            auto r = run_delegated(delegation_, claims, cmd, mp->executor(), *bytes);
            if (!r.ok()) return fail_task(task_id, "filesystem_write", r.error);
            staging_.remove(object_key);
            tasks_.update(task_id, TaskStatus::SUCCESS,
                          {{"target_path", destination}, {"bytes", bytes->size()}});
        } catch (const std::exception& e) {
            fail_task(task_id, "transfer", e.what());
        }
    });
    return task_reference_response(updated, 200);
}

http::ApiResponse StorageService::request_download(http::ApiRequest& req) {
    const auto claims = req.require_claims();
    auto& m = machines_.require(ComputeService::machine_name(req));
    std::string source_path = req.query_param("source_path");
    if (source_path.empty()) {
        throw ApiError(400, "bad_request", "source_path query parameter is required");
    }
    m.fs().validate_path(claims.username, source_path);  // escape -> 400 now

    auto task = tasks_.create(claims.username, "storage", "external download");
    std::string task_id = task.task_id;
    auto pos = source_path.find_last_of('/');
    std::string filename =
        pos == std::string::npos ? source_path : source_path.substr(pos + 1);
    std::string object_key = claims.username + "/" + task_id + "/" + filename;
    auto* mp = &m;

    pool_.submit([this, claims, mp, task_id, source_path, object_key] {
        try {
            tasks_.update(task_id, TaskStatus::PROGRESS, {{"step", "staging_copy"}});
            std::string cmd = "get " + shellwords::quote(source_path);
            auto r = run_delegated(delegation_, claims, cmd, mp->executor());
            if (!r.ok()) return fail_task(task_id, "read_source", r.error);
            staging_.put(object_key, r.output);
            auto url = staging_.make_temp_url("GET", object_key,
                                              config_.download_url_ttl_seconds);
            staging_.set_expiry(object_key, url.expires);
            tasks_.update(task_id, TaskStatus::SUCCESS,
                          {{"download_url", url.to_url()},
                           {"object_key", object_key},
                           {"expires", url.expires},
                           {"source_path", source_path}});
        } catch (const std::exception& e) {
            fail_task(task_id, "download", e.what());
        }
    });
    return task_reference_response(task);
}

http::ApiResponse StorageService::internal_transfer(http::ApiRequest& req) {
    const auto claims = req.require_claims();
    auto& m = machines_.require(ComputeService::machine_name(req));
    const std::string operation = req.path_params.at("operation");
    if (operation != "rsync" && operation != "mv" && operation != "rm") {
        throw ApiError(400, "unknown_operation", "operation must be rsync, mv or rm");
    }
    nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
        throw ApiError(400, "bad_request", "JSON body required");
    }
    std::string target = body.value("target_path", "");
    std::string source = body.value("source_path", "");
    if (target.empty()) {
        throw ApiError(400, "bad_request", "target_path is required");
    }
    if (operation == "rm") {
        if (!source.empty()) {
            throw ApiError(400, "bad_request", "rm takes only a target_path");
        }
    } else if (source.empty()) {
        throw ApiError(400, "missing_source", operation + " requires a source_path");
    }
    m.fs().validate_path(claims.username, target);
    if (!source.empty()) m.fs().validate_path(claims.username, source);

    std::string effect_cmd;
    if (operation == "rm") {
        effect_cmd = "rm -r " + shellwords::quote(target);
    } else {
        effect_cmd = operation + " " + shellwords::quote(source) + " " +
                     shellwords::quote(target);
    }

    auto task = tasks_.create(claims.username, "storage", "internal transfer " + operation);
    std::string task_id = task.task_id;
    auto* mp = &m;

    pool_.submit([this, claims, mp, task_id, operation, effect_cmd] {
        try {
            tasks_.update(task_id, TaskStatus::PROGRESS, {{"step", "scheduling"}});
            std::string dir = "/home/" + claims.username + "/firecrest/" + task_id;
            auto r = run_delegated(delegation_, claims, "mkdir -p " + shellwords::quote(dir),
                                   mp->executor());
            if (!r.ok()) return fail_task(task_id, "mkdir", r.error);

            std::string script_path = dir + "/xfer.sh";
            std::string script = "#!/bin/bash\n#SBATCH --job-name=xfer-" + operation +
                                 "\n#SBATCH --time=00:00:10\n" + effect_cmd + "\n";
            r = run_delegated(delegation_, claims, "put " + shellwords::quote(script_path),
                              mp->executor(), script);
            if (!r.ok()) return fail_task(task_id, "copy_script", r.error);

            r = run_delegated(delegation_, claims, "sbatch " + shellwords::quote(script_path),
                              mp->executor());
            if (!r.ok()) return fail_task(task_id, "sbatch", r.error);
            auto space = r.output.find_last_of(' ');
            std::int64_t job_id = std::stoll(r.output.substr(space + 1));
            tasks_.update(task_id, TaskStatus::PROGRESS,
                          {{"step", "scheduled"}, {"job_id", job_id}});

            // The filesystem effect applies when the scheduler completes the job.
            mp->scheduler().on_completion(
                job_id, [this, claims, mp, task_id, operation, effect_cmd,
                         job_id](const scheduler::SimJob& job) {
                    try {
                        if (job.state != scheduler::JobState::COMPLETED) {
                            return fail_task(task_id, "job",
                                             std::string("transfer job ended ") +
                                                 scheduler::to_string(job.state));
                        }
                        auto rr = run_delegated(delegation_, claims, effect_cmd,
                                                mp->executor());
                        if (!rr.ok()) return fail_task(task_id, "apply_effect", rr.error);
                        tasks_.update(task_id, TaskStatus::SUCCESS,
                                      {{"job_id", job_id}, {"operation", operation}});
                    } catch (const std::exception& e) {
                        fail_task(task_id, "apply_effect", e.what());
                    }
                });
        } catch (const std::exception& e) {
            fail_task(task_id, "transfer", e.what());
        }
    });
    return task_reference_response(task);
}

void StorageService::verify_staging_request(const http::ApiRequest& req,
                                            const std::string& method) const {
    if (!staging_.ping()) {
        throw ApiError(503, "staging_unavailable", "staging store is unavailable");
    }
    std::string sig = req.query_param("temp_url_sig");
    std::string expires_raw = req.query_param("temp_url_expires");
    std::int64_t expires = 0;
    try {
        expires = std::stoll(expires_raw);
    } catch (const std::exception&) {
        throw ApiError(401, "invalid_signature", "malformed temp URL parameters");
    }
    if (!staging_.verify(method, req.path, expires, sig, clock_())) {
        // The signature binds the method: a URL signed for the other verb is
        // a method mismatch, anything else is an invalid or expired signature.
        std::string other = method == "PUT" ? "GET" : "PUT";
        if (staging_.verify(other, req.path, expires, sig, clock_())) {
            throw ApiError(405, "method_mismatch", "temp URL not valid for this method");
        }
        throw ApiError(401, "invalid_signature", "temp URL signature rejected or expired");
    }
}

http::ApiResponse StorageService::staging_put(http::ApiRequest& req) {
    verify_staging_request(req, "PUT");
    if (req.body.size() > config_.external_size_cap_bytes) {
        throw ApiError(413, "too_large", "object exceeds the external transfer cap");
    }
    std::string object_key = req.path_params.at("object_key");
    staging_.put(object_key, req.body);
    return http::json_response(201, {{"object_key", object_key},
                                     {"bytes", req.body.size()}});
}

http::ApiResponse StorageService::staging_get(http::ApiRequest& req) {
    verify_staging_request(req, "GET");
    auto bytes = staging_.fetch(req.path_params.at("object_key"));
    if (!bytes) {
        throw ApiError(404, "not_found", "no such staging object");
    }
    http::ApiResponse resp;
    resp.status = 200;
    resp.body = *bytes;
    resp.content_type = "application/octet-stream";
    return resp;
}

}  // namespace firecrest::services
