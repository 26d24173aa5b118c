#include "firecrest/services/compute_service.hpp"

#include <regex>

#include "firecrest/services/tasks_service.hpp"
#include "firecrest/util/shellwords.hpp"

namespace firecrest::services {

using delegation::ExecutionResult;
using tasks::TaskStatus;

ComputeService::ComputeService(tasks::TaskStore& tasks,
                               delegation::DelegationService& delegation,
                               machine::MachineRegistry& machines, ThreadPool& pool,
                               std::uint64_t script_cap_bytes)
    : tasks_(tasks),
      delegation_(delegation),
      machines_(machines),
      pool_(pool),
      script_cap_bytes_(script_cap_bytes) {}

std::string ComputeService::machine_name(const http::ApiRequest& req) {
    std::string name = req.header("x-machine-name");
    if (name.empty()) {
        throw ApiError(400, "missing_machine", "X-Machine-Name header is required");
    }
    return name;
}

void ComputeService::fail_task(const std::string& task_id, const std::string& step,
                               const ExecutionResult& result) {
    tasks_.update(task_id, TaskStatus::ERROR,
                  {{"step", step},
                   {"error", result.error.empty() ? result.output : result.error},
                   {"exit_code", result.exit_code}});
}

http::ApiResponse ComputeService::submit(http::ApiRequest& req) {
    const auto claims = req.require_claims();
    auto& m = machines_.require(machine_name(req));
    auto file = req.files.find("file");
    if (file == req.files.end()) {
        throw ApiError(400, "missing_file", "multipart file part 'file' is required");
    }
    if (file->second.content.size() > script_cap_bytes_) {
        throw ApiError(413, "file_too_large", "job script exceeds the small-file cap");
    }
    std::string filename = file->second.filename.empty() ? "job.sh" : file->second.filename;
    std::string script = file->second.content;

    auto task = tasks_.create(claims.username, "compute", "job submission");
    std::string task_id = task.task_id;
    std::string staging_dir = "/home/" + claims.username + "/firecrest/" + task_id;
    auto* machine = &m;

    pool_.submit([this, claims, machine, task_id, staging_dir, filename, script] {
        try {
            tasks_.update(task_id, TaskStatus::PROGRESS, {{"step", "mkdir"}});
            std::string mkdir_cmd = "mkdir -p " + shellwords::quote(staging_dir);
            auto r = delegation::run_delegated(delegation_, claims, mkdir_cmd,
                                               machine->executor());
            if (!r.ok()) return fail_task(task_id, "mkdir", r);

            tasks_.update(task_id, TaskStatus::PROGRESS, {{"step", "copy_script"}});
            std::string script_path = staging_dir + "/" + filename;
            std::string put_cmd = "put " + shellwords::quote(script_path);
            r = delegation::run_delegated(delegation_, claims, put_cmd, machine->executor(),
                                          script);
            if (!r.ok()) return fail_task(task_id, "copy_script", r);

            tasks_.update(task_id, TaskStatus::PROGRESS, {{"step", "sbatch"}});
            std::string sbatch_cmd = "sbatch " + shellwords::quote(script_path);
            r = delegation::run_delegated(delegation_, claims, sbatch_cmd, machine->executor());
            if (!r.ok()) return fail_task(task_id, "sbatch", r);

            static const std::regex id_pattern(R"(Submitted batch job (\d+))");
            std::smatch match;
            if (!std::regex_search(r.output, match, id_pattern)) {
                return fail_task(task_id, "sbatch",
                                 {1, r.output, "could not parse job id", 0, ""});
            }
            tasks_.update(task_id, TaskStatus::SUCCESS,
                          {{"job_id", std::stoll(match[1])},
                           {"staging_dir", staging_dir},
                           {"sbatch_output", r.output}});
        } catch (const std::exception& e) {
            fail_task(task_id, "pipeline", {1, "", e.what(), 0, ""});
        }
    });
    return task_reference_response(task);
}

void ComputeService::query_async(const identity::Claims& claims, machine::Machine& m,
                                 const std::string& task_id, const std::string& command) {
    auto* machine = &m;
    pool_.submit([this, claims, machine, task_id, command] {
        try {
            tasks_.update(task_id, TaskStatus::PROGRESS, {{"step", "query"}});
            auto r = delegation::run_delegated(delegation_, claims, command,
                                               machine->executor());
            if (!r.ok()) return fail_task(task_id, "query", r);
            tasks_.update(task_id, TaskStatus::SUCCESS,
                          {{"jobs", nlohmann::json::parse(r.output)}});
        } catch (const std::exception& e) {
            fail_task(task_id, "query", {1, "", e.what(), 0, ""});
        }
    });
}

http::ApiResponse ComputeService::list_jobs(http::ApiRequest& req) {
    const auto claims = req.require_claims();
    auto& m = machines_.require(machine_name(req));
    auto task = tasks_.create(claims.username, "compute", "job listing");
    query_async(claims, m, task.task_id, "squeue --json -u " + claims.username);
    return task_reference_response(task);
}

http::ApiResponse ComputeService::get_job(http::ApiRequest& req) {
    const auto claims = req.require_claims();
    auto& m = machines_.require(machine_name(req));
    const std::string jobid = req.path_params.at("jobid");
    if (!std::all_of(jobid.begin(), jobid.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
        jobid.empty()) {
        throw ApiError(400, "invalid_job_id", "job id must be an integer");
    }
    auto task = tasks_.create(claims.username, "compute", "job query");
    std::string task_id = task.task_id;
    auto* machine = &m;

    pool_.submit([this, claims, machine, task_id, jobid] {
        try {
            tasks_.update(task_id, TaskStatus::PROGRESS, {{"step", "squeue"}});
            std::string cmd = "squeue --json -u " + claims.username + " -j " + jobid;
            auto r = delegation::run_delegated(delegation_, claims, cmd, machine->executor());
            if (!r.ok()) return fail_task(task_id, "squeue", r);
            auto jobs = nlohmann::json::parse(r.output);
            if (jobs.empty()) {
                // Terminal jobs fall out of the queue; accounting still has them.
                std::string acct_cmd = "sacct --json -u " + claims.username;
                r = delegation::run_delegated(delegation_, claims, acct_cmd,
                                              machine->executor());
                if (!r.ok()) return fail_task(task_id, "sacct", r);
                for (const auto& job : nlohmann::json::parse(r.output)) {
                    if (std::to_string(job.at("job_id").get<std::int64_t>()) == jobid) {
                        jobs.push_back(job);
                    }
                }
            }
            if (jobs.empty()) {
                return fail_task(task_id, "lookup",
                                 {1, "", "job " + jobid + " not found for user", 404,
                                  "job_not_found"});
            }
            tasks_.update(task_id, TaskStatus::SUCCESS, {{"job", jobs.at(0)}});
        } catch (const std::exception& e) {
            fail_task(task_id, "query", {1, "", e.what(), 0, ""});
        }
    });
    return task_reference_response(task);
}

http::ApiResponse ComputeService::cancel_job(http::ApiRequest& req) {
    const auto claims = req.require_claims();
    auto& m = machines_.require(machine_name(req));
    const std::string jobid = req.path_params.at("jobid");
    auto task = tasks_.create(claims.username, "compute", "job cancellation");
    std::string task_id = task.task_id;
    auto* machine = &m;

    pool_.submit([this, claims, machine, task_id, jobid] {
        try {
            tasks_.update(task_id, TaskStatus::PROGRESS, {{"step", "scancel"}});
            auto r = delegation::run_delegated(delegation_, claims, "scancel " + jobid,
                                               machine->executor());
            if (!r.ok()) return fail_task(task_id, "scancel", r);
            tasks_.update(task_id, TaskStatus::SUCCESS, {{"job_id", std::stoll(jobid)}});
        } catch (const std::exception& e) {
            fail_task(task_id, "scancel", {1, "", e.what(), 0, ""});
        }
    });
    return task_reference_response(task);
}

http::ApiResponse ComputeService::accounting(http::ApiRequest& req) {
    const auto claims = req.require_claims();
    auto& m = machines_.require(machine_name(req));
    auto task = tasks_.create(claims.username, "compute", "accounting query");
    query_async(claims, m, task.task_id, "sacct --json -u " + claims.username);
    return task_reference_response(task);
}

}  // namespace firecrest::services
