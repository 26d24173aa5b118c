#pragma once

#include <cstdint>

#include "firecrest/app/thread_pool.hpp"
#include "firecrest/config.hpp"
#include "firecrest/delegation/delegation_service.hpp"
#include "firecrest/http/types.hpp"
#include "firecrest/machine/machine.hpp"
#include "firecrest/tasks/task_store.hpp"

namespace firecrest::services {

// Job management: every call answers with a task reference and the scheduler
// work happens on the pool, each step under its own delegation certificate.
class ComputeService {
public:
    ComputeService(tasks::TaskStore& tasks, delegation::DelegationService& delegation,
                   machine::MachineRegistry& machines, ThreadPool& pool,
                   std::uint64_t script_cap_bytes);

    http::ApiResponse submit(http::ApiRequest& req);
    http::ApiResponse list_jobs(http::ApiRequest& req);
    http::ApiResponse get_job(http::ApiRequest& req);
    http::ApiResponse cancel_job(http::ApiRequest& req);
    http::ApiResponse accounting(http::ApiRequest& req);

    static std::string machine_name(const http::ApiRequest& req);

private:
    void fail_task(const std::string& task_id, const std::string& step,
                   const delegation::ExecutionResult& result);
    void query_async(const identity::Claims& claims, machine::Machine& m,
                     const std::string& task_id, const std::string& command);

    tasks::TaskStore& tasks_;
    delegation::DelegationService& delegation_;
    machine::MachineRegistry& machines_;
    ThreadPool& pool_;
    std::uint64_t script_cap_bytes_;
};

}  // namespace firecrest::services
