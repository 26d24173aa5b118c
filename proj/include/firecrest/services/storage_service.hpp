#pragma once

#include "firecrest/app/thread_pool.hpp"
#include "firecrest/config.hpp"
#include "firecrest/delegation/delegation_service.hpp"
#include "firecrest/http/types.hpp"
#include "firecrest/machine/machine.hpp"
#include "firecrest/storage/staging_store.hpp"
#include "firecrest/tasks/task_store.hpp"

namespace firecrest::services {

// Data mover: external transfers via the staging store's temp URLs, internal
// transfers scheduled as batch jobs whose completion applies the filesystem
// effect.
class StorageService {
public:
    StorageService(tasks::TaskStore& tasks, delegation::DelegationService& delegation,
                   machine::MachineRegistry& machines, storage::StagingStore& staging,
                   ThreadPool& pool, StorageConfig config, ClockFn clock);

    http::ApiResponse request_upload(http::ApiRequest& req);
    http::ApiResponse complete_upload(http::ApiRequest& req);
    http::ApiResponse request_download(http::ApiRequest& req);
    http::ApiResponse internal_transfer(http::ApiRequest& req);

    // Unauthenticated staging surface, gated by temp-URL signatures.
    http::ApiResponse staging_put(http::ApiRequest& req);
    http::ApiResponse staging_get(http::ApiRequest& req);

private:
    void fail_task(const std::string& task_id, const std::string& step,
                   const std::string& message);
    void verify_staging_request(const http::ApiRequest& req, const std::string& method) const;

    tasks::TaskStore& tasks_;
    delegation::DelegationService& delegation_;
    machine::MachineRegistry& machines_;
    storage::StagingStore& staging_;
    ThreadPool& pool_;
    StorageConfig config_;
    ClockFn clock_;
};

}  // namespace firecrest::services
