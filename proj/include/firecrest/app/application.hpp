#pragma once

#include <atomic>
#include <memory>
#include <thread>

#include "firecrest/app/thread_pool.hpp"
#include "firecrest/config.hpp"
#include "firecrest/delegation/delegation_service.hpp"
#include "firecrest/gateway/gateway.hpp"
#include "firecrest/identity/identity_service.hpp"
#include "firecrest/machine/machine.hpp"
#include "firecrest/services/auth_service.hpp"
#include "firecrest/services/compute_service.hpp"
#include "firecrest/services/status_service.hpp"
#include "firecrest/services/storage_service.hpp"
#include "firecrest/services/tasks_service.hpp"
#include "firecrest/services/utilities_service.hpp"
#include "firecrest/storage/staging_store.hpp"
#include "firecrest/tasks/task_store.hpp"

namespace firecrest {

// Wires every microservice behind one gateway in a single process. The
// in-memory dispatch (handle()) is the same code path the HTTP adapter uses.
class Application {
public:
    explicit Application(Config config, ClockFn clock = system_clock_fn());
    ~Application();

    Application(const Application&) = delete;
    Application& operator=(const Application&) = delete;

    http::ApiResponse handle(http::ApiRequest request) { return gateway_->handle(std::move(request)); }

    gateway::Gateway& gateway() { return *gateway_; }
    identity::IdentityService& identity() { return *identity_; }
    delegation::DelegationService& delegation() { return *delegation_; }
    tasks::TaskStore& tasks() { return *tasks_; }
    machine::MachineRegistry& machines() { return machines_; }
    storage::StagingStore& staging() { return *staging_; }
    const Config& config() const { return config_; }

    nlohmann::ordered_json openapi_document() const;

private:
    void register_routes();
    void pump_wallclock_machines();

    Config config_;
    ClockFn clock_;
    std::unique_ptr<identity::IdentityService> identity_;
    std::unique_ptr<delegation::DelegationService> delegation_;
    std::unique_ptr<tasks::TaskStore> tasks_;
    machine::MachineRegistry machines_;
    std::unique_ptr<storage::StagingStore> staging_;
    std::unique_ptr<ThreadPool> pool_;

    std::unique_ptr<services::AuthService> auth_service_;
    std::unique_ptr<services::TasksService> tasks_service_;
    std::unique_ptr<services::ComputeService> compute_service_;
    std::unique_ptr<services::StorageService> storage_service_;
    std::unique_ptr<services::UtilitiesService> utilities_service_;
    std::unique_ptr<services::StatusService> status_service_;
    std::unique_ptr<gateway::Gateway> gateway_;

    std::atomic<bool> stop_pump_{false};
    std::thread pump_thread_;
};

}  // namespace firecrest
