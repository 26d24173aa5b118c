#include "firecrest/services/status_service.hpp"

#include <chrono>
#include <future>
#include <vector>

namespace firecrest::services {

namespace {

const char* verdict(int healthy, int total) {
    if (healthy == total) return "available";
    if (healthy == 0) return "unavailable";
    return "degraded";
}

}  // namespace

StatusService::StatusService(machine::MachineRegistry& machines,
                             storage::StagingStore& staging, ClockFn clock,
                             std::int64_t probe_timeout_ms)
    : machines_(machines), staging_(staging), clock_(std::move(clock)),
      probe_timeout_ms_(probe_timeout_ms) {}

http::ApiResponse StatusService::systems(http::ApiRequest& req) {
    (void)req;
    auto machines = machines_.all();
    struct Probe {
        std::future<bool> fs;
        std::future<bool> sched;
    };
    std::vector<Probe> probes;
    probes.reserve(machines.size());
    for (auto* m : machines) {
        Probe p;
        p.fs = std::async(std::launch::async, [m] { return m->fs().ping(); });
        p.sched = std::async(std::launch::async, [m] { return m->scheduler().ping(); });
        probes.push_back(std::move(p));
    }
    auto harvest = [&](std::future<bool>& f) {
        if (f.wait_for(std::chrono::milliseconds(probe_timeout_ms_)) !=
            std::future_status::ready) {
            return false;
        }
        return f.get();
    };
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t i = 0; i < machines.size(); ++i) {
        bool fs_ok = harvest(probes[i].fs);
        bool sched_ok = harvest(probes[i].sched);
        int healthy = (fs_ok ? 1 : 0) + (sched_ok ? 1 : 0);
        std::string description = "filesystem " + std::string(fs_ok ? "ok" : "down") +
                                  ", scheduler " + std::string(sched_ok ? "ok" : "down");
        out.push_back({{"system", machines[i]->name()},
                       {"status", verdict(healthy, 2)},
                       {"description", description},
                       {"checked_at", iso8601_utc(clock_())}});
    }
    return http::json_response(200, {{"systems", out}});
}

http::ApiResponse StatusService::services(http::ApiRequest& req) {
    (void)req;
    auto machines = machines_.all();
    int sched_ok = 0;
    int fs_ok = 0;
    for (auto* m : machines) {
        if (m->scheduler().ping()) ++sched_ok;
        if (m->fs().ping()) ++fs_ok;
    }
    int total = static_cast<int>(machines.size());
    bool staging_ok = staging_.ping();

    nlohmann::json out = nlohmann::json::array();
    auto add = [&](const std::string& name, const std::string& description,
                   const std::string& status, const std::string& endpoint) {
        out.push_back({{"name", name},
                       {"description", description},
                       {"status", status},
                       {"endpoint", endpoint}});
    };
    add("compute", "batch job management", verdict(sched_ok, total), "/jobs");
    add("storage", "external and internal data transfer",
        staging_ok ? "available" : "unavailable", "/storage");
    add("utilities", "synchronous filesystem commands", verdict(fs_ok, total), "/utilities");
    add("tasks", "asynchronous task tracking", "available", "/tasks");
    add("status", "service and system availability", "available", "/status");
    return http::json_response(200, {{"services", out}});
}

}  // namespace firecrest::services
