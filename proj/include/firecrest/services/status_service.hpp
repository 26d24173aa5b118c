#pragma once

#include "firecrest/http/types.hpp"
#include "firecrest/machine/machine.hpp"
#include "firecrest/storage/staging_store.hpp"
#include "firecrest/util/clock.hpp"

namespace firecrest::services {

// Read-only availability reporting. Probes run concurrently with per-target
// timeouts so one dead backend cannot stall the listing.
class StatusService {
public:
    StatusService(machine::MachineRegistry& machines, storage::StagingStore& staging,
                  ClockFn clock, std::int64_t probe_timeout_ms = 1000);

    http::ApiResponse systems(http::ApiRequest& req);
    http::ApiResponse services(http::ApiRequest& req);

private:
    machine::MachineRegistry& machines_;
    storage::StagingStore& staging_;
    ClockFn clock_;
    std::int64_t probe_timeout_ms_;
};

}  // namespace firecrest::services
