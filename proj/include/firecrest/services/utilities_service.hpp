#pragma once

#include "firecrest/config.hpp"
#include "firecrest/delegation/delegation_service.hpp"
#include "firecrest/http/types.hpp"
#include "firecrest/machine/machine.hpp"

namespace firecrest::services {

// Synchronous, timeout-bounded, non-recursive filesystem commands plus
// small-file transfer. Recursive removal lives in storage, not here.
class UtilitiesService {
public:
    UtilitiesService(delegation::DelegationService& delegation,
                     machine::MachineRegistry& machines, UtilitiesConfig config);

    http::ApiResponse ls(http::ApiRequest& req);
    http::ApiResponse file_type(http::ApiRequest& req);
    http::ApiResponse mkdir(http::ApiRequest& req);
    http::ApiResponse rename(http::ApiRequest& req);
    http::ApiResponse chmod(http::ApiRequest& req);
    http::ApiResponse chown(http::ApiRequest& req);
    http::ApiResponse symlink(http::ApiRequest& req);
    http::ApiResponse upload_small(http::ApiRequest& req);
    http::ApiResponse download_small(http::ApiRequest& req);

private:
    // Runs one delegated command, enforcing the blocking-call timeout.
    delegation::ExecutionResult run(const identity::Claims& claims, machine::Machine& m,
                                    const std::string& command, const std::string& input = {});

    delegation::DelegationService& delegation_;
    machine::MachineRegistry& machines_;
    UtilitiesConfig config_;
};

}  // namespace firecrest::services
