#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "firecrest/config.hpp"
#include "firecrest/delegation/delegation_service.hpp"
#include "firecrest/machine/sandbox_fs.hpp"
#include "firecrest/scheduler/scheduler_sim.hpp"

namespace firecrest::machine {

// Parses delegated command strings ("sbatch <path>", "squeue --json -u bob",
// "put <path>", ...) and maps them onto the sandbox filesystem and the
// scheduler, acting as the given principal.
class SandboxExecutor final : public delegation::CommandExecutor {
public:
    SandboxExecutor(SandboxFs& fs, scheduler::SchedulerSim& sched);

    delegation::ExecutionResult execute(const std::string& principal, const std::string& command,
                                        const std::string& input) override;

private:
    SandboxFs& fs_;
    scheduler::SchedulerSim& sched_;
};

// One simulated machine: its rooted filesystem, its batch scheduler, and the
// executor gluing delegated commands to both.
class Machine {
public:
    Machine(const MachineConfig& config, const std::filesystem::path& root,
            std::set<std::string> users, ClockFn wall_source);

    const std::string& name() const { return config_.name; }
    SandboxFs& fs() { return fs_; }
    scheduler::SchedulerSim& scheduler() { return sched_; }
    SandboxExecutor& executor() { return exec_; }
    const MachineConfig& config() const { return config_; }

private:
    MachineConfig config_;
    SandboxFs fs_;
    scheduler::SchedulerSim sched_;
    SandboxExecutor exec_;
};

class MachineRegistry {
public:
    void add(std::unique_ptr<Machine> machine);
    // Throws 400 unknown_machine.
    Machine& require(const std::string& name) const;
    std::vector<std::string> names() const;
    std::vector<Machine*> all() const;

private:
    std::vector<std::unique_ptr<Machine>> machines_;
};

}  // namespace firecrest::machine
