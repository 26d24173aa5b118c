#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "firecrest/config.hpp"
#include "firecrest/machine/sandbox_fs.hpp"
#include "firecrest/scheduler/sbatch_script.hpp"
#include "firecrest/util/clock.hpp"

namespace firecrest::scheduler {

enum class JobState { PENDING, RUNNING, COMPLETED, CANCELLED, FAILED };

const char* to_string(JobState s);
bool job_state_terminal(JobState s);

struct SimJob {
    std::int64_t job_id = 0;
    std::string owner;
    std::string name;
    std::string workdir;
    JobState state = JobState::PENDING;
    std::int64_t submit_time = 0;
    std::int64_t start_time = 0;
    std::int64_t end_time = 0;
    std::int64_t wall_time = 0;
    int exit_code = 0;

    nlohmann::json to_json() const;
};

// Virtual time source. Manual mode advances only through tick(); wallclock
// mode tracks the injected wall clock.
class VirtualClock {
public:
    enum class Mode { manual, wallclock };

    VirtualClock(Mode mode, ClockFn wall_source);
    std::int64_t now() const;
    void tick(std::int64_t dt);
    Mode mode() const { return mode_; }

private:
    Mode mode_;
    ClockFn wall_;
    std::int64_t manual_now_ = 0;
};

// Deterministic batch scheduler: FIFO dispatch into a fixed slot count,
// completion at start + wall_time, sacct-style accounting. "Execution"
// writes the script body plus a banner into the job's output file.
class SchedulerSim {
public:
    SchedulerSim(const MachineConfig& config, machine::SandboxFs& fs, ClockFn wall_source);

    // Returns the new job id; the caller formats the sbatch output line.
    std::int64_t submit(const std::string& owner, const ParsedScript& script,
                        const std::string& workdir, const std::string& default_name);

    void tick(std::int64_t dt);
    std::int64_t now() const;

    std::vector<SimJob> squeue(const std::string& owner,
                               std::optional<std::int64_t> job_id = std::nullopt);
    std::vector<SimJob> sacct(const std::string& owner);
    void scancel(const std::string& owner, std::int64_t job_id);
    std::optional<SimJob> find_job(std::int64_t job_id);

    // Invoked once with the terminal job, outside the scheduler lock.
    using CompletionCallback = std::function<void(const SimJob&)>;
    void on_completion(std::int64_t job_id, CompletionCallback cb);

    // Deterministic event log, one line per state change.
    std::vector<std::string> trace() const;

    bool ping() const;
    void set_available(bool v) { available_ = v; }
    VirtualClock::Mode clock_mode() const { return clock_.mode(); }

private:
    void advance_to_locked(std::int64_t target, std::vector<std::pair<CompletionCallback, SimJob>>& fired);
    void complete_locked(SimJob& job, std::int64_t at,
                         std::vector<std::pair<CompletionCallback, SimJob>>& fired);
    void record(const std::string& line) { trace_.push_back(line); }
    void run_fired(std::vector<std::pair<CompletionCallback, SimJob>>& fired);

    MachineConfig config_;
    machine::SandboxFs& fs_;
    VirtualClock clock_;
    mutable std::mutex mutex_;
    std::map<std::int64_t, SimJob> jobs_;
    std::map<std::int64_t, ParsedScript> scripts_;
    std::map<std::int64_t, CompletionCallback> callbacks_;
    std::vector<std::string> trace_;
    std::int64_t next_job_id_ = 1;
    std::int64_t cursor_ = 0;
    std::atomic<bool> available_{true};
};

}  // namespace firecrest::scheduler
