#include "firecrest/scheduler/scheduler_sim.hpp"

#include <algorithm>
#include <sstream>

#include "firecrest/util/errors.hpp"

namespace firecrest::scheduler {

const char* to_string(JobState s) {
    switch (s) {
        case JobState::PENDING: return "PENDING";
        case JobState::RUNNING: return "RUNNING";
        case JobState::COMPLETED: return "COMPLETED";
        case JobState::CANCELLED: return "CANCELLED";
        case JobState::FAILED: return "FAILED";
    }
    return "UNKNOWN";
}

bool job_state_terminal(JobState s) {
    return s == JobState::COMPLETED || s == JobState::CANCELLED || s == JobState::FAILED;
}

nlohmann::json SimJob::to_json() const {
    return {{"job_id", job_id},     {"owner", owner},
            {"name", name},         {"workdir", workdir},
            {"state", to_string(state)}, {"submit_time", submit_time},
            {"start_time", start_time},  {"end_time", end_time},
            {"time_limit", wall_time},   {"exit_code", exit_code}};
}

VirtualClock::VirtualClock(Mode mode, ClockFn wall_source)
    : mode_(mode), wall_(std::move(wall_source)) {}

std::int64_t VirtualClock::now() const {
    return mode_ == Mode::manual ? manual_now_ : wall_();
}

void VirtualClock::tick(std::int64_t dt) {
    if (mode_ != Mode::manual) return;  // wallclock time moves by itself
    if (dt < 0) throw ApiError(400, "invalid_tick", "time never decreases");
    manual_now_ += dt;
}

SchedulerSim::SchedulerSim(const MachineConfig& config, machine::SandboxFs& fs,
                           ClockFn wall_source)
    : config_(config),
      fs_(fs),
      clock_(config.clock == "wallclock" ? VirtualClock::Mode::wallclock
                                         : VirtualClock::Mode::manual,
             std::move(wall_source)) {
    cursor_ = clock_.now();
}

std::int64_t SchedulerSim::now() const { return clock_.now(); }

std::int64_t SchedulerSim::submit(const std::string& owner, const ParsedScript& script,
                                  const std::string& workdir,
                                  const std::string& default_name) {
    std::vector<std::pair<CompletionCallback, SimJob>> fired;
    std::int64_t id;
    {
        std::lock_guard lock(mutex_);
        advance_to_locked(clock_.now(), fired);
        SimJob job;
        job.job_id = next_job_id_++;
        job.owner = owner;
        job.name = script.job_name.empty() ? default_name : script.job_name;
        job.workdir = workdir;
        job.state = JobState::PENDING;
        job.submit_time = clock_.now();
        job.wall_time = script.wall_time_seconds.value_or(config_.default_wall_time_seconds);
        id = job.job_id;
        jobs_[id] = job;
        scripts_[id] = script;
        record("t=" + std::to_string(job.submit_time) + " submit job=" + std::to_string(id) +
               " owner=" + owner + " wall=" + std::to_string(job.wall_time));
    }
    run_fired(fired);
    return id;
}

void SchedulerSim::complete_locked(SimJob& job, std::int64_t at,
                                   std::vector<std::pair<CompletionCallback, SimJob>>& fired) {
    job.end_time = at;
    const ParsedScript& script = scripts_[job.job_id];
    job.exit_code = script.body_exit_code.value_or(0);
    job.state = job.exit_code == 0 ? JobState::COMPLETED : JobState::FAILED;

    // The simulated run: the literal command body plus a banner lands in the
    // output file under the job's workdir.
    std::string out_name = script.output_path.value_or("slurm-" + std::to_string(job.job_id) +
                                                       ".out");
    std::string out_path = out_name.front() == '/' ? out_name : job.workdir + "/" + out_name;
    std::ostringstream content;
    content << "== job " << job.job_id << " (" << job.name << ") on " << config_.name << " ==\n"
            << script.body;
    try {
        fs_.write_file(job.owner, out_path, content.str(), false);
    } catch (const std::exception&) {
        job.state = JobState::FAILED;
        if (job.exit_code == 0) job.exit_code = 1;
    }
    record("t=" + std::to_string(at) + " " + to_string(job.state) +
           " job=" + std::to_string(job.job_id) + " exit=" + std::to_string(job.exit_code));
    auto cb = callbacks_.find(job.job_id);
    if (cb != callbacks_.end()) {
        fired.emplace_back(cb->second, job);
        callbacks_.erase(cb);
    }
}

void SchedulerSim::advance_to_locked(
    std::int64_t target, std::vector<std::pair<CompletionCallback, SimJob>>& fired) {
    // State changes only when time moves; a same-instant query observes the
    // state as of the last tick.
    if (target <= cursor_) return;
    while (true) {
        // Next completion among running jobs.
        SimJob* completing = nullptr;
        std::int64_t completion_at = 0;
        for (auto& [id, job] : jobs_) {
            if (job.state != JobState::RUNNING) continue;
            std::int64_t ends = job.start_time + job.wall_time;
            if (!completing || ends < completion_at) {
                completing = &job;
                completion_at = ends;
            }
        }
        // Next dispatch: FIFO by job_id when a slot is free.
        int running = 0;
        for (auto& [id, job] : jobs_) {
            if (job.state == JobState::RUNNING) ++running;
        }
        SimJob* dispatching = nullptr;
        std::int64_t dispatch_at = 0;
        if (running < config_.slots) {
            for (auto& [id, job] : jobs_) {
                if (job.state == JobState::PENDING) {
                    dispatching = &job;
                    dispatch_at = std::max(job.submit_time, cursor_);
                    break;
                }
            }
        }
        // Completions win ties so freed slots dispatch at the same instant.
        if (completing && completion_at <= target &&
            (!dispatching || completion_at <= dispatch_at)) {
            cursor_ = completion_at;
            complete_locked(*completing, completion_at, fired);
            continue;
        }
        if (dispatching && dispatch_at <= target) {
            cursor_ = dispatch_at;
            dispatching->state = JobState::RUNNING;
            dispatching->start_time = dispatch_at;
            record("t=" + std::to_string(dispatch_at) +
                   " RUNNING job=" + std::to_string(dispatching->job_id));
            continue;
        }
        break;
    }
    cursor_ = std::max(cursor_, target);
}

void SchedulerSim::run_fired(std::vector<std::pair<CompletionCallback, SimJob>>& fired) {
    for (auto& [cb, job] : fired) cb(job);
}

void SchedulerSim::tick(std::int64_t dt) {
    std::vector<std::pair<CompletionCallback, SimJob>> fired;
    {
        std::lock_guard lock(mutex_);
        clock_.tick(dt);
        advance_to_locked(clock_.now(), fired);
    }
    run_fired(fired);
}

std::vector<SimJob> SchedulerSim::squeue(const std::string& owner,
                                         std::optional<std::int64_t> job_id) {
    std::vector<std::pair<CompletionCallback, SimJob>> fired;
    std::vector<SimJob> out;
    {
        std::lock_guard lock(mutex_);
        advance_to_locked(clock_.now(), fired);
        for (const auto& [id, job] : jobs_) {
            if (job.owner != owner || job_state_terminal(job.state)) continue;
            if (job_id && id != *job_id) continue;
            out.push_back(job);
        }
    }
    run_fired(fired);
    return out;
}

std::vector<SimJob> SchedulerSim::sacct(const std::string& owner) {
    std::vector<std::pair<CompletionCallback, SimJob>> fired;
    std::vector<SimJob> out;
    {
        std::lock_guard lock(mutex_);
        advance_to_locked(clock_.now(), fired);
        for (const auto& [id, job] : jobs_) {
            if (job.owner == owner) out.push_back(job);  // map order = ascending job_id
        }
    }
    run_fired(fired);
    return out;
}

void SchedulerSim::scancel(const std::string& owner, std::int64_t job_id) {
    std::vector<std::pair<CompletionCallback, SimJob>> fired;
    {
        std::lock_guard lock(mutex_);
        advance_to_locked(clock_.now(), fired);
        auto it = jobs_.find(job_id);
        if (it == jobs_.end() || it->second.owner != owner) {
            run_fired(fired);
            throw ApiError(404, "job_not_found", "scancel: no such job for user");
        }
        SimJob& job = it->second;
        if (job_state_terminal(job.state)) {
            run_fired(fired);
            throw ApiError(409, "job_terminal", "scancel: job is already terminal");
        }
        std::int64_t at = clock_.now();
        if (job.state == JobState::PENDING) {
            job.start_time = at;  // never ran; start=end=cancel time
        }
        job.state = JobState::CANCELLED;
        job.end_time = at;
        record("t=" + std::to_string(at) + " CANCELLED job=" + std::to_string(job_id));
        auto cb = callbacks_.find(job_id);
        if (cb != callbacks_.end()) {
            fired.emplace_back(cb->second, job);
            callbacks_.erase(cb);
        }
    }
    run_fired(fired);
}

std::optional<SimJob> SchedulerSim::find_job(std::int64_t job_id) {
    std::vector<std::pair<CompletionCallback, SimJob>> fired;
    std::optional<SimJob> out;
    {
        std::lock_guard lock(mutex_);
        advance_to_locked(clock_.now(), fired);
        auto it = jobs_.find(job_id);
        if (it != jobs_.end()) out = it->second;
    }
    run_fired(fired);
    return out;
}

void SchedulerSim::on_completion(std::int64_t job_id, CompletionCallback cb) {
    std::optional<SimJob> already;
    {
        std::lock_guard lock(mutex_);
        auto it = jobs_.find(job_id);
        if (it != jobs_.end() && job_state_terminal(it->second.state)) {
            already = it->second;
        } else {
            callbacks_[job_id] = std::move(cb);
        }
    }
    if (already) cb(*already);
}

std::vector<std::string> SchedulerSim::trace() const {
    std::lock_guard lock(mutex_);
    return trace_;
}

bool SchedulerSim::ping() const { return available_.load(); }

}  // namespace firecrest::scheduler
