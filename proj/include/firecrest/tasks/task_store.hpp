#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "firecrest/tasks/task.hpp"
#include "firecrest/util/clock.hpp"

namespace firecrest::tasks {

struct Transition {
    std::string task_id;
    TaskStatus from;
    TaskStatus to;
    std::int64_t at;
};

// In-memory task store with per-task atomic read-modify-write. The append-only
// transition log doubles as the state-machine soundness oracle in tests.
class TaskStore {
public:
    explicit TaskStore(ClockFn clock);

    Task create(const std::string& owner, const std::string& service,
                const std::string& description);

    // Internal update; throws on unknown id or illegal transition.
    Task update(const std::string& task_id, TaskStatus status, nlohmann::json data);

    // Owner-scoped reads. Foreign or unknown ids yield 404 uniformly so
    // existence is not leaked.
    Task get(const std::string& requester, const std::string& task_id) const;
    std::vector<Task> list(const std::string& requester) const;  // newest first
    void remove(const std::string& requester, const std::string& task_id);

    // Unscoped lookup for microservice-internal pipelines.
    std::optional<Task> peek(const std::string& task_id) const;

    std::vector<Transition> transition_log() const;
    std::size_t size() const;

    void save_snapshot(const std::string& path) const;
    void load_snapshot(const std::string& path);

private:
    struct Entry {
        Task task;
        std::uint64_t seq = 0;  // creation order, newest-first tiebreak
    };

    ClockFn clock_;
    mutable std::mutex mutex_;
    std::map<std::string, Entry> tasks_;
    std::vector<Transition> log_;
    std::uint64_t next_seq_ = 0;
};

}  // namespace firecrest::tasks
