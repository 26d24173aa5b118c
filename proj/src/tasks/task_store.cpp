#include "firecrest/tasks/task_store.hpp"

#include <algorithm>
#include <fstream>

#include "firecrest/util/crypto.hpp"
#include "firecrest/util/errors.hpp"

namespace firecrest::tasks {

TaskStore::TaskStore(ClockFn clock) : clock_(std::move(clock)) {}

Task TaskStore::create(const std::string& owner, const std::string& service,
                       const std::string& description) {
    Task t;
    t.task_id = crypto::random_token_id();
    t.hash_id = crypto::sha256_hex(t.task_id).substr(0, 16);
    t.owner = owner;
    t.service = service;
    t.description = description;
    t.status = TaskStatus::NEW;
    t.created_at = clock_();
    t.updated_at = t.created_at;

    std::lock_guard lock(mutex_);
    tasks_[t.task_id] = Entry{t, next_seq_++};
    return t;
}

Task TaskStore::update(const std::string& task_id, TaskStatus status, nlohmann::json data) {
    std::lock_guard lock(mutex_);
    auto it = tasks_.find(task_id);
    if (it == tasks_.end()) {
        throw ApiError(404, "task_not_found", "no such task");
    }
    Task& t = it->second.task;
    if (!transition_legal(t.status, status)) {
        throw ApiError(409, "illegal_transition",
                       std::string("illegal task transition ") + to_string(t.status) + " -> " +
                           to_string(status));
    }
    log_.push_back({task_id, t.status, status, clock_()});
    t.status = status;
    t.data = std::move(data);
    t.updated_at = std::max(clock_(), t.updated_at);  // monotonic per task
    return t;
}

Task TaskStore::get(const std::string& requester, const std::string& task_id) const {
    std::lock_guard lock(mutex_);
    auto it = tasks_.find(task_id);
    if (it == tasks_.end() || it->second.task.owner != requester) {
        throw ApiError(404, "task_not_found", "no such task");
    }
    return it->second.task;
}

std::vector<Task> TaskStore::list(const std::string& requester) const {
    std::lock_guard lock(mutex_);
    std::vector<const Entry*> mine;
    for (const auto& [id, entry] : tasks_) {
        if (entry.task.owner == requester) mine.push_back(&entry);
    }
    std::sort(mine.begin(), mine.end(),
              [](const Entry* a, const Entry* b) { return a->seq > b->seq; });
    std::vector<Task> out;
    out.reserve(mine.size());
    for (const Entry* e : mine) out.push_back(e->task);
    return out;
}

void TaskStore::remove(const std::string& requester, const std::string& task_id) {
    std::lock_guard lock(mutex_);
    auto it = tasks_.find(task_id);
    if (it == tasks_.end() || it->second.task.owner != requester) {
        throw ApiError(404, "task_not_found", "no such task");
    }
    tasks_.erase(it);
}

std::optional<Task> TaskStore::peek(const std::string& task_id) const {
    std::lock_guard lock(mutex_);
    auto it = tasks_.find(task_id);
    if (it == tasks_.end()) return std::nullopt;
    return it->second.task;
}

std::vector<Transition> TaskStore::transition_log() const {
    std::lock_guard lock(mutex_);
    return log_;
}

std::size_t TaskStore::size() const {
    std::lock_guard lock(mutex_);
    return tasks_.size();
}

void TaskStore::save_snapshot(const std::string& path) const {
    nlohmann::json j = nlohmann::json::array();
    {
        std::lock_guard lock(mutex_);
        std::vector<const Entry*> ordered;
        for (const auto& [id, entry] : tasks_) ordered.push_back(&entry);
        std::sort(ordered.begin(), ordered.end(),
                  [](const Entry* a, const Entry* b) { return a->seq < b->seq; });
        for (const Entry* e : ordered) j.push_back(e->task.to_json());
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write task snapshot: " + path);
    out << j.dump(2) << "\n";
}

void TaskStore::load_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) return;  // nothing persisted yet
    nlohmann::json j;
    in >> j;
    std::lock_guard lock(mutex_);
    for (const auto& e : j) {
        Task t = Task::from_json(e);
        tasks_[t.task_id] = Entry{t, next_seq_++};
    }
}

}  // namespace firecrest::tasks
