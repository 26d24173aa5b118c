#include "firecrest/tasks/task.hpp"

#include "firecrest/util/clock.hpp"
#include "firecrest/util/crypto.hpp"

namespace firecrest::tasks {

const char* to_string(TaskStatus s) {
    switch (s) {
        case TaskStatus::NEW: return "NEW";
        case TaskStatus::PROGRESS: return "PROGRESS";
        case TaskStatus::WAITING_FOR_USER: return "WAITING_FOR_USER";
        case TaskStatus::SUCCESS: return "SUCCESS";
        case TaskStatus::ERROR: return "ERROR";
    }
    return "UNKNOWN";
}

std::optional<TaskStatus> task_status_from_string(const std::string& s) {
    if (s == "NEW") return TaskStatus::NEW;
    if (s == "PROGRESS") return TaskStatus::PROGRESS;
    if (s == "WAITING_FOR_USER") return TaskStatus::WAITING_FOR_USER;
    if (s == "SUCCESS") return TaskStatus::SUCCESS;
    if (s == "ERROR") return TaskStatus::ERROR;
    return std::nullopt;
}

bool is_terminal(TaskStatus s) { return s == TaskStatus::SUCCESS || s == TaskStatus::ERROR; }

bool transition_legal(TaskStatus from, TaskStatus to) {
    switch (from) {
        case TaskStatus::NEW:
            return to == TaskStatus::PROGRESS || to == TaskStatus::ERROR;
        case TaskStatus::PROGRESS:
            return to == TaskStatus::PROGRESS || to == TaskStatus::WAITING_FOR_USER ||
                   to == TaskStatus::SUCCESS || to == TaskStatus::ERROR;
        case TaskStatus::WAITING_FOR_USER:
            return to == TaskStatus::PROGRESS || to == TaskStatus::ERROR;
        case TaskStatus::SUCCESS:
        case TaskStatus::ERROR:
            return false;
    }
    return false;
}

nlohmann::json Task::to_json() const {
    return {{"task_id", task_id},
            {"hash_id", hash_id},
            {"owner", owner},
            {"service", service},
            {"status", to_string(status)},
            {"description", description},
            {"data", data},
            {"created_at", iso8601_utc(created_at)},
            {"updated_at", iso8601_utc(updated_at)},
            {"created_at_unix", created_at},
            {"updated_at_unix", updated_at}};
}

Task Task::from_json(const nlohmann::json& j) {
    Task t;
    t.task_id = j.at("task_id").get<std::string>();
    t.hash_id = j.at("hash_id").get<std::string>();
    t.owner = j.at("owner").get<std::string>();
    t.service = j.at("service").get<std::string>();
    t.status = task_status_from_string(j.at("status").get<std::string>()).value();
    t.description = j.at("description").get<std::string>();
    t.data = j.at("data");
    t.created_at = j.at("created_at_unix").get<std::int64_t>();
    t.updated_at = j.at("updated_at_unix").get<std::int64_t>();
    return t;
}

}  // namespace firecrest::tasks
