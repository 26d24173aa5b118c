#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace firecrest::tasks {

enum class TaskStatus { NEW, PROGRESS, WAITING_FOR_USER, SUCCESS, ERROR };

const char* to_string(TaskStatus s);
std::optional<TaskStatus> task_status_from_string(const std::string& s);

bool is_terminal(TaskStatus s);
bool transition_legal(TaskStatus from, TaskStatus to);

struct Task {
    std::string task_id;   // 128-bit random, URL-safe
    std::string hash_id;   // stable public identifier derived from task_id
    std::string owner;
    std::string service;
    TaskStatus status = TaskStatus::NEW;
    std::string description;
    nlohmann::json data = nlohmann::json::object();
    std::int64_t created_at = 0;
    std::int64_t updated_at = 0;

    nlohmann::json to_json() const;
    static Task from_json(const nlohmann::json& j);
};

}  // namespace firecrest::tasks
