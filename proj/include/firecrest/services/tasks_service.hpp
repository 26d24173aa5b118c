#pragma once

#include "firecrest/http/types.hpp"
#include "firecrest/tasks/task_store.hpp"

namespace firecrest::services {

// User-facing task reads. Creation, update and deletion stay on the internal
// dispatch path and are deliberately absent from the route table.
class TasksService {
public:
    explicit TasksService(tasks::TaskStore& store) : store_(store) {}

    http::ApiResponse list(http::ApiRequest& req) const;
    http::ApiResponse get(http::ApiRequest& req) const;

private:
    tasks::TaskStore& store_;
};

// Standard 201 envelope for every endpoint that answers with a task handle.
http::ApiResponse task_reference_response(const tasks::Task& task, int status = 201);

}  // namespace firecrest::services
