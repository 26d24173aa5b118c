#include "firecrest/services/tasks_service.hpp"

namespace firecrest::services {

http::ApiResponse task_reference_response(const tasks::Task& task, int status) {
    return http::json_response(status, {{"task_id", task.task_id},
                                        {"task_url", "/tasks/" + task.task_id},
                                        {"status", tasks::to_string(task.status)}});
}

http::ApiResponse TasksService::list(http::ApiRequest& req) const {
    const auto& claims = req.require_claims();
    nlohmann::json out = nlohmann::json::array();
    for (const auto& t : store_.list(claims.username)) out.push_back(t.to_json());
    return http::json_response(200, {{"tasks", out}});
}

http::ApiResponse TasksService::get(http::ApiRequest& req) const {
    const auto& claims = req.require_claims();
    auto task = store_.get(claims.username, req.path_params.at("id"));
    return http::json_response(200, task.to_json());
}

}  // namespace firecrest::services
