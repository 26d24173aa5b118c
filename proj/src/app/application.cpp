#include "firecrest/app/application.hpp"

#include <chrono>
#include <filesystem>
#include <set>

#include "firecrest/gateway/openapi.hpp"

namespace firecrest {

using http::Route;
using http::RouteDoc;

Application::Application(Config config, ClockFn clock)
    : config_(std::move(config)), clock_(std::move(clock)) {
    identity_ = std::make_unique<identity::IdentityService>(config_.identity, clock_);
    delegation_ = std::make_unique<delegation::DelegationService>(config_.delegation, clock_);
    tasks_ = std::make_unique<tasks::TaskStore>(clock_);
    staging_ = std::make_unique<storage::StagingStore>(config_.storage.staging_secret, clock_);
    pool_ = std::make_unique<ThreadPool>(4);

    std::set<std::string> users;
    for (const auto& u : config_.identity.users) users.insert(u.username);
    std::filesystem::path state_dir(config_.state_dir);
    bool any_wallclock = false;
    for (const auto& mc : config_.machines) {
        auto root = state_dir / "machines" / mc.name;
        std::filesystem::create_directories(root);
        machines_.add(std::make_unique<machine::Machine>(mc, root, users, clock_));
        if (mc.clock == "wallclock") any_wallclock = true;
    }

    auth_service_ = std::make_unique<services::AuthService>(*identity_);
    tasks_service_ = std::make_unique<services::TasksService>(*tasks_);
    compute_service_ = std::make_unique<services::ComputeService>(
        *tasks_, *delegation_, machines_, *pool_, config_.utilities.small_file_cap_bytes);
    storage_service_ = std::make_unique<services::StorageService>(
        *tasks_, *delegation_, machines_, *staging_, *pool_, config_.storage, clock_);
    utilities_service_ = std::make_unique<services::UtilitiesService>(*delegation_, machines_,
                                                                      config_.utilities);
    status_service_ =
        std::make_unique<services::StatusService>(machines_, *staging_, clock_);
    gateway_ = std::make_unique<gateway::Gateway>(*identity_, clock_);
    register_routes();

    if (!config_.tasks.snapshot_file.empty()) {
        tasks_->load_snapshot(config_.tasks.snapshot_file);
    }
    if (any_wallclock) {
        pump_thread_ = std::thread([this] { pump_wallclock_machines(); });
    }
}

Application::~Application() {
    stop_pump_ = true;
    if (pump_thread_.joinable()) pump_thread_.join();
    pool_.reset();  // drain async pipelines before services go away
    if (!config_.tasks.snapshot_file.empty()) {
        try {
            tasks_->save_snapshot(config_.tasks.snapshot_file);
        } catch (const std::exception&) {
        }
    }
}

void Application::pump_wallclock_machines() {
    while (!stop_pump_.load()) {
        for (auto* m : machines_.all()) {
            if (m->scheduler().clock_mode() == scheduler::VirtualClock::Mode::wallclock) {
                m->scheduler().tick(0);  // advances to wallclock now
            }
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
}

nlohmann::ordered_json Application::openapi_document() const {
    return gateway::build_openapi_document(gateway_->routes());
}

void Application::register_routes() {
    auto& gw = *gateway_;
    RouteDoc::Param machine_header{"X-Machine-Name", "header", true, "target machine name"};
    RouteDoc::Param path_query{"path", "query", true, "sandbox-absolute path"};

    // --- unauthenticated surface -------------------------------------------
    gw.add_route({"GET", "/openapi.yaml", false,
                  [this](http::ApiRequest&) {
                      http::ApiResponse resp;
                      resp.body = gateway::to_yaml(openapi_document());
                      resp.content_type = "application/yaml";
                      return resp;
                  },
                  {"API description (YAML)", "gateway", {}, "", {{200, "OpenAPI document"}}}});
    gw.add_route({"GET", "/openapi.json", false,
                  [this](http::ApiRequest&) {
                      http::ApiResponse resp;
                      resp.body = openapi_document().dump(2);
                      return resp;
                  },
                  {"API description (JSON)", "gateway", {}, "", {{200, "OpenAPI document"}}}});
    gw.add_route({"POST", "/auth/token", false,
                  [this](http::ApiRequest& req) { return auth_service_->token(req); },
                  {"Obtain or refresh a token pair",
                   "identity",
                   {},
                   "application/x-www-form-urlencoded",
                   {{200, "token pair"}, {400, "bad grant"}, {401, "bad credentials"}}}});
    gw.add_route({"PUT", "/staging/{object_key...}", false,
                  [this](http::ApiRequest& req) { return storage_service_->staging_put(req); },
                  {"Upload an object through a signed temp URL",
                   "storage",
                   {{"temp_url_sig", "query", true, "HMAC-SHA256 signature, lowercase hex"},
                    {"temp_url_expires", "query", true, "unix expiry timestamp"},
                    {"object_key", "path", true, "staging object key"}},
                   "application/octet-stream",
                   {{201, "object stored"},
                    {401, "bad or expired signature"},
                    {405, "method mismatch"},
                    {413, "object too large"}}}});
    gw.add_route({"GET", "/staging/{object_key...}", false,
                  [this](http::ApiRequest& req) { return storage_service_->staging_get(req); },
                  {"Fetch an object through a signed temp URL",
                   "storage",
                   {{"temp_url_sig", "query", true, "HMAC-SHA256 signature, lowercase hex"},
                    {"temp_url_expires", "query", true, "unix expiry timestamp"},
                    {"object_key", "path", true, "staging object key"}},
                   "",
                   {{200, "object bytes"},
                    {401, "bad or expired signature"},
                    {404, "no such object"},
                    {405, "method mismatch"}}}});

    // --- compute -------------------------------------------------------------
    gw.add_route({"POST", "/jobs", true,
                  [this](http::ApiRequest& req) { return compute_service_->submit(req); },
                  {"Submit a batch job script",
                   "compute",
                   {machine_header},
                   "multipart/form-data",
                   {{201, "task reference"},
                    {400, "bad machine or missing file"},
                    {401, "unauthorized"},
                    {413, "script too large"}}}});
    gw.add_route({"GET", "/jobs", true,
                  [this](http::ApiRequest& req) { return compute_service_->list_jobs(req); },
                  {"List the user's active jobs",
                   "compute",
                   {machine_header},
                   "",
                   {{201, "task reference"}, {400, "bad machine"}, {401, "unauthorized"}}}});
    gw.add_route({"GET", "/jobs/acct", true,
                  [this](http::ApiRequest& req) { return compute_service_->accounting(req); },
                  {"Accounting records including terminal jobs",
                   "compute",
                   {machine_header},
                   "",
                   {{201, "task reference"}, {400, "bad machine"}, {401, "unauthorized"}}}});
    gw.add_route({"GET", "/jobs/{jobid}", true,
                  [this](http::ApiRequest& req) { return compute_service_->get_job(req); },
                  {"Query one job",
                   "compute",
                   {machine_header, {"jobid", "path", true, "scheduler job id"}},
                   "",
                   {{201, "task reference"}, {400, "bad machine"}, {401, "unauthorized"}}}});
    gw.add_route({"DELETE", "/jobs/{jobid}", true,
                  [this](http::ApiRequest& req) { return compute_service_->cancel_job(req); },
                  {"Cancel a job",
                   "compute",
                   {machine_header, {"jobid", "path", true, "scheduler job id"}},
                   "",
                   {{201, "task reference"}, {400, "bad machine"}, {401, "unauthorized"}}}});

    // --- storage ---------------------------------------------------------------
    gw.add_route({"POST", "/storage/xfer-external/upload", true,
                  [this](http::ApiRequest& req) { return storage_service_->request_upload(req); },
                  {"Start an external upload; answers with a temp PUT URL",
                   "storage",
                   {machine_header},
                   "application/json",
                   {{201, "task reference"},
                    {400, "bad path"},
                    {401, "unauthorized"},
                    {413, "size over cap"}}}});
    gw.add_route(
        {"POST", "/storage/xfer-external/upload-complete/{task_id}", true,
         [this](http::ApiRequest& req) { return storage_service_->complete_upload(req); },
         {"Move a staged object onto the machine filesystem",
          "storage",
          {machine_header, {"task_id", "path", true, "upload task id"}},
          "",
          {{200, "task reference"},
           {401, "unauthorized"},
           {404, "no such task"},
           {409, "object not staged yet"}}}});
    gw.add_route(
        {"GET", "/storage/xfer-external/download", true,
         [this](http::ApiRequest& req) { return storage_service_->request_download(req); },
         {"Stage a file and answer with a temp GET URL",
          "storage",
          {machine_header, {"source_path", "query", true, "file to download"}},
          "",
          {{201, "task reference"}, {400, "bad path"}, {401, "unauthorized"}}}});
    gw.add_route(
        {"POST", "/storage/xfer-external/{operation}", true,
         [this](http::ApiRequest& req) { return storage_service_->internal_transfer(req); },
         {"Schedule a recursive filesystem operation as a job",
          "storage",
          {machine_header, {"operation", "path", true, "rsync, mv or rm"}},
          "application/json",
          {{201, "task reference"}, {400, "bad operation or path"}, {401, "unauthorized"}}}});

    // --- utilities ---------------------------------------------------------------
    gw.add_route({"GET", "/utilities/ls", true,
                  [this](http::ApiRequest& req) { return utilities_service_->ls(req); },
                  {"List a directory",
                   "utilities",
                   {machine_header, path_query},
                   "",
                   {{200, "directory entries"},
                    {400, "bad path"},
                    {401, "unauthorized"},
                    {404, "no such path"},
                    {408, "timeout"}}}});
    gw.add_route({"GET", "/utilities/file", true,
                  [this](http::ApiRequest& req) { return utilities_service_->file_type(req); },
                  {"Classify a file",
                   "utilities",
                   {machine_header, path_query},
                   "",
                   {{200, "file type"},
                    {400, "bad path"},
                    {401, "unauthorized"},
                    {404, "no such path"},
                    {408, "timeout"}}}});
    gw.add_route({"POST", "/utilities/mkdir", true,
                  [this](http::ApiRequest& req) { return utilities_service_->mkdir(req); },
                  {"Create a directory",
                   "utilities",
                   {machine_header},
                   "application/json",
                   {{201, "created"},
                    {400, "bad path"},
                    {401, "unauthorized"},
                    {404, "missing parent"},
                    {408, "timeout"},
                    {409, "already exists"}}}});
    gw.add_route({"POST", "/utilities/rename", true,
                  [this](http::ApiRequest& req) { return utilities_service_->rename(req); },
                  {"Rename or move within the sandbox",
                   "utilities",
                   {machine_header},
                   "application/json",
                   {{200, "renamed"},
                    {400, "bad path"},
                    {401, "unauthorized"},
                    {404, "missing source"},
                    {408, "timeout"}}}});
    gw.add_route({"POST", "/utilities/chmod", true,
                  [this](http::ApiRequest& req) { return utilities_service_->chmod(req); },
                  {"Change permission bits",
                   "utilities",
                   {machine_header},
                   "application/json",
                   {{200, "changed"},
                    {400, "bad mode"},
                    {401, "unauthorized"},
                    {404, "no such path"},
                    {408, "timeout"}}}});
    gw.add_route({"POST", "/utilities/chown", true,
                  [this](http::ApiRequest& req) { return utilities_service_->chown(req); },
                  {"Change owner and/or group",
                   "utilities",
                   {machine_header},
                   "application/json",
                   {{200, "changed"},
                    {400, "bad owner"},
                    {401, "unauthorized"},
                    {404, "no such path"},
                    {408, "timeout"}}}});
    gw.add_route({"POST", "/utilities/symlink", true,
                  [this](http::ApiRequest& req) { return utilities_service_->symlink(req); },
                  {"Create a symbolic link",
                   "utilities",
                   {machine_header},
                   "application/json",
                   {{201, "created"},
                    {400, "bad path"},
                    {401, "unauthorized"},
                    {408, "timeout"},
                    {409, "link path exists"}}}});
    gw.add_route({"POST", "/utilities/upload", true,
                  [this](http::ApiRequest& req) { return utilities_service_->upload_small(req); },
                  {"Blocking small-file upload",
                   "utilities",
                   {machine_header},
                   "multipart/form-data",
                   {{201, "written"},
                    {400, "bad path"},
                    {401, "unauthorized"},
                    {408, "timeout"},
                    {413, "over the small-file cap"}}}});
    gw.add_route(
        {"GET", "/utilities/download", true,
         [this](http::ApiRequest& req) { return utilities_service_->download_small(req); },
         {"Blocking small-file download",
          "utilities",
          {machine_header, path_query},
          "",
          {{200, "file bytes"},
           {400, "bad path"},
           {401, "unauthorized"},
           {404, "no such file"},
           {408, "timeout"},
           {413, "over the small-file cap"}}}});

    // --- status ---------------------------------------------------------------
    gw.add_route({"GET", "/status/systems", true,
                  [this](http::ApiRequest& req) { return status_service_->systems(req); },
                  {"Availability of every configured system",
                   "status",
                   {},
                   "",
                   {{200, "system statuses"}, {401, "unauthorized"}}}});
    gw.add_route({"GET", "/status/services", true,
                  [this](http::ApiRequest& req) { return status_service_->services(req); },
                  {"Availability of every microservice",
                   "status",
                   {},
                   "",
                   {{200, "service statuses"}, {401, "unauthorized"}}}});

    // --- tasks ---------------------------------------------------------------
    gw.add_route({"GET", "/tasks", true,
                  [this](http::ApiRequest& req) { return tasks_service_->list(req); },
                  {"List the user's tasks, newest first",
                   "tasks",
                   {},
                   "",
                   {{200, "tasks"}, {401, "unauthorized"}}}});
    gw.add_route({"GET", "/tasks/{id}", true,
                  [this](http::ApiRequest& req) { return tasks_service_->get(req); },
                  {"Fetch one task",
                   "tasks",
                   {{"id", "path", true, "task id"}},
                   "",
                   {{200, "task"}, {401, "unauthorized"}, {404, "no such task"}}}});
}

}  // namespace firecrest
