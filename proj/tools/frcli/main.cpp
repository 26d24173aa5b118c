#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <sys/stat.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "firecrest/util/clock.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitPollTimeout = 3;

// Access tokens are refreshed this many seconds before expiry.
constexpr std::int64_t kRefreshMarginSeconds = 30;

struct Session {
    std::string base_url;
    std::string client_id;
    std::string access_token;
    std::string refresh_token;
    std::int64_t access_expires_at = 0;

    json to_json() const {
        return {{"base_url", base_url},
                {"client_id", client_id},
                {"access_token", access_token},
                {"refresh_token", refresh_token},
                {"access_expires_at", access_expires_at}};
    }
};

std::string default_session_path() {
    if (const char* env = std::getenv("FRCLI_SESSION")) return env;
    std::string home = std::getenv("HOME") ? std::getenv("HOME") : ".";
    return home + "/.config/frcli/session.json";
}

void save_session(const std::string& path, const Session& s) {
    auto dir = path.substr(0, path.find_last_of('/'));
    if (dir != path) std::filesystem::create_directories(dir);
    // Write-then-rename keeps the previous session intact on failure.
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write session file: " + tmp);
        out << s.to_json().dump(2) << "\n";
    }
    ::chmod(tmp.c_str(), 0600);
    std::filesystem::rename(tmp, path);
}

std::optional<Session> load_session(const std::string& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    Session s;
    s.base_url = j.value("base_url", "");
    s.client_id = j.value("client_id", "");
    s.access_token = j.value("access_token", "");
    s.refresh_token = j.value("refresh_token", "");
    s.access_expires_at = j.value("access_expires_at", std::int64_t{0});
    return s;
}

struct CliError : std::runtime_error {
    explicit CliError(const std::string& msg, int code = kExitError)
        : std::runtime_error(msg), exit_code(code) {}
    int exit_code;
};

std::string describe_error(const httplib::Result& res) {
    if (!res) return "connection failed: " + httplib::to_string(res.error());
    json j = json::parse(res->body, nullptr, false);
    if (!j.is_discarded() && j.contains("message")) {
        return "server error " + std::to_string(res->status) + " [" +
               j.value("error_id", std::string("unknown")) + "]: " +
               j.value("message", std::string());
    }
    return "server error " + std::to_string(res->status);
}

class ApiClient {
public:
    ApiClient(std::string session_path, bool json_output)
        : session_path_(std::move(session_path)), json_output_(json_output) {}

    bool json_output() const { return json_output_; }

    void login(const std::string& url, const std::string& client_id,
               const std::string& client_secret, const std::string& username,
               const std::string& password) {
        httplib::Client http(url);
        httplib::Params params{{"grant_type", "password"},
                               {"client_id", client_id},
                               {"client_secret", client_secret},
                               {"username", username},
                               {"password", password}};
        auto res = http.Post("/auth/token", params);
        if (!res || res->status != 200) throw CliError(describe_error(res));
        adopt_pair(url, client_id, json::parse(res->body));
        save_session(session_path_, *session_);
    }

    json get(const std::string& path, const httplib::Headers& headers = {}) {
        auto res = client().Get(path, with_auth(headers));
        return expect_json(res);
    }

    json post_json(const std::string& path, const json& body,
                   const httplib::Headers& headers = {}) {
        auto res = client().Post(path, with_auth(headers), body.dump(), "application/json");
        return expect_json(res);
    }

    json post_multipart(const std::string& path, const httplib::MultipartFormDataItems& items,
                        const httplib::Headers& headers = {}) {
        auto res = client().Post(path, with_auth(headers), items);
        return expect_json(res);
    }

    json del(const std::string& path, const httplib::Headers& headers = {}) {
        auto res = client().Delete(path, with_auth(headers));
        return expect_json(res);
    }

    // Unauthenticated raw transfers for temp URLs.
    void put_raw(const std::string& url_path, const std::string& bytes) {
        auto res = client().Put(url_path, bytes, "application/octet-stream");
        if (!res || res->status / 100 != 2) throw CliError(describe_error(res));
    }
    std::string get_raw(const std::string& url_path) {
        auto res = client().Get(url_path);
        if (!res || res->status != 200) throw CliError(describe_error(res));
        return res->body;
    }
    std::string get_bytes_authed(const std::string& path, const httplib::Headers& headers) {
        auto res = client().Get(path, with_auth(headers));
        if (!res) throw CliError(describe_error(res));
        if (res->status / 100 != 2) throw CliError(describe_error(res));
        return res->body;
    }

    // Polls until the task is terminal (or waiting_ok and WAITING_FOR_USER).
    json poll_task(const std::string& task_id, double interval_s, double timeout_s,
                   bool waiting_ok = false) {
        auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(timeout_s);
        double backoff = 0.025;  // exponential backoff capped at the interval
        while (true) {
            json task = get("/tasks/" + task_id);
            std::string status = task.value("status", "");
            if (status == "SUCCESS" || status == "ERROR") return task;
            if (waiting_ok && status == "WAITING_FOR_USER") return task;
            if (std::chrono::steady_clock::now() >= deadline) {
                throw CliError("timed out waiting for task " + task_id, kExitPollTimeout);
            }
            std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
            backoff = std::min(backoff * 2, interval_s);
        }
    }

private:
    httplib::Client& client() {
        if (!http_) {
            if (!session_) session_ = load_session(session_path_);
            if (!session_ || session_->base_url.empty()) {
                throw CliError("no session; run: frcli login");
            }
            http_ = std::make_unique<httplib::Client>(session_->base_url);
            http_->set_read_timeout(30, 0);
        }
        return *http_;
    }

    httplib::Headers with_auth(httplib::Headers headers) {
        ensure_fresh();
        headers.emplace("Authorization", "Bearer " + session_->access_token);
        return headers;
    }

    void ensure_fresh() {
        client();
        if (firecrest::system_unix_now() <
            session_->access_expires_at - kRefreshMarginSeconds) {
            return;
        }
        httplib::Params params{{"grant_type", "refresh_token"},
                               {"refresh_token", session_->refresh_token}};
        auto res = http_->Post("/auth/token", params);
        if (!res || res->status != 200) {
            throw CliError("session expired and refresh failed; run: frcli login");
        }
        adopt_pair(session_->base_url, session_->client_id, json::parse(res->body));
        save_session(session_path_, *session_);
    }

    void adopt_pair(const std::string& url, const std::string& client_id, const json& body) {
        Session s;
        s.base_url = url;
        s.client_id = client_id;
        s.access_token = body.at("access_token").get<std::string>();
        s.refresh_token = body.at("refresh_token").get<std::string>();
        s.access_expires_at =
            firecrest::system_unix_now() + body.value("expires_in", std::int64_t{0});
        session_ = s;
    }

    json expect_json(const httplib::Result& res) {
        if (!res || res->status / 100 != 2) throw CliError(describe_error(res));
        json j = json::parse(res->body, nullptr, false);
        return j.is_discarded() ? json{{"body", res->body}} : j;
    }

    std::string session_path_;
    bool json_output_;
    std::optional<Session> session_;
    std::unique_ptr<httplib::Client> http_;
};

httplib::Headers machine_header(const std::string& machine) {
    return {{"X-Machine-Name", machine}};
}

std::string read_local_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError("cannot read local file: " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_local_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CliError("cannot write local file: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string basename_of(const std::string& path) {
    auto pos = path.find_last_of('/');
    return pos == std::string::npos ? path : path.substr(pos + 1);
}

void print_jobs_table(const json& jobs) {
    std::printf("%-8s %-16s %-10s %8s %8s %8s\n", "JOBID", "NAME", "STATE", "SUBMIT", "START",
                "END");
    for (const auto& j : jobs) {
        std::printf("%-8lld %-16s %-10s %8lld %8lld %8lld\n",
                    static_cast<long long>(j.value("job_id", std::int64_t{0})),
                    j.value("name", "").c_str(), j.value("state", "").c_str(),
                    static_cast<long long>(j.value("submit_time", std::int64_t{0})),
                    static_cast<long long>(j.value("start_time", std::int64_t{0})),
                    static_cast<long long>(j.value("end_time", std::int64_t{0})));
    }
}

// Task terminal handling shared by every task-wrapped subcommand: prints the
// payload and maps SUCCESS/ERROR onto the exit code.
int finish_task(ApiClient& api, const json& task, const std::string& data_key = "") {
    if (task.value("status", "") == "ERROR") {
        std::fprintf(stderr, "task failed: %s\n", task.value("data", json::object()).dump().c_str());
        return kExitError;
    }
    json data = task.value("data", json::object());
    if (api.json_output()) {
        std::printf("%s\n", task.dump(2).c_str());
    } else if (!data_key.empty() && data.contains(data_key)) {
        if (data_key == "jobs") {
            print_jobs_table(data["jobs"]);
        } else {
            std::printf("%s\n", data[data_key].dump(2).c_str());
        }
    } else {
        std::printf("%s\n", data.dump(2).c_str());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"frcli: command-line client for the HPC REST gateway"};
    app.require_subcommand(1);

    std::string session_path = default_session_path();
    bool json_output = false;
    double interval = 1.0;
    double timeout = 60.0;
    app.add_option("--session", session_path, "session file path")->envname("FRCLI_SESSION");
    app.add_flag("--json", json_output, "machine-readable JSON output");
    app.add_option("--interval", interval, "task poll interval cap, seconds");
    app.add_option("--timeout", timeout, "task poll timeout, seconds");

    // login
    auto* login = app.add_subcommand("login", "obtain a token pair and persist the session");
    std::string url, client_id = "frcli", client_secret, username, password;
    login->add_option("--url", url, "service base URL")->envname("FRCLI_URL")->required();
    login->add_option("--client-id", client_id)->envname("FRCLI_CLIENT_ID");
    login->add_option("--client-secret", client_secret)->envname("FRCLI_CLIENT_SECRET")->required();
    login->add_option("--username", username)->required();
    login->add_option("--password", password)->envname("FRCLI_PASSWORD")->required();

    std::string machine;
    auto add_machine = [&machine](CLI::App* cmd) {
        cmd->add_option("--machine", machine, "target machine")->required();
    };

    // job-submit
    auto* job_submit = app.add_subcommand("job-submit", "submit an sbatch script");
    std::string script_path;
    bool wait = false;
    job_submit->add_option("script", script_path, "sbatch script file")->required();
    add_machine(job_submit);
    job_submit->add_flag("--wait", wait, "poll the task until terminal");

    auto* jobs_list = app.add_subcommand("jobs-list", "list active jobs");
    add_machine(jobs_list);
    auto* job_acct = app.add_subcommand("job-acct", "accounting records");
    add_machine(job_acct);
    auto* job_cancel = app.add_subcommand("job-cancel", "cancel a job");
    std::string jobid;
    job_cancel->add_option("jobid", jobid)->required();
    add_machine(job_cancel);

    // transfers
    auto* tr_up = app.add_subcommand("transfer-upload", "staged external upload");
    std::string local_path, remote_path;
    std::uint64_t max_size = 5ull * 1024 * 1024 * 1024;
    tr_up->add_option("local", local_path)->required();
    tr_up->add_option("remote_dir", remote_path)->required();
    tr_up->add_option("--max-size", max_size, "client-side size cap, bytes");
    add_machine(tr_up);

    auto* tr_down = app.add_subcommand("transfer-download", "staged external download");
    std::string output_path;
    tr_down->add_option("remote", remote_path)->required();
    tr_down->add_option("-o,--output", output_path, "local output file");
    add_machine(tr_down);

    auto* xfer = app.add_subcommand("xfer", "scheduled filesystem operation");
    xfer->require_subcommand(1);
    std::string xfer_src, xfer_dst;
    auto* xfer_rsync = xfer->add_subcommand("rsync", "recursive copy");
    xfer_rsync->add_option("source", xfer_src)->required();
    xfer_rsync->add_option("target", xfer_dst)->required();
    add_machine(xfer_rsync);
    auto* xfer_mv = xfer->add_subcommand("mv", "move");
    xfer_mv->add_option("source", xfer_src)->required();
    xfer_mv->add_option("target", xfer_dst)->required();
    add_machine(xfer_mv);
    auto* xfer_rm = xfer->add_subcommand("rm", "recursive removal");
    xfer_rm->add_option("target", xfer_dst)->required();
    add_machine(xfer_rm);

    // utilities
    auto* util = app.add_subcommand("util", "synchronous filesystem commands");
    util->require_subcommand(1);
    std::string u_path, u_src, u_dst, u_mode, u_owner, u_group, u_target, u_link;
    bool parents = false;
    auto* u_ls = util->add_subcommand("ls", "list directory");
    u_ls->add_option("path", u_path)->required();
    add_machine(u_ls);
    auto* u_file = util->add_subcommand("file", "classify file");
    u_file->add_option("path", u_path)->required();
    add_machine(u_file);
    auto* u_mkdir = util->add_subcommand("mkdir", "create directory");
    u_mkdir->add_option("path", u_path)->required();
    u_mkdir->add_flag("-p,--parents", parents);
    add_machine(u_mkdir);
    auto* u_rename = util->add_subcommand("rename", "rename/move");
    u_rename->add_option("source", u_src)->required();
    u_rename->add_option("target", u_dst)->required();
    add_machine(u_rename);
    auto* u_chmod = util->add_subcommand("chmod", "change permissions");
    u_chmod->add_option("mode", u_mode)->required();
    u_chmod->add_option("path", u_path)->required();
    add_machine(u_chmod);
    auto* u_chown = util->add_subcommand("chown", "change owner/group");
    u_chown->add_option("path", u_path)->required();
    u_chown->add_option("--owner", u_owner);
    u_chown->add_option("--group", u_group);
    add_machine(u_chown);
    auto* u_symlink = util->add_subcommand("symlink", "create symlink");
    u_symlink->add_option("target", u_target)->required();
    u_symlink->add_option("link_path", u_link)->required();
    add_machine(u_symlink);
    auto* u_upload = util->add_subcommand("upload", "small-file upload");
    u_upload->add_option("local", local_path)->required();
    u_upload->add_option("remote_dir", remote_path)->required();
    add_machine(u_upload);
    auto* u_download = util->add_subcommand("download", "small-file download");
    u_download->add_option("remote", remote_path)->required();
    u_download->add_option("-o,--output", output_path);
    add_machine(u_download);

    // status + tasks
    auto* status = app.add_subcommand("status", "availability reporting");
    status->require_subcommand(1);
    auto* status_systems = status->add_subcommand("systems", "system availability");
    auto* status_services = status->add_subcommand("services", "microservice availability");
    auto* tasks_cmd = app.add_subcommand("tasks", "task resources");
    tasks_cmd->require_subcommand(1);
    auto* tasks_list = tasks_cmd->add_subcommand("list", "list own tasks");
    std::string task_id_arg;
    auto* tasks_get = tasks_cmd->add_subcommand("get", "fetch one task");
    tasks_get->add_option("id", task_id_arg)->required();
    auto* task_poll = app.add_subcommand("task-poll", "poll a task until terminal");
    task_poll->add_option("id", task_id_arg)->required();

    CLI11_PARSE(app, argc, argv);

    ApiClient api(session_path, json_output);
    auto poll_ref = [&](const json& ref, bool waiting_ok = false) {
        return api.poll_task(ref.at("task_id").get<std::string>(), interval, timeout,
                             waiting_ok);
    };

    try {
        if (*login) {
            api.login(url, client_id, client_secret, username, password);
            std::printf("logged in as %s\n", username.c_str());
            return kExitOk;
        }
        if (*job_submit) {
            auto ref = api.post_multipart(
                "/jobs",
                {{"file", read_local_file(script_path), basename_of(script_path),
                  "application/octet-stream"}},
                machine_header(machine));
            if (!wait) {
                std::printf("%s\n", ref.at("task_id").get<std::string>().c_str());
                return kExitOk;
            }
            json task = poll_ref(ref);
            if (task.value("status", "") == "SUCCESS") {
                std::printf("%lld\n", static_cast<long long>(
                                          task["data"].value("job_id", std::int64_t{0})));
                return kExitOk;
            }
            std::fprintf(stderr, "submission failed: %s\n", task["data"].dump().c_str());
            return kExitError;
        }
        if (*jobs_list) return finish_task(api, poll_ref(api.get("/jobs", machine_header(machine))), "jobs");
        if (*job_acct) {
            return finish_task(api, poll_ref(api.get("/jobs/acct", machine_header(machine))),
                               "jobs");
        }
        if (*job_cancel) {
            return finish_task(api,
                               poll_ref(api.del("/jobs/" + jobid, machine_header(machine))));
        }
        if (*tr_up) {
            auto bytes = read_local_file(local_path);
            if (bytes.size() > max_size) {
                // Refuse before contacting the server.
                throw CliError("file exceeds the transfer cap (" + std::to_string(max_size) +
                               " bytes)");
            }
            std::string filename = basename_of(local_path);
            auto ref = api.post_json("/storage/xfer-external/upload",
                                     {{"target_path", remote_path},
                                      {"filename", filename},
                                      {"size", bytes.size()}},
                                     machine_header(machine));
            json task = poll_ref(ref, /*waiting_ok=*/true);
            if (task.value("status", "") != "WAITING_FOR_USER") {
                throw CliError("upload task did not reach WAITING_FOR_USER: " + task.dump());
            }
            api.put_raw(task["data"].at("upload_url").get<std::string>(), bytes);
            auto ref2 = api.post_json("/storage/xfer-external/upload-complete/" +
                                          task.at("task_id").get<std::string>(),
                                      json::object(), machine_header(machine));
            return finish_task(api, poll_ref(ref2));
        }
        if (*tr_down) {
            auto ref = api.get("/storage/xfer-external/download?source_path=" + remote_path,
                               machine_header(machine));
            json task = poll_ref(ref);
            if (task.value("status", "") != "SUCCESS") {
                std::fprintf(stderr, "download failed: %s\n", task["data"].dump().c_str());
                return kExitError;
            }
            auto bytes = api.get_raw(task["data"].at("download_url").get<std::string>());
            std::string out = output_path.empty() ? basename_of(remote_path) : output_path;
            write_local_file(out, bytes);
            std::printf("%s (%zu bytes)\n", out.c_str(), bytes.size());
            return kExitOk;
        }
        if (*xfer_rsync || *xfer_mv || *xfer_rm) {
            std::string op = *xfer_rsync ? "rsync" : (*xfer_mv ? "mv" : "rm");
            json body = {{"target_path", xfer_dst}};
            if (!*xfer_rm) body["source_path"] = xfer_src;
            auto ref = api.post_json("/storage/xfer-external/" + op, body,
                                     machine_header(machine));
            return finish_task(api, poll_ref(ref));
        }
        if (*u_ls) {
            auto out = api.get("/utilities/ls?path=" + u_path, machine_header(machine));
            if (json_output) {
                std::printf("%s\n", out.dump(2).c_str());
            } else {
                for (const auto& e : out["entries"]) {
                    std::printf("%-10s %-9s %-8s %-8s %10llu  %s%s\n", e.value("type", "").c_str(),
                                e.value("permissions", "").c_str(), e.value("owner", "").c_str(),
                                e.value("group", "").c_str(),
                                static_cast<unsigned long long>(
                                    e.value("size", std::uint64_t{0})),
                                e.value("name", "").c_str(),
                                e.contains("link_target")
                                    ? (" -> " + e["link_target"].get<std::string>()).c_str()
                                    : "");
                }
            }
            return kExitOk;
        }
        if (*u_file) {
            auto out = api.get("/utilities/file?path=" + u_path, machine_header(machine));
            std::printf("%s\n", json_output ? out.dump(2).c_str()
                                            : out.value("type", "").c_str());
            return kExitOk;
        }
        if (*u_mkdir) {
            api.post_json("/utilities/mkdir", {{"path", u_path}, {"parents", parents}},
                          machine_header(machine));
            return kExitOk;
        }
        if (*u_rename) {
            api.post_json("/utilities/rename", {{"source", u_src}, {"target", u_dst}},
                          machine_header(machine));
            return kExitOk;
        }
        if (*u_chmod) {
            api.post_json("/utilities/chmod", {{"mode", u_mode}, {"path", u_path}},
                          machine_header(machine));
            return kExitOk;
        }
        if (*u_chown) {
            json body = {{"path", u_path}};
            if (!u_owner.empty()) body["owner"] = u_owner;
            if (!u_group.empty()) body["group"] = u_group;
            api.post_json("/utilities/chown", body, machine_header(machine));
            return kExitOk;
        }
        if (*u_symlink) {
            api.post_json("/utilities/symlink", {{"target", u_target}, {"link_path", u_link}},
                          machine_header(machine));
            return kExitOk;
        }
        if (*u_upload) {
            auto bytes = read_local_file(local_path);
            api.post_multipart("/utilities/upload",
                               {{"file", bytes, basename_of(local_path),
                                 "application/octet-stream"},
                                {"path", remote_path, "", ""}},
                               machine_header(machine));
            return kExitOk;
        }
        if (*u_download) {
            auto bytes = api.get_bytes_authed("/utilities/download?path=" + remote_path,
                                              machine_header(machine));
            if (output_path.empty()) {
                std::fwrite(bytes.data(), 1, bytes.size(), stdout);
            } else {
                write_local_file(output_path, bytes);
            }
            return kExitOk;
        }
        if (*status_systems) {
            auto out = api.get("/status/systems");
            if (json_output) {
                std::printf("%s\n", out.dump(2).c_str());
            } else {
                for (const auto& s : out["systems"]) {
                    std::printf("%-16s %-12s %s\n", s.value("system", "").c_str(),
                                s.value("status", "").c_str(),
                                s.value("description", "").c_str());
                }
            }
            return kExitOk;
        }
        if (*status_services) {
            auto out = api.get("/status/services");
            if (json_output) {
                std::printf("%s\n", out.dump(2).c_str());
            } else {
                for (const auto& s : out["services"]) {
                    std::printf("%-12s %-12s %-12s %s\n", s.value("name", "").c_str(),
                                s.value("status", "").c_str(), s.value("endpoint", "").c_str(),
                                s.value("description", "").c_str());
                }
            }
            return kExitOk;
        }
        if (*tasks_list) {
            auto out = api.get("/tasks");
            if (json_output) {
                std::printf("%s\n", out.dump(2).c_str());
            } else {
                for (const auto& t : out["tasks"]) {
                    std::printf("%-24s %-18s %-10s %s\n", t.value("task_id", "").c_str(),
                                t.value("status", "").c_str(), t.value("service", "").c_str(),
                                t.value("description", "").c_str());
                }
            }
            return kExitOk;
        }
        if (*tasks_get) {
            std::printf("%s\n", api.get("/tasks/" + task_id_arg).dump(2).c_str());
            return kExitOk;
        }
        if (*task_poll) {
            json task = api.poll_task(task_id_arg, interval, timeout);
            std::printf("%s\n", task.dump(2).c_str());
            return task.value("status", "") == "SUCCESS" ? kExitOk : kExitError;
        }
    } catch (const CliError& e) {
        std::fprintf(stderr, "frcli: %s\n", e.what());
        return e.exit_code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "frcli: %s\n", e.what());
        return kExitError;
    }
    return kExitError;
}
