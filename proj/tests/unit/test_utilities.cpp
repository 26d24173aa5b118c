#include <doctest.h>

#include <chrono>

#include "support/harness.hpp"

using namespace firecrest;
using namespace test_support;

namespace {

struct UtilFixture {
    TestApp app;
    std::string token = app.token_for("alice");

    http::ApiResponse get(const std::string& path, const std::string& sandbox_path) {
        return app.app().handle(
            Req("GET", path).bearer(token).machine("daint-sim").query("path", sandbox_path));
    }
    http::ApiResponse post(const std::string& path, const nlohmann::json& body) {
        return app.app().handle(
            Req("POST", path).bearer(token).machine("daint-sim").json_body(body));
    }
};

}  // namespace

TEST_SUITE_BEGIN("utilities");

TEST_CASE("ls endpoint mirrors the sandbox") {
    UtilFixture f;
    f.app.machine().fs().write_file("alice", "/home/alice/seen.txt", "body", false);
    auto resp = f.get("/utilities/ls", "/home/alice");
    REQUIRE(resp.status == 200);
    auto entries = body_of(resp).at("entries");
    bool found = false;
    for (const auto& e : entries) found |= e.at("name") == "seen.txt";
    CHECK(found);

    CHECK(f.get("/utilities/ls", "/home/alice/absent").status == 404);
    CHECK(f.get("/utilities/ls", "/etc").status == 400);
    CHECK(f.app.app()
              .handle(Req("GET", "/utilities/ls").bearer(f.token).machine("ghost-machine")
                          .query("path", "/home/alice"))
              .status == 400);
}

TEST_CASE("file endpoint") {
    UtilFixture f;
    f.app.machine().fs().write_file("alice", "/home/alice/t.txt", "text here", false);
    auto resp = f.get("/utilities/file", "/home/alice/t.txt");
    CHECK(body_of(resp).at("type") == "ASCII text");
    CHECK(body_of(f.get("/utilities/file", "/home/alice")).at("type") == "directory");
}

TEST_CASE("mkdir, rename, chmod, chown, symlink endpoints") {
    UtilFixture f;
    CHECK(f.post("/utilities/mkdir", {{"path", "/home/alice/newdir"}}).status == 201);
    CHECK(f.post("/utilities/mkdir", {{"path", "/home/alice/newdir"}}).status == 409);
    CHECK(f.post("/utilities/mkdir", {{"path", "/home/alice/a/b/c"}, {"parents", true}})
              .status == 201);

    CHECK(f.post("/utilities/rename", {{"source", "/home/alice/newdir"},
                                       {"target", "/home/alice/renamed"}})
              .status == 200);
    CHECK(f.get("/utilities/ls", "/home/alice/renamed").status == 200);
    CHECK(f.post("/utilities/rename", {{"source", "/home/alice/ghost"},
                                       {"target", "/home/alice/x"}})
              .status == 404);

    f.app.machine().fs().write_file("alice", "/home/alice/m.txt", "x", false);
    CHECK(f.post("/utilities/chmod", {{"mode", "755"}, {"path", "/home/alice/m.txt"}}).status ==
          200);
    auto ls = body_of(f.get("/utilities/ls", "/home/alice/m.txt"));
    CHECK(ls.at("entries")[0].at("permissions") == "rwxr-xr-x");
    CHECK(f.post("/utilities/chmod", {{"mode", "9z9"}, {"path", "/home/alice/m.txt"}}).status ==
          400);

    CHECK(f.post("/utilities/chown", {{"path", "/home/alice/m.txt"}, {"owner", "alice"},
                                      {"group", "bob"}})
              .status == 200);
    CHECK(f.post("/utilities/chown", {{"path", "/home/alice/m.txt"}}).status == 400);
    CHECK(f.post("/utilities/chown", {{"path", "/home/alice/m.txt"}, {"owner", "nobody"}})
              .status == 400);

    CHECK(f.post("/utilities/symlink", {{"target", "/home/alice/m.txt"},
                                        {"link_path", "/home/alice/m.link"}})
              .status == 201);
    auto link_ls = body_of(f.get("/utilities/ls", "/home/alice"));
    bool saw_link = false;
    for (const auto& e : link_ls.at("entries")) {
        if (e.at("name") == "m.link") {
            saw_link = true;
            CHECK(e.at("type") == "symlink");
            CHECK(e.at("link_target") == "/home/alice/m.txt");
        }
    }
    CHECK(saw_link);
    CHECK(f.post("/utilities/symlink", {{"target", "/x"}, {"link_path", "/home/alice/m.link"}})
              .status == 409);
}

TEST_CASE("small file upload/download round trip and caps") {
    UtilFixture f;
    std::string content = "small file payload";
    auto up = f.app.app().handle(Req("POST", "/utilities/upload")
                                     .bearer(f.token)
                                     .machine("daint-sim")
                                     .form("path", "/home/alice")
                                     .file("file", "up.txt", content));
    REQUIRE(up.status == 201);

    auto down = f.app.app().handle(Req("GET", "/utilities/download")
                                       .bearer(f.token)
                                       .machine("daint-sim")
                                       .query("path", "/home/alice/up.txt"));
    REQUIRE(down.status == 200);
    CHECK(down.body == content);
    CHECK(down.content_type == "application/octet-stream");

    // Over-cap upload refuses with 413; same for download of a big file.
    std::string big(6 * 1024 * 1024, 'x');
    auto too_big = f.app.app().handle(Req("POST", "/utilities/upload")
                                          .bearer(f.token)
                                          .machine("daint-sim")
                                          .form("path", "/home/alice")
                                          .file("file", "big.bin", big));
    CHECK(too_big.status == 413);

    f.app.machine().fs().write_file("alice", "/home/alice/big-on-disk.bin", big, false);
    auto big_down = f.app.app().handle(Req("GET", "/utilities/download")
                                           .bearer(f.token)
                                           .machine("daint-sim")
                                           .query("path", "/home/alice/big-on-disk.bin"));
    CHECK(big_down.status == 413);
    CHECK(body_of(big_down).at("message").get<std::string>().find("xfer-external") !=
          std::string::npos);

    CHECK(f.get("/utilities/download", "/home/alice/missing.bin").status == 404);
    auto escape = f.app.app().handle(Req("POST", "/utilities/upload")
                                         .bearer(f.token)
                                         .machine("daint-sim")
                                         .form("path", "/etc")
                                         .file("file", "pw", "x"));
    CHECK(escape.status == 400);
}

TEST_CASE("slow sandbox hits the timeout without orphan tasks") {
    TempDir dir;
    auto config = make_config(dir.path());
    config.utilities.timeout_seconds = 1;
    TestApp app(std::move(config));
    auto token = app.token_for("alice");

    app.machine().fs().set_delay_ms(3000);
    auto tasks_before = app.app().tasks().size();
    auto started = std::chrono::steady_clock::now();
    auto resp = app.app().handle(Req("GET", "/utilities/ls")
                                     .bearer(token)
                                     .machine("daint-sim")
                                     .query("path", "/home/alice"));
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - started)
                       .count();
    CHECK(resp.status == 408);
    CHECK(elapsed < 2000);  // timeout + 1 s bound
    CHECK(app.app().tasks().size() == tasks_before);  // synchronous contract: no task
    app.machine().fs().set_delay_ms(0);
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

TEST_SUITE_END();
