#include <doctest.h>

#include "support/harness.hpp"

using namespace firecrest;
using namespace test_support;

TEST_SUITE_BEGIN("status");

TEST_CASE("healthy run reports every system available") {
    TestApp app;
    auto token = app.token_for("alice");
    auto resp = app.app().handle(Req("GET", "/status/systems").bearer(token));
    REQUIRE(resp.status == 200);
    auto systems = body_of(resp).at("systems");
    REQUIRE(systems.size() == 1);  // one configured machine
    CHECK(systems[0].at("system") == "daint-sim");
    CHECK(systems[0].at("status") == "available");
    CHECK(!systems[0].at("checked_at").get<std::string>().empty());
}

TEST_CASE("scheduler fault flips one system without affecting probes elsewhere") {
    TempDir dir;
    auto config = make_config(dir.path());
    MachineConfig second;
    second.name = "dom-sim";
    second.clock = "manual";
    config.machines.push_back(second);
    TestApp app(std::move(config));
    auto token = app.token_for("alice");

    app.app().machines().require("dom-sim").scheduler().set_available(false);
    auto systems = body_of(app.app().handle(Req("GET", "/status/systems").bearer(token)))
                       .at("systems");
    REQUIRE(systems.size() == 2);
    for (const auto& s : systems) {
        if (s.at("system") == "dom-sim") {
            CHECK(s.at("status") == "degraded");  // filesystem up, scheduler down
        } else {
            CHECK(s.at("status") == "available");
        }
    }

    app.app().machines().require("dom-sim").fs().set_available(false);
    systems = body_of(app.app().handle(Req("GET", "/status/systems").bearer(token)))
                  .at("systems");
    for (const auto& s : systems) {
        if (s.at("system") == "dom-sim") CHECK(s.at("status") == "unavailable");
    }
}

TEST_CASE("service listing names all five microservices with endpoints") {
    TestApp app;
    auto token = app.token_for("alice");
    auto services = body_of(app.app().handle(Req("GET", "/status/services").bearer(token)))
                        .at("services");
    REQUIRE(services.size() == 5);
    std::set<std::string> names;
    for (const auto& s : services) {
        names.insert(s.at("name").get<std::string>());
        CHECK(!s.at("endpoint").get<std::string>().empty());
        CHECK(s.at("status") == "available");
    }
    CHECK(names == std::set<std::string>{"compute", "storage", "utilities", "tasks", "status"});
}

TEST_CASE("staging fault marks storage unavailable, expected record set oracle") {
    TestApp app;
    auto token = app.token_for("alice");
    app.app().staging().set_available(false);

    // The expected verdict per service, written down before probing.
    std::map<std::string, std::string> expected = {{"compute", "available"},
                                                   {"storage", "unavailable"},
                                                   {"utilities", "available"},
                                                   {"tasks", "available"},
                                                   {"status", "available"}};
    auto services = body_of(app.app().handle(Req("GET", "/status/services").bearer(token)))
                        .at("services");
    for (const auto& s : services) {
        CHECK(s.at("status").get<std::string>() ==
              expected.at(s.at("name").get<std::string>()));
    }
}

TEST_CASE("status reads do not mutate any other module's state") {
    TestApp app;
    auto token = app.token_for("alice");
    auto tasks_before = app.app().tasks().size();
    auto trace_before = app.machine().scheduler().trace().size();
    auto staging_before = app.app().staging().object_count();

    app.app().handle(Req("GET", "/status/systems").bearer(token));
    app.app().handle(Req("GET", "/status/services").bearer(token));

    CHECK(app.app().tasks().size() == tasks_before);
    CHECK(app.machine().scheduler().trace().size() == trace_before);
    CHECK(app.app().staging().object_count() == staging_before);
}

TEST_SUITE_END();
